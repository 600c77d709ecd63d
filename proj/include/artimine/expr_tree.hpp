#pragma once

#include <functional>
#include <string>
#include <vector>

namespace artimine {

struct Literal {
  enum class Kind { init, transition, condition };
  Kind kind = Kind::transition;
  std::string name;   // transition name or condition variable
  std::string value;  // condition value

  static Literal init() { return {Kind::init, "init", ""}; }
  static Literal transition(std::string t) { return {Kind::transition, std::move(t), ""}; }
  static Literal condition(std::string var, std::string val) { return {Kind::condition, std::move(var), std::move(val)}; }

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

struct ExprNode {
  enum class Op { leaf, all, any };
  Op op = Op::leaf;
  Literal literal;
  std::vector<ExprNode> children;

  static ExprNode leaf(Literal l);
  static ExprNode all(std::vector<ExprNode> c);
  static ExprNode any(std::vector<ExprNode> c);

  friend bool operator==(const ExprNode&, const ExprNode&) = default;
};

using Conjunct = std::vector<Literal>;  // sorted, no duplicates
using Dnf = std::vector<Conjunct>;

/// Equivalent disjunctive normal form. Duplicate and subsumed conjuncts are
/// dropped; conjuncts are ordered by size, then lexicographically. An empty
/// AND is true ({{}}), an empty OR false ({}).
Dnf to_dnf(const ExprNode& tree);

bool evaluate(const ExprNode& tree, const std::function<bool(const Literal&)>& value);
bool evaluate(const Dnf& dnf, const std::function<bool(const Literal&)>& value);

std::size_t leaf_count(const ExprNode& tree);

std::string to_string(const Literal& l);
std::string to_string(const ExprNode& tree);  // AND(a, OR(b, c))
std::string to_string(const Dnf& dnf);

}  // namespace artimine
