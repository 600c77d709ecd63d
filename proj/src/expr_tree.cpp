#include "artimine/expr_tree.hpp"

#include <algorithm>

namespace artimine {

ExprNode ExprNode::leaf(Literal l) {
  ExprNode n;
  n.literal = std::move(l);
  return n;
}

ExprNode ExprNode::all(std::vector<ExprNode> c) {
  ExprNode n;
  n.op = Op::all;
  n.children = std::move(c);
  return n;
}

ExprNode ExprNode::any(std::vector<ExprNode> c) {
  ExprNode n;
  n.op = Op::any;
  n.children = std::move(c);
  return n;
}

namespace {

// Drops duplicates and conjuncts that strictly contain another one.
Dnf minimize(Dnf d) {
  for (auto& c : d) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  std::sort(d.begin(), d.end(), [](const Conjunct& a, const Conjunct& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  d.erase(std::unique(d.begin(), d.end()), d.end());
  Dnf out;
  for (const auto& c : d) {
    bool subsumed = std::any_of(out.begin(), out.end(), [&](const Conjunct& k) {
      return std::includes(c.begin(), c.end(), k.begin(), k.end());
    });
    if (!subsumed) out.push_back(c);
  }
  return out;
}

}  // namespace

Dnf to_dnf(const ExprNode& tree) {
  switch (tree.op) {
    case ExprNode::Op::leaf: return {{tree.literal}};
    case ExprNode::Op::any: {
      Dnf out;
      for (const auto& c : tree.children) {
        auto sub = to_dnf(c);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return minimize(std::move(out));
    }
    case ExprNode::Op::all: {
      Dnf acc{{}};
      for (const auto& c : tree.children) {
        auto sub = to_dnf(c);
        Dnf next;
        for (const auto& a : acc)
          for (const auto& b : sub) {
            Conjunct m = a;
            m.insert(m.end(), b.begin(), b.end());
            next.push_back(std::move(m));
          }
        acc = minimize(std::move(next));
      }
      return acc;
    }
  }
  return {};
}

bool evaluate(const ExprNode& tree, const std::function<bool(const Literal&)>& value) {
  switch (tree.op) {
    case ExprNode::Op::leaf: return value(tree.literal);
    case ExprNode::Op::all:
      return std::all_of(tree.children.begin(), tree.children.end(), [&](const ExprNode& c) { return evaluate(c, value); });
    case ExprNode::Op::any:
      return std::any_of(tree.children.begin(), tree.children.end(), [&](const ExprNode& c) { return evaluate(c, value); });
  }
  return false;
}

bool evaluate(const Dnf& dnf, const std::function<bool(const Literal&)>& value) {
  return std::any_of(dnf.begin(), dnf.end(),
                     [&](const Conjunct& c) { return std::all_of(c.begin(), c.end(), value); });
}

std::size_t leaf_count(const ExprNode& tree) {
  if (tree.op == ExprNode::Op::leaf) return 1;
  std::size_t n = 0;
  for (const auto& c : tree.children) n += leaf_count(c);
  return n;
}

std::string to_string(const Literal& l) {
  switch (l.kind) {
    case Literal::Kind::init: return "init";
    case Literal::Kind::transition: return l.name;
    case Literal::Kind::condition: return l.name + "=" + l.value;
  }
  return "";
}

std::string to_string(const ExprNode& tree) {
  if (tree.op == ExprNode::Op::leaf) return to_string(tree.literal);
  std::string out = tree.op == ExprNode::Op::all ? "AND(" : "OR(";
  for (std::size_t i = 0; i < tree.children.size(); ++i) out += (i ? ", " : "") + to_string(tree.children[i]);
  return out + ")";
}

std::string to_string(const Dnf& dnf) {
  std::string out;
  for (std::size_t i = 0; i < dnf.size(); ++i) {
    out += i ? " | {" : "{";
    for (std::size_t j = 0; j < dnf[i].size(); ++j) out += (j ? ", " : "") + to_string(dnf[i][j]);
    out += "}";
  }
  return out.empty() ? "false" : out;
}

}  // namespace artimine
