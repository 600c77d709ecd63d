#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "artimine/expr_tree.hpp"
#include "artimine/gsm.hpp"
#include "artimine/petri_net.hpp"
#include "json.hpp"

namespace artimine {

// Condition `variable = value` on the arc from `place` to `transition`.
struct BranchCondition {
  std::string place;
  std::string transition;
  std::string variable;
  std::string value;

  friend bool operator==(const BranchCondition&, const BranchCondition&) = default;
};

struct BranchConditions {
  std::vector<BranchCondition> arcs;
  std::vector<ConditionVariable> domains;

  const BranchCondition* find(const std::string& place, const std::string& transition) const;
  // Declared domains, completed with values that only appear on arcs.
  std::vector<ConditionVariable> variables() const;
};

// {"arcs":[{"place","transition","condition":"answer = reject"}],
//  "domains":{"answer":["accept","reject"]}}
BranchConditions branch_conditions_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const BranchConditions& c);

/// enabled(t_o) as a tree over visible transitions, branch conditions and
/// init. Leaves name transitions by their net name. Throws TranslationError
/// on a τ cycle.
ExprNode build_expr_tree(const PetriNet& net, std::size_t t_o, const BranchConditions& conds);

/// Visible transitions that compete with t_o for a token of t_p along
/// τ-paths (t_o included). `t_p` empty means init, i.e. the initial place.
std::set<std::size_t> alt_set(const PetriNet& net, std::optional<std::size_t> t_p, std::size_t t_o);

/// One sentry per conjunct: the simple event form when the conjunct holds a
/// single transition and no init, onCreate() when it holds only init,
/// otherwise the milestone-state form.
std::vector<Sentry> render_sentries(const PetriNet& net, std::size_t t_o, const Dnf& dnf);

struct TranslateOptions {
  std::size_t state_cap = 10000;
  bool allow_inconclusive = false;  // accept nets whose soundness check hits the cap
  std::string artifact;
};

struct Translation {
  GsmModel model;
  std::vector<std::string> warnings;
};

/// One atomic stage per visible transition, in net order. Requires a sound,
/// free-choice workflow net without τ cycles (TranslationError otherwise).
Translation translate(const PetriNet& net, const BranchConditions& conds, const TranslateOptions& options = {});

/// Stage/guard table, one row per guard.
std::string guard_table(const GsmModel& model);

struct EquivalenceReport {
  bool equivalent = true;
  std::size_t valuations = 0;
  std::size_t traces_compared = 0;
  std::string witness;
};

/// Compares the net's visible language (branch variables fixed per run)
/// with gsm_language of `model` for every valuation, up to `max_len`.
EquivalenceReport check_equivalence(const PetriNet& net, const BranchConditions& conds, const GsmModel& model,
                                    std::size_t max_len = 10);

}  // namespace artimine
