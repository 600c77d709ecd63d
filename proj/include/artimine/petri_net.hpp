#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace artimine {

struct Transition {
  std::string name;
  std::string label;  // activity name; empty for τ
  bool visible = true;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Place/transition net with unit arc weights. Nodes are addressed by index;
// names are unique per node kind.
struct PetriNet {
  std::vector<std::string> places;
  std::vector<Transition> transitions;
  std::vector<std::vector<std::size_t>> pre, post;              // per transition: places
  std::vector<std::vector<std::size_t>> place_in, place_out;    // per place: transitions
  std::optional<std::size_t> initial, final;

  std::size_t add_place(const std::string& name);
  std::size_t add_transition(const std::string& name, bool visible = true, const std::string& label = "");
  void add_arc_pt(std::size_t place, std::size_t transition);
  void add_arc_tp(std::size_t transition, std::size_t place);
  // Arc between two named nodes; the direction decides the kind.
  void add_arc(const std::string& from, const std::string& to);

  std::optional<std::size_t> place_index(const std::string& name) const;
  std::optional<std::size_t> transition_index(const std::string& name) const;
  std::size_t require_place(const std::string& name) const;
  std::size_t require_transition(const std::string& name) const;
  const std::string& label(std::size_t t) const;  // label, or name when no label is set
  std::size_t arc_count() const;

  friend bool operator==(const PetriNet&, const PetriNet&) = default;
};

using Marking = std::vector<unsigned>;

Marking initial_marking(const PetriNet& net);
Marking final_marking(const PetriNet& net);
std::string to_string(const PetriNet& net, const Marking& m);  // "[p1, 2*p3]"

bool enabled(const PetriNet& net, const Marking& m, std::size_t t);
std::vector<std::size_t> enabled_transitions(const PetriNet& net, const Marking& m);
Marking fire(const PetriNet& net, const Marking& m, std::size_t t);  // throws NotEnabledError
Marking unfire(const PetriNet& net, const Marking& m, std::size_t t);

struct StructureCheck {
  bool ok = true;
  std::vector<std::string> witnesses;
};

/// Unique source place, unique sink place, every node on a path between them.
/// Designated initial/final places must be that source and sink.
StructureCheck is_workflow_net(const PetriNet& net);

/// A place with several output transitions is the only input place of each.
/// Witnesses read "place/transition".
StructureCheck is_free_choice(const PetriNet& net);

enum class Soundness { sound, unsound, inconclusive };
std::string to_string(Soundness s);

struct SoundnessReport {
  Soundness verdict = Soundness::inconclusive;
  std::string witness;
  std::size_t states = 0;
};

/// Exhaustive reachability from the initial marking, at most `state_cap`
/// markings. Checks option to complete, proper completion, and dead
/// transitions.
SoundnessReport is_sound(const PetriNet& net, std::size_t state_cap = 10000);

/// Every marking reachable from the initial one, or nullopt beyond the cap.
std::optional<std::vector<Marking>> reachable_markings(const PetriNet& net, std::size_t state_cap);

using Trace = std::vector<std::string>;

/// Prefix-closed set of visible label sequences of length ≤ max_len. τ fires
/// freely. `allow` filters transitions (e.g. by branch conditions).
std::set<Trace> visible_language(const PetriNet& net, std::size_t max_len,
                                 const std::function<bool(std::size_t)>& allow = {},
                                 std::size_t state_cap = 1000000);

/// Complete runs (initial to final marking) of at most `max_len` visible steps.
std::set<Trace> complete_traces(const PetriNet& net, std::size_t max_len,
                                const std::function<bool(std::size_t)>& allow = {},
                                std::size_t state_cap = 1000000);

/// Transitions on a cycle made only of τ transitions, empty when none.
std::vector<std::size_t> tau_cycle(const PetriNet& net);

}  // namespace artimine
