#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "artimine/petri_net.hpp"

namespace artimine {

enum class Relation { none, causal, reverse_causal, parallel };  // #, →, ←, ∥

struct Footprint {
  std::vector<std::string> activities;  // sorted
  std::set<std::pair<std::string, std::string>> follows;  // directly-follows
  std::set<std::string> starts, ends;

  Relation relation(const std::string& a, const std::string& b) const;
};

Footprint footprint(const std::vector<Trace>& log);

struct MineResult {
  PetriNet net;
  bool artificial_start = false;
  bool artificial_end = false;
  bool flower = false;  // alpha result was not a workflow net
};

/// Alpha-style discovery. When the log has several start (end) activities a
/// τ start (end) transition is added. Falls back to a flower model when the
/// alpha construction does not yield a workflow net. Throws ValidationError
/// on an empty log.
MineResult mine_lifecycle_detailed(const std::vector<Trace>& log);
PetriNet mine_lifecycle(const std::vector<Trace>& log);

/// Flower model: any sequence over `activities`.
PetriNet flower_model(const std::vector<std::string>& activities);

/// True when the net can replay `trace` from the initial to the final
/// marking, firing τ transitions between visible steps (at most `tau_budget`
/// τ firings per step).
bool replays(const PetriNet& net, const Trace& trace, std::size_t tau_budget = 16);

/// Fraction of traces that replay.
double replay_fitness(const PetriNet& net, const std::vector<Trace>& log, std::size_t tau_budget = 16);

}  // namespace artimine
