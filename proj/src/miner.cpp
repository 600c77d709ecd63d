#include "artimine/miner.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "artimine/error.hpp"

namespace artimine {

Relation Footprint::relation(const std::string& a, const std::string& b) const {
  bool ab = follows.contains({a, b}), ba = follows.contains({b, a});
  if (ab && ba) return Relation::parallel;
  if (ab) return Relation::causal;
  if (ba) return Relation::reverse_causal;
  return Relation::none;
}

Footprint footprint(const std::vector<Trace>& log) {
  Footprint f;
  std::set<std::string> acts;
  for (const auto& t : log) {
    if (t.empty()) continue;
    f.starts.insert(t.front());
    f.ends.insert(t.back());
    for (std::size_t i = 0; i < t.size(); ++i) {
      acts.insert(t[i]);
      if (i + 1 < t.size()) f.follows.insert({t[i], t[i + 1]});
    }
  }
  f.activities.assign(acts.begin(), acts.end());
  return f;
}

PetriNet flower_model(const std::vector<std::string>& activities) {
  PetriNet net;
  auto i = net.add_place("start");
  auto c = net.add_place("center");
  auto o = net.add_place("end");
  auto s = net.add_transition("tau_start", false);
  auto e = net.add_transition("tau_end", false);
  net.add_arc_pt(i, s);
  net.add_arc_tp(s, c);
  net.add_arc_pt(c, e);
  net.add_arc_tp(e, o);
  for (const auto& a : activities) {
    auto t = net.add_transition(a);
    net.add_arc_pt(c, t);
    net.add_arc_tp(t, c);
  }
  net.initial = i;
  net.final = o;
  return net;
}

namespace {

constexpr const char* kStart = "\x01start";
constexpr const char* kEnd = "\x01end";

using Set = std::vector<std::size_t>;  // sorted activity indices

bool subset(const Set& a, const Set& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

}  // namespace

MineResult mine_lifecycle_detailed(const std::vector<Trace>& input) {
  std::vector<Trace> log;
  for (const auto& t : input)
    if (!t.empty()) log.push_back(t);
  if (log.empty()) throw ValidationError("cannot mine an empty log");

  MineResult result;
  auto fp0 = footprint(log);
  result.artificial_start = fp0.starts.size() > 1;
  result.artificial_end = fp0.ends.size() > 1;
  if (result.artificial_start || result.artificial_end)
    for (auto& t : log) {
      if (result.artificial_start) t.insert(t.begin(), kStart);
      if (result.artificial_end) t.push_back(kEnd);
    }
  auto fp = footprint(log);
  const auto& acts = fp.activities;
  const std::size_t n = acts.size();
  std::vector<std::vector<Relation>> rel(n, std::vector<Relation>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) rel[a][b] = fp.relation(acts[a], acts[b]);

  // all sets of pairwise unrelated activities (a # a included)
  std::vector<Set> independent;
  std::function<void(std::size_t, Set&)> grow = [&](std::size_t from, Set& cur) {
    for (std::size_t x = from; x < n; ++x) {
      if (rel[x][x] != Relation::none) continue;
      if (!std::all_of(cur.begin(), cur.end(), [&](std::size_t y) { return rel[x][y] == Relation::none; })) continue;
      cur.push_back(x);
      independent.push_back(cur);
      grow(x + 1, cur);
      cur.pop_back();
    }
  };
  Set scratch;
  grow(0, scratch);

  std::vector<std::pair<Set, Set>> pairs;
  for (const auto& A : independent)
    for (const auto& B : independent) {
      bool ok = std::all_of(A.begin(), A.end(), [&](std::size_t a) {
        return std::all_of(B.begin(), B.end(), [&](std::size_t b) { return rel[a][b] == Relation::causal; });
      });
      if (ok) pairs.push_back({A, B});
    }
  std::vector<std::pair<Set, Set>> maximal;
  for (const auto& p : pairs) {
    bool dominated = std::any_of(pairs.begin(), pairs.end(), [&](const auto& q) {
      return q != p && subset(p.first, q.first) && subset(p.second, q.second);
    });
    if (!dominated) maximal.push_back(p);
  }

  PetriNet& net = result.net;
  auto name_of = [&](std::size_t a) -> std::string {
    if (acts[a] == kStart) return "tau_start";
    if (acts[a] == kEnd) return "tau_end";
    return acts[a];
  };
  std::vector<std::size_t> tr(n);
  for (std::size_t a = 0; a < n; ++a) {
    bool tau = acts[a] == kStart || acts[a] == kEnd;
    tr[a] = net.add_transition(name_of(a), !tau);
  }
  auto i = net.add_place("i");
  for (const auto& s : fp.starts) net.add_arc_pt(i, tr[std::find(acts.begin(), acts.end(), s) - acts.begin()]);
  for (const auto& [A, B] : maximal) {
    std::string name = "p({";
    for (std::size_t k = 0; k < A.size(); ++k) name += (k ? "," : "") + name_of(A[k]);
    name += "},{";
    for (std::size_t k = 0; k < B.size(); ++k) name += (k ? "," : "") + name_of(B[k]);
    name += "})";
    auto p = net.add_place(name);
    for (auto a : A) net.add_arc_tp(tr[a], p);
    for (auto b : B) net.add_arc_pt(p, tr[b]);
  }
  auto o = net.add_place("o");
  for (const auto& e : fp.ends) net.add_arc_tp(tr[std::find(acts.begin(), acts.end(), e) - acts.begin()], o);
  net.initial = i;
  net.final = o;

  if (!is_workflow_net(net).ok) {
    result.net = flower_model(fp0.activities);
    result.flower = true;
  }
  return result;
}

PetriNet mine_lifecycle(const std::vector<Trace>& log) { return mine_lifecycle_detailed(log).net; }

namespace {

// Markings reachable by τ firings only, at most `budget` deep.
std::set<Marking> tau_closure(const PetriNet& net, const std::set<Marking>& from, std::size_t budget) {
  std::set<Marking> out = from;
  std::deque<std::pair<Marking, std::size_t>> q;
  for (const auto& m : from) q.push_back({m, 0});
  while (!q.empty()) {
    auto [m, d] = q.front();
    q.pop_front();
    if (d >= budget) continue;
    for (auto t : enabled_transitions(net, m)) {
      if (net.transitions[t].visible) continue;
      auto next = fire(net, m, t);
      if (out.insert(next).second) q.push_back({std::move(next), d + 1});
    }
  }
  return out;
}

}  // namespace

bool replays(const PetriNet& net, const Trace& trace, std::size_t tau_budget) {
  std::set<Marking> frontier{initial_marking(net)};
  for (const auto& activity : trace) {
    std::set<Marking> next;
    for (const auto& m : tau_closure(net, frontier, tau_budget))
      for (auto t : enabled_transitions(net, m))
        if (net.transitions[t].visible && net.label(t) == activity) next.insert(fire(net, m, t));
    if (next.empty()) return false;
    frontier = std::move(next);
  }
  return tau_closure(net, frontier, tau_budget).contains(final_marking(net));
}

double replay_fitness(const PetriNet& net, const std::vector<Trace>& log, std::size_t tau_budget) {
  if (log.empty()) return 1.0;
  std::size_t ok = 0;
  for (const auto& t : log)
    if (replays(net, t, tau_budget)) ++ok;
  return static_cast<double>(ok) / static_cast<double>(log.size());
}

}  // namespace artimine
