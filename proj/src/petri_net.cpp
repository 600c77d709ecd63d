#include "artimine/petri_net.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "artimine/error.hpp"

namespace artimine {

std::size_t PetriNet::add_place(const std::string& name) {
  if (place_index(name)) throw ValidationError("duplicate place '" + name + "'");
  places.push_back(name);
  place_in.emplace_back();
  place_out.emplace_back();
  return places.size() - 1;
}

std::size_t PetriNet::add_transition(const std::string& name, bool visible, const std::string& label) {
  if (transition_index(name)) throw ValidationError("duplicate transition '" + name + "'");
  transitions.push_back({name, visible ? (label.empty() ? name : label) : "", visible});
  pre.emplace_back();
  post.emplace_back();
  return transitions.size() - 1;
}

void PetriNet::add_arc_pt(std::size_t place, std::size_t transition) {
  if (std::find(pre[transition].begin(), pre[transition].end(), place) != pre[transition].end())
    throw ValidationError("duplicate arc " + places[place] + " -> " + transitions[transition].name);
  pre[transition].push_back(place);
  place_out[place].push_back(transition);
}

void PetriNet::add_arc_tp(std::size_t transition, std::size_t place) {
  if (std::find(post[transition].begin(), post[transition].end(), place) != post[transition].end())
    throw ValidationError("duplicate arc " + transitions[transition].name + " -> " + places[place]);
  post[transition].push_back(place);
  place_in[place].push_back(transition);
}

void PetriNet::add_arc(const std::string& from, const std::string& to) {
  auto fp = place_index(from), ft = transition_index(from);
  auto tp = place_index(to), tt = transition_index(to);
  if (fp && tt) return add_arc_pt(*fp, *tt);
  if (ft && tp) return add_arc_tp(*ft, *tp);
  if ((fp || ft) && (tp || tt)) throw ValidationError("arc " + from + " -> " + to + " is not bipartite");
  throw ValidationError("arc " + from + " -> " + to + " names an unknown node");
}

std::optional<std::size_t> PetriNet::place_index(const std::string& name) const {
  auto it = std::find(places.begin(), places.end(), name);
  if (it == places.end()) return std::nullopt;
  return static_cast<std::size_t>(it - places.begin());
}

std::optional<std::size_t> PetriNet::transition_index(const std::string& name) const {
  for (std::size_t i = 0; i < transitions.size(); ++i)
    if (transitions[i].name == name) return i;
  return std::nullopt;
}

std::size_t PetriNet::require_place(const std::string& name) const {
  if (auto p = place_index(name)) return *p;
  throw ValidationError("unknown place '" + name + "'");
}

std::size_t PetriNet::require_transition(const std::string& name) const {
  if (auto t = transition_index(name)) return *t;
  throw ValidationError("unknown transition '" + name + "'");
}

const std::string& PetriNet::label(std::size_t t) const {
  return transitions[t].label.empty() ? transitions[t].name : transitions[t].label;
}

std::size_t PetriNet::arc_count() const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < transitions.size(); ++t) n += pre[t].size() + post[t].size();
  return n;
}

namespace {

std::size_t source_place(const PetriNet& net) {
  if (net.initial) return *net.initial;
  for (std::size_t p = 0; p < net.places.size(); ++p)
    if (net.place_in[p].empty()) return p;
  throw ValidationError("net has no initial place");
}

std::size_t sink_place(const PetriNet& net) {
  if (net.final) return *net.final;
  for (std::size_t p = 0; p < net.places.size(); ++p)
    if (net.place_out[p].empty()) return p;
  throw ValidationError("net has no final place");
}

}  // namespace

Marking initial_marking(const PetriNet& net) {
  Marking m(net.places.size(), 0);
  m[source_place(net)] = 1;
  return m;
}

Marking final_marking(const PetriNet& net) {
  Marking m(net.places.size(), 0);
  m[sink_place(net)] = 1;
  return m;
}

std::string to_string(const PetriNet& net, const Marking& m) {
  std::string out = "[";
  bool first = true;
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (!m[p]) continue;
    out += first ? "" : ", ";
    first = false;
    if (m[p] > 1) out += std::to_string(m[p]) + "*";
    out += net.places[p];
  }
  return out + "]";
}

bool enabled(const PetriNet& net, const Marking& m, std::size_t t) {
  return std::all_of(net.pre[t].begin(), net.pre[t].end(), [&](std::size_t p) { return m[p] > 0; });
}

std::vector<std::size_t> enabled_transitions(const PetriNet& net, const Marking& m) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < net.transitions.size(); ++t)
    if (enabled(net, m, t)) out.push_back(t);
  return out;
}

Marking fire(const PetriNet& net, const Marking& m, std::size_t t) {
  if (!enabled(net, m, t)) throw NotEnabledError("transition '" + net.transitions[t].name + "' is not enabled at " + to_string(net, m));
  Marking out = m;
  for (auto p : net.pre[t]) --out[p];
  for (auto p : net.post[t]) ++out[p];
  return out;
}

Marking unfire(const PetriNet& net, const Marking& m, std::size_t t) {
  for (auto p : net.post[t])
    if (m[p] == 0) throw NotEnabledError("transition '" + net.transitions[t].name + "' cannot be reversed at " + to_string(net, m));
  Marking out = m;
  for (auto p : net.post[t]) --out[p];
  for (auto p : net.pre[t]) ++out[p];
  return out;
}

StructureCheck is_workflow_net(const PetriNet& net) {
  StructureCheck r;
  std::vector<std::size_t> sources, sinks;
  for (std::size_t p = 0; p < net.places.size(); ++p) {
    if (net.place_in[p].empty()) sources.push_back(p);
    if (net.place_out[p].empty()) sinks.push_back(p);
  }
  auto names = [&](const std::vector<std::size_t>& v) {
    std::string s;
    for (auto p : v) s += (s.empty() ? "" : ", ") + net.places[p];
    return s.empty() ? std::string("none") : s;
  };
  if (sources.size() != 1) r.witnesses.push_back("expected one source place, found: " + names(sources));
  if (sinks.size() != 1) r.witnesses.push_back("expected one sink place, found: " + names(sinks));
  if (net.initial && (sources.size() != 1 || sources[0] != *net.initial))
    r.witnesses.push_back("initial place '" + net.places[*net.initial] + "' is not the unique source");
  if (net.final && (sinks.size() != 1 || sinks[0] != *net.final))
    r.witnesses.push_back("final place '" + net.places[*net.final] + "' is not the unique sink");
  if (!r.witnesses.empty()) {
    r.ok = false;
    return r;
  }

  // node ids: places 0..P-1, transitions P..
  const std::size_t P = net.places.size(), N = P + net.transitions.size();
  auto walk = [&](std::size_t start, bool forward) {
    std::vector<bool> seen(N, false);
    std::deque<std::size_t> q{start};
    seen[start] = true;
    while (!q.empty()) {
      auto n = q.front();
      q.pop_front();
      std::vector<std::size_t> next;
      if (n < P) {
        for (auto t : forward ? net.place_out[n] : net.place_in[n]) next.push_back(P + t);
      } else {
        for (auto p : forward ? net.post[n - P] : net.pre[n - P]) next.push_back(p);
      }
      for (auto x : next)
        if (!seen[x]) {
          seen[x] = true;
          q.push_back(x);
        }
    }
    return seen;
  };
  auto from_source = walk(sources[0], true);
  auto to_sink = walk(sinks[0], false);
  for (std::size_t n = 0; n < N; ++n)
    if (!from_source[n] || !to_sink[n]) {
      std::string name = n < P ? "place " + net.places[n] : "transition " + net.transitions[n - P].name;
      r.witnesses.push_back(name + " is not on a path from " + net.places[sources[0]] + " to " + net.places[sinks[0]]);
    }
  r.ok = r.witnesses.empty();
  return r;
}

StructureCheck is_free_choice(const PetriNet& net) {
  StructureCheck r;
  for (std::size_t p = 0; p < net.places.size(); ++p) {
    if (net.place_out[p].size() < 2) continue;
    for (auto t : net.place_out[p])
      if (net.pre[t].size() != 1) r.witnesses.push_back(net.places[p] + "/" + net.transitions[t].name);
  }
  r.ok = r.witnesses.empty();
  return r;
}

std::string to_string(Soundness s) {
  switch (s) {
    case Soundness::sound: return "sound";
    case Soundness::unsound: return "unsound";
    case Soundness::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::optional<std::vector<Marking>> reachable_markings(const PetriNet& net, std::size_t state_cap) {
  std::map<Marking, std::size_t> index;
  std::vector<Marking> states{initial_marking(net)};
  index[states[0]] = 0;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (auto t : enabled_transitions(net, states[i])) {
      auto m = fire(net, states[i], t);
      if (index.contains(m)) continue;
      if (states.size() >= state_cap) return std::nullopt;
      index[m] = states.size();
      states.push_back(std::move(m));
    }
  return states;
}

SoundnessReport is_sound(const PetriNet& net, std::size_t state_cap) {
  SoundnessReport r;
  auto wf = is_workflow_net(net);
  if (!wf.ok) {
    r.verdict = Soundness::unsound;
    r.witness = "not a workflow net: " + wf.witnesses.front();
    return r;
  }
  const auto fin = final_marking(net);
  const auto sink = sink_place(net);
  std::map<Marking, std::size_t> index;
  std::vector<Marking> states{initial_marking(net)};
  std::vector<std::vector<std::size_t>> preds(1);
  std::vector<bool> fired(net.transitions.size(), false);
  index[states[0]] = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Marking cur = states[i];
    if (cur[sink] > 0 && cur != fin) {
      r.verdict = Soundness::unsound;
      r.witness = "improper completion at " + to_string(net, cur);
      r.states = states.size();
      return r;
    }
    for (auto t : enabled_transitions(net, cur)) {
      fired[t] = true;
      auto m = fire(net, cur, t);
      auto it = index.find(m);
      if (it == index.end()) {
        if (states.size() >= state_cap) {
          r.verdict = Soundness::inconclusive;
          r.witness = "state cap of " + std::to_string(state_cap) + " reached";
          r.states = states.size();
          return r;
        }
        it = index.emplace(m, states.size()).first;
        states.push_back(std::move(m));
        preds.emplace_back();
      }
      preds[it->second].push_back(i);
    }
  }
  r.states = states.size();
  std::vector<bool> can_finish(states.size(), false);
  if (auto f = index.find(fin); f != index.end()) {
    std::deque<std::size_t> q{f->second};
    can_finish[f->second] = true;
    while (!q.empty()) {
      auto s = q.front();
      q.pop_front();
      for (auto p : preds[s])
        if (!can_finish[p]) {
          can_finish[p] = true;
          q.push_back(p);
        }
    }
  }
  for (std::size_t i = 0; i < states.size(); ++i)
    if (!can_finish[i]) {
      r.verdict = Soundness::unsound;
      r.witness = "no option to complete from " + to_string(net, states[i]);
      return r;
    }
  for (std::size_t t = 0; t < fired.size(); ++t)
    if (!fired[t]) {
      r.verdict = Soundness::unsound;
      r.witness = "dead transition " + net.transitions[t].name;
      return r;
    }
  r.verdict = Soundness::sound;
  return r;
}

namespace {

template <typename Visit>
void explore(const PetriNet& net, std::size_t max_len, const std::function<bool(std::size_t)>& allow,
             std::size_t state_cap, Visit visit) {
  std::set<std::pair<Marking, Trace>> seen;
  std::vector<std::pair<Marking, Trace>> stack{{initial_marking(net), {}}};
  seen.insert(stack.back());
  while (!stack.empty()) {
    auto [m, trace] = std::move(stack.back());
    stack.pop_back();
    visit(m, trace);
    for (auto t : enabled_transitions(net, m)) {
      if (allow && !allow(t)) continue;
      Trace next = trace;
      if (net.transitions[t].visible) {
        if (trace.size() >= max_len) continue;
        next.push_back(net.label(t));
      }
      std::pair<Marking, Trace> state{fire(net, m, t), std::move(next)};
      if (seen.contains(state)) continue;
      if (seen.size() >= state_cap) throw Error("language exploration exceeded " + std::to_string(state_cap) + " states");
      seen.insert(state);
      stack.push_back(std::move(state));
    }
  }
}

}  // namespace

std::set<Trace> visible_language(const PetriNet& net, std::size_t max_len, const std::function<bool(std::size_t)>& allow,
                                 std::size_t state_cap) {
  std::set<Trace> out;
  explore(net, max_len, allow, state_cap, [&](const Marking&, const Trace& t) { out.insert(t); });
  return out;
}

std::set<Trace> complete_traces(const PetriNet& net, std::size_t max_len, const std::function<bool(std::size_t)>& allow,
                                std::size_t state_cap) {
  std::set<Trace> out;
  const auto fin = final_marking(net);
  explore(net, max_len, allow, state_cap, [&](const Marking& m, const Trace& t) {
    if (m == fin) out.insert(t);
  });
  return out;
}

std::vector<std::size_t> tau_cycle(const PetriNet& net) {
  const std::size_t T = net.transitions.size();
  std::vector<std::vector<std::size_t>> succ(T);
  for (std::size_t t = 0; t < T; ++t) {
    if (net.transitions[t].visible) continue;
    for (auto p : net.post[t])
      for (auto u : net.place_out[p])
        if (!net.transitions[u].visible) succ[t].push_back(u);
  }
  std::vector<int> color(T, 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> cycle;
  std::function<bool(std::size_t)> dfs = [&](std::size_t t) {
    color[t] = 1;
    stack.push_back(t);
    for (auto u : succ[t]) {
      if (color[u] == 1) {
        auto it = std::find(stack.begin(), stack.end(), u);
        cycle.assign(it, stack.end());
        return true;
      }
      if (color[u] == 0 && dfs(u)) return true;
    }
    color[t] = 2;
    stack.pop_back();
    return false;
  };
  for (std::size_t t = 0; t < T; ++t)
    if (!net.transitions[t].visible && color[t] == 0 && dfs(t)) break;
  return cycle;
}

}  // namespace artimine
