#include "artimine/pn2gsm.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "artimine/error.hpp"

namespace artimine {

using nlohmann::json;
using nlohmann::ordered_json;

const BranchCondition* BranchConditions::find(const std::string& place, const std::string& transition) const {
  for (const auto& a : arcs)
    if (a.place == place && a.transition == transition) return &a;
  return nullptr;
}

std::vector<ConditionVariable> BranchConditions::variables() const {
  std::vector<ConditionVariable> out = domains;
  for (const auto& a : arcs) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& v) { return v.name == a.variable; });
    if (it == out.end()) {
      out.push_back({a.variable, {}});
      it = out.end() - 1;
    }
    if (std::find(it->domain.begin(), it->domain.end(), a.value) == it->domain.end()) it->domain.push_back(a.value);
  }
  return out;
}

BranchConditions branch_conditions_from_json(const json& j) {
  BranchConditions c;
  try {
    if (j.contains("arcs"))
      for (const auto& a : j.at("arcs")) {
        auto text = a.at("condition").get<std::string>();
        auto s = parse_sentry("if " + text);
        if (s.event || !s.condition || s.condition->op != Condition::Op::atom ||
            s.condition->atom.kind != AtomKind::equals || s.condition->atom.negated)
          throw ParseError(0, "branch condition must read 'variable = value', got '" + text + "'");
        c.arcs.push_back({a.at("place").get<std::string>(), a.at("transition").get<std::string>(),
                          s.condition->atom.first, s.condition->atom.second});
      }
    if (j.contains("domains"))
      for (const auto& [name, values] : j.at("domains").items())
        c.domains.push_back({name, values.get<std::vector<std::string>>()});
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("branch conditions: ") + e.what());
  }
  return c;
}

ordered_json to_json(const BranchConditions& c) {
  ordered_json j;
  j["arcs"] = ordered_json::array();
  for (const auto& a : c.arcs)
    j["arcs"].push_back({{"place", a.place}, {"transition", a.transition}, {"condition", a.variable + " = " + a.value}});
  j["domains"] = ordered_json::object();
  for (const auto& v : c.domains) j["domains"][v.name] = v.domain;
  return j;
}

namespace {

struct TreeBuilder {
  const PetriNet& net;
  const BranchConditions& conds;
  std::map<std::size_t, ExprNode> memo;
  std::vector<std::size_t> active;

  ExprNode enabled(std::size_t t) {
    if (auto it = memo.find(t); it != memo.end()) return it->second;
    if (auto it = std::find(active.begin(), active.end(), t); it != active.end()) {
      std::string cycle;
      for (; it != active.end(); ++it) cycle += net.transitions[*it].name + " -> ";
      throw TranslationError("cycle of invisible transitions: " + cycle + net.transitions[t].name);
    }
    active.push_back(t);
    std::vector<ExprNode> parts;
    for (auto p : net.pre[t]) parts.push_back(markable(p));
    for (auto p : net.pre[t])
      if (auto c = conds.find(net.places[p], net.transitions[t].name))
        parts.push_back(ExprNode::leaf(Literal::condition(c->variable, c->value)));
    active.pop_back();
    ExprNode node = parts.size() == 1 ? parts.front() : ExprNode::all(std::move(parts));
    memo.emplace(t, node);
    return node;
  }

  ExprNode markable(std::size_t p) {
    if (net.initial && *net.initial == p) return ExprNode::leaf(Literal::init());
    std::vector<ExprNode> alts;
    for (auto r : net.place_in[p])
      alts.push_back(net.transitions[r].visible ? ExprNode::leaf(Literal::transition(net.transitions[r].name)) : enabled(r));
    if (alts.size() == 1) return alts.front();
    return ExprNode::any(std::move(alts));
  }
};

std::string stage_of(const PetriNet& net, std::size_t t) { return net.label(t); }

PetriNet with_initial(const PetriNet& net) {
  PetriNet copy = net;
  if (!copy.initial) {
    auto m = initial_marking(net);
    copy.initial = static_cast<std::size_t>(std::find(m.begin(), m.end(), 1u) - m.begin());
  }
  return copy;
}

}  // namespace

ExprNode build_expr_tree(const PetriNet& net, std::size_t t_o, const BranchConditions& conds) {
  if (t_o >= net.transitions.size()) throw TranslationError("unknown origin transition");
  auto wf = is_workflow_net(net);
  if (!wf.ok) throw TranslationError("not a workflow net: " + wf.witnesses.front());
  auto copy = with_initial(net);
  TreeBuilder b{copy, conds, {}, {}};
  return b.enabled(t_o);
}

std::set<std::size_t> alt_set(const PetriNet& net, std::optional<std::size_t> t_p, std::size_t t_o) {
  // places reachable from t_p through τ transitions only
  std::set<std::size_t> forward;
  std::deque<std::size_t> q;
  if (t_p) {
    for (auto p : net.post[*t_p]) q.push_back(p);
  } else {
    auto m = initial_marking(net);
    for (std::size_t p = 0; p < m.size(); ++p)
      if (m[p]) q.push_back(p);
  }
  while (!q.empty()) {
    auto p = q.front();
    q.pop_front();
    if (!forward.insert(p).second) continue;
    for (auto t : net.place_out[p])
      if (!net.transitions[t].visible)
        for (auto x : net.post[t]) q.push_back(x);
  }
  // places that reach t_o through τ transitions only
  std::set<std::size_t> backward;
  for (auto p : net.pre[t_o]) q.push_back(p);
  while (!q.empty()) {
    auto p = q.front();
    q.pop_front();
    if (!backward.insert(p).second) continue;
    for (auto t : net.place_in[p])
      if (!net.transitions[t].visible)
        for (auto x : net.pre[t]) q.push_back(x);
  }
  std::set<std::size_t> out{t_o};
  for (auto p : forward) {
    if (!backward.contains(p)) continue;
    std::set<std::size_t> seen;
    std::deque<std::size_t> w{p};
    while (!w.empty()) {
      auto x = w.front();
      w.pop_front();
      if (!seen.insert(x).second) continue;
      for (auto t : net.place_out[x]) {
        if (net.transitions[t].visible) out.insert(t);
        else
          for (auto y : net.post[t]) w.push_back(y);
      }
    }
  }
  return out;
}

std::vector<Sentry> render_sentries(const PetriNet& net, std::size_t t_o, const Dnf& dnf) {
  std::vector<Sentry> out;
  for (const auto& conj : dnf) {
    std::vector<std::size_t> refs;
    bool init = false;
    std::vector<Atom> data;
    for (const auto& l : conj) {
      switch (l.kind) {
        case Literal::Kind::init: init = true; break;
        case Literal::Kind::transition: refs.push_back(net.require_transition(l.name)); break;
        case Literal::Kind::condition: data.push_back({AtomKind::equals, l.name, l.value, false}); break;
      }
    }
    std::sort(data.begin(), data.end(), [](const Atom& a, const Atom& b) { return to_string(a) < to_string(b); });
    auto data_condition = [&]() -> std::optional<Condition> {
      if (data.empty()) return std::nullopt;
      std::vector<Condition> c;
      for (const auto& a : data) c.push_back(Condition::leaf(a));
      return Condition::conjunction(std::move(c));
    };

    Sentry s;
    if (refs.size() == 1 && !init) {
      s.event = SentryEvent{SentryEventKind::milestone_achieved, milestone_name(stage_of(net, refs.front()))};
      s.condition = data_condition();
    } else if (refs.empty() && init) {
      s.event = SentryEvent{SentryEventKind::on_create, ""};
      s.condition = data_condition();
    } else if (refs.empty()) {
      throw TranslationError("guard of '" + net.transitions[t_o].name + "' depends on no transition");
    } else {
      std::vector<Atom> achieved, toggled;
      auto add = [&](const std::string& m_p, std::optional<std::size_t> t_p) {
        achieved.push_back({AtomKind::achieved, m_p, "", false});
        for (auto t_s : alt_set(net, t_p, t_o))
          toggled.push_back({AtomKind::toggled_after, m_p, milestone_name(stage_of(net, t_s)), false});
      };
      if (init) add(kInitMilestone, std::nullopt);
      for (auto r : refs) add(milestone_name(stage_of(net, r)), r);
      auto by_text = [](const Atom& a, const Atom& b) { return to_string(a) < to_string(b); };
      std::sort(achieved.begin(), achieved.end(), by_text);
      std::sort(toggled.begin(), toggled.end(), by_text);
      achieved.erase(std::unique(achieved.begin(), achieved.end()), achieved.end());
      toggled.erase(std::unique(toggled.begin(), toggled.end()), toggled.end());
      std::vector<Condition> c;
      for (const auto& a : achieved) c.push_back(Condition::leaf(a));
      for (const auto& a : toggled) c.push_back(Condition::leaf(a));
      for (const auto& a : data) c.push_back(Condition::leaf(a));
      s.condition = Condition::conjunction(std::move(c));
    }
    out.push_back(std::move(s));
  }
  return out;
}

Translation translate(const PetriNet& input, const BranchConditions& conds, const TranslateOptions& options) {
  Translation result;
  auto wf = is_workflow_net(input);
  if (!wf.ok) throw TranslationError("not a workflow net: " + wf.witnesses.front());
  PetriNet net = with_initial(input);
  auto fc = is_free_choice(net);
  if (!fc.ok) throw TranslationError("not free-choice: " + fc.witnesses.front());
  if (auto cycle = tau_cycle(net); !cycle.empty()) {
    std::string text;
    for (auto t : cycle) text += (text.empty() ? "" : " -> ") + net.transitions[t].name;
    throw TranslationError("cycle of invisible transitions: " + text);
  }
  auto sound = is_sound(net, options.state_cap);
  if (sound.verdict == Soundness::unsound) throw TranslationError("net is not sound: " + sound.witness);
  if (sound.verdict == Soundness::inconclusive) {
    if (!options.allow_inconclusive) throw TranslationError("soundness inconclusive: " + sound.witness);
    result.warnings.push_back("soundness inconclusive (" + sound.witness + "); translated on request");
  }
  for (const auto& a : conds.arcs) {
    auto p = net.place_index(a.place);
    auto t = net.transition_index(a.transition);
    if (!p || !t || std::find(net.pre[*t].begin(), net.pre[*t].end(), *p) == net.pre[*t].end())
      throw TranslationError("branch condition on missing arc " + a.place + " -> " + a.transition);
  }
  for (std::size_t p = 0; p < net.places.size(); ++p) {
    if (net.place_out[p].size() < 2) continue;
    std::vector<std::string> missing;
    for (auto t : net.place_out[p])
      if (!conds.find(net.places[p], net.transitions[t].name)) missing.push_back(net.transitions[t].name);
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      result.warnings.push_back("choice place " + net.places[p] + " has unconditioned arcs to " + list +
                                "; the guards involved are nondeterministic");
    }
  }

  std::set<std::string> stage_names;
  std::set<std::string> used_vars;
  GsmModel& model = result.model;
  model.artifact = options.artifact;
  TreeBuilder builder{net, conds, {}, {}};
  for (std::size_t t = 0; t < net.transitions.size(); ++t) {
    if (!net.transitions[t].visible) continue;
    auto name = stage_of(net, t);
    if (!stage_names.insert(name).second) throw TranslationError("two visible transitions share the label '" + name + "'");
    Stage stage;
    stage.name = name;
    stage.task = name;
    auto dnf = to_dnf(builder.enabled(t));
    // conjuncts asking one variable for two values can never hold
    std::erase_if(dnf, [](const Conjunct& c) {
      std::map<std::string, std::string> seen;
      for (const auto& l : c)
        if (l.kind == Literal::Kind::condition) {
          auto [it, inserted] = seen.emplace(l.name, l.value);
          if (!inserted && it->second != l.value) return true;
        }
      return false;
    });
    for (const auto& c : dnf)
      for (const auto& l : c)
        if (l.kind == Literal::Kind::condition) used_vars.insert(l.name);
    stage.guards = render_sentries(net, t, dnf);
    if (stage.guards.empty()) result.warnings.push_back("stage '" + name + "' can never open");
    stage.milestone.name = milestone_name(name);
    stage.milestone.achieving.event = SentryEvent{SentryEventKind::task_executed, name};
    stage.milestone.invalidating.event = SentryEvent{SentryEventKind::stage_opened, name};
    model.stages.push_back(std::move(stage));
  }
  for (const auto& v : conds.variables())
    if (used_vars.contains(v.name)) model.variables.push_back(v);
  auto d = validate(model);
  if (!d.ok) throw TranslationError("generated model is invalid: " + d.messages.front());
  return result;
}

std::string guard_table(const GsmModel& model) {
  std::size_t width = 5;
  for (const auto& s : model.stages) width = std::max(width, s.name.size());
  std::ostringstream out;
  auto row = [&](const std::string& a, const std::string& b) {
    out << a << std::string(width - a.size() + 2, ' ') << b << "\n";
  };
  row("Stage", "Guard");
  for (const auto& s : model.stages)
    for (const auto& g : s.guards) row(s.name, to_string(g));
  return out.str();
}

EquivalenceReport check_equivalence(const PetriNet& net, const BranchConditions& conds, const GsmModel& model,
                                    std::size_t max_len) {
  EquivalenceReport r;
  auto vars = conds.variables();
  std::vector<Valuation> valuations{{}};
  for (const auto& v : vars) {
    std::vector<Valuation> next;
    for (const auto& base : valuations)
      for (const auto& val : v.domain) {
        auto x = base;
        x[v.name] = val;
        next.push_back(std::move(x));
      }
    valuations = std::move(next);
  }
  r.valuations = valuations.size();
  for (const auto& val : valuations) {
    auto allow = [&](std::size_t t) {
      for (auto p : net.pre[t])
        if (auto c = conds.find(net.places[p], net.transitions[t].name)) {
          auto it = val.find(c->variable);
          if (it == val.end() || it->second != c->value) return false;
        }
      return true;
    };
    auto pn = visible_language(net, max_len, allow);
    auto gsm = gsm_language(model, max_len, val);
    r.traces_compared += pn.size();
    if (pn == gsm) continue;
    r.equivalent = false;
    std::string where;
    for (const auto& [k, v] : val) where += (where.empty() ? "" : ", ") + k + "=" + v;
    auto describe = [](const Trace& t) {
      std::string s = "<";
      for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + t[i];
      return s + ">";
    };
    for (const auto& t : pn)
      if (!gsm.contains(t)) {
        r.witness = "[" + where + "] net trace " + describe(t) + " missing from the GSM language";
        return r;
      }
    for (const auto& t : gsm)
      if (!pn.contains(t)) {
        r.witness = "[" + where + "] GSM trace " + describe(t) + " missing from the net language";
        return r;
      }
  }
  return r;
}

}  // namespace artimine
