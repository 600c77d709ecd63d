#include "artimine/gsm.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "artimine/error.hpp"

namespace artimine {

using nlohmann::json;
using nlohmann::ordered_json;

std::string milestone_name(const std::string& stage) { return stage + "Milestone"; }

const Stage* GsmModel::stage(const std::string& name) const {
  for (const auto& s : stages)
    if (s.name == name) return &s;
  return nullptr;
}

namespace {

void check_condition(const GsmModel& model, const Condition& c, const std::string& where,
                     const std::set<std::string>& milestones, Diagnostics& d) {
  if (c.op != Condition::Op::atom) {
    if (c.children.empty()) d.messages.push_back(where + ": empty " + (c.op == Condition::Op::all ? "and" : "or"));
    for (const auto& ch : c.children) check_condition(model, ch, where, milestones, d);
    return;
  }
  const auto& a = c.atom;
  switch (a.kind) {
    case AtomKind::achieved:
      if (!milestones.contains(a.first)) d.messages.push_back(where + ": unknown milestone '" + a.first + "'");
      break;
    case AtomKind::toggled_after:
      for (const auto& m : {a.first, a.second})
        if (!milestones.contains(m)) d.messages.push_back(where + ": unknown milestone '" + m + "'");
      break;
    case AtomKind::equals: {
      auto v = std::find_if(model.variables.begin(), model.variables.end(), [&](const auto& x) { return x.name == a.first; });
      if (v == model.variables.end()) d.messages.push_back(where + ": undeclared variable '" + a.first + "'");
      else if (std::find(v->domain.begin(), v->domain.end(), a.second) == v->domain.end())
        d.messages.push_back(where + ": value '" + a.second + "' outside the domain of '" + a.first + "'");
      break;
    }
  }
}

void check_sentry(const GsmModel& model, const Sentry& s, const std::string& where,
                  const std::set<std::string>& milestones, Diagnostics& d) {
  if (!s.event && !s.condition) d.messages.push_back(where + ": sentry has neither event nor condition");
  if (s.event) {
    const auto& e = *s.event;
    if (e.kind == SentryEventKind::milestone_achieved && !milestones.contains(e.subject))
      d.messages.push_back(where + ": unknown milestone '" + e.subject + "'");
    if ((e.kind == SentryEventKind::task_executed || e.kind == SentryEventKind::stage_opened) && !model.stage(e.subject))
      d.messages.push_back(where + ": unknown stage '" + e.subject + "'");
  }
  if (s.condition) check_condition(model, *s.condition, where, milestones, d);
}

}  // namespace

Diagnostics validate(const GsmModel& model) {
  Diagnostics d;
  std::set<std::string> stages, milestones{kInitMilestone};
  for (const auto& s : model.stages) {
    if (s.name.empty()) d.messages.push_back("stage without a name");
    if (!stages.insert(s.name).second) d.messages.push_back("duplicate stage '" + s.name + "'");
    if (!milestones.insert(s.milestone.name).second) d.messages.push_back("duplicate milestone '" + s.milestone.name + "'");
  }
  std::set<std::string> vars;
  for (const auto& v : model.variables) {
    if (!vars.insert(v.name).second) d.messages.push_back("duplicate variable '" + v.name + "'");
    if (v.domain.empty()) d.messages.push_back("variable '" + v.name + "' has an empty domain");
  }
  for (const auto& s : model.stages) {
    if (s.guards.empty()) d.messages.push_back("stage '" + s.name + "' has no guard");
    for (std::size_t g = 0; g < s.guards.size(); ++g)
      check_sentry(model, s.guards[g], "stage '" + s.name + "' guard " + std::to_string(g + 1), milestones, d);
    check_sentry(model, s.milestone.achieving, "milestone '" + s.milestone.name + "' achieving sentry", milestones, d);
    if (s.milestone.invalidating.event || s.milestone.invalidating.condition)
      check_sentry(model, s.milestone.invalidating, "milestone '" + s.milestone.name + "' invalidating sentry", milestones, d);
  }
  d.ok = d.messages.empty();
  return d;
}

Diagnostics validate_json(const json& j) {
  try {
    return validate(gsm_model_from_json(j));
  } catch (const Error& e) {
    return {false, {e.what()}};
  }
}

GsmState initial_state(const GsmModel& model) {
  GsmState s;
  s.open.assign(model.stages.size(), 0);
  s.achieved.assign(model.stages.size() + 1, 0);
  s.last_toggled.assign(model.stages.size() + 1, 0);
  s.vars.assign(model.variables.size(), std::nullopt);
  return s;
}

std::string to_string(const GsmEvent& e) {
  switch (e.kind) {
    case GsmEvent::Kind::create: return "onCreate()";
    case GsmEvent::Kind::task_executed: return e.subject + "TaskExecuted()";
    case GsmEvent::Kind::milestone_achieved: return e.subject + "Achieved()";
    case GsmEvent::Kind::stage_opened: return e.subject + "Opened()";
    case GsmEvent::Kind::assign: return e.subject + " := " + e.value;
  }
  return "";
}

namespace {

// Index-based form of a model used by the interpreter.
struct Compiled {
  struct CAtom {
    AtomKind kind;
    int a = -1, b = -1;  // milestone or variable index
    std::string value;
    bool negated = false;
  };
  struct CCond {
    Condition::Op op = Condition::Op::atom;
    CAtom atom{};
    std::vector<CCond> children;
  };
  struct CEvent {
    GsmEvent::Kind kind;
    int subject = -1;
  };
  struct CSentry {
    std::optional<CEvent> event;
    std::optional<CCond> cond;
  };

  const GsmModel* model = nullptr;
  std::vector<std::vector<CSentry>> guards;
  std::vector<CSentry> achieving, invalidating;
  std::vector<bool> has_invalidating;
  std::vector<std::size_t> order;  // stages by name
  std::map<std::string, int> stage_ix, milestone_ix, var_ix;

  explicit Compiled(const GsmModel& m) : model(&m) {
    auto d = validate(m);
    if (!d.ok) throw ValidationError("invalid GSM model: " + d.messages.front());
    const int S = static_cast<int>(m.stages.size());
    for (int i = 0; i < S; ++i) {
      stage_ix[m.stages[i].name] = i;
      milestone_ix[m.stages[i].milestone.name] = i;
    }
    milestone_ix[kInitMilestone] = S;
    for (std::size_t v = 0; v < m.variables.size(); ++v) var_ix[m.variables[v].name] = static_cast<int>(v);
    order.resize(m.stages.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return m.stages[x].name < m.stages[y].name; });
    for (const auto& s : m.stages) {
      std::vector<CSentry> g;
      for (const auto& x : s.guards) g.push_back(compile(x));
      guards.push_back(std::move(g));
      achieving.push_back(compile(s.milestone.achieving));
      has_invalidating.push_back(s.milestone.invalidating.event || s.milestone.invalidating.condition);
      invalidating.push_back(compile(s.milestone.invalidating));
    }
  }

  CCond compile(const Condition& c) const {
    CCond out;
    out.op = c.op;
    for (const auto& ch : c.children) out.children.push_back(compile(ch));
    if (c.op == Condition::Op::atom) {
      out.atom.kind = c.atom.kind;
      out.atom.negated = c.atom.negated;
      if (c.atom.kind == AtomKind::equals) {
        out.atom.a = var_ix.at(c.atom.first);
        out.atom.value = c.atom.second;
      } else {
        out.atom.a = milestone_ix.at(c.atom.first);
        if (c.atom.kind == AtomKind::toggled_after) out.atom.b = milestone_ix.at(c.atom.second);
      }
    }
    return out;
  }

  CSentry compile(const Sentry& s) const {
    CSentry out;
    if (s.event) {
      const auto& e = *s.event;
      switch (e.kind) {
        case SentryEventKind::on_create: out.event = CEvent{GsmEvent::Kind::create, -1}; break;
        case SentryEventKind::milestone_achieved:
          out.event = CEvent{GsmEvent::Kind::milestone_achieved, milestone_ix.at(e.subject)};
          break;
        case SentryEventKind::task_executed: out.event = CEvent{GsmEvent::Kind::task_executed, stage_ix.at(e.subject)}; break;
        case SentryEventKind::stage_opened: out.event = CEvent{GsmEvent::Kind::stage_opened, stage_ix.at(e.subject)}; break;
      }
    }
    if (s.condition) out.cond = compile(*s.condition);
    return out;
  }

  static bool eval(const CCond& c, const GsmState& st) {
    switch (c.op) {
      case Condition::Op::all:
        return std::all_of(c.children.begin(), c.children.end(), [&](const CCond& x) { return eval(x, st); });
      case Condition::Op::any:
        return std::any_of(c.children.begin(), c.children.end(), [&](const CCond& x) { return eval(x, st); });
      case Condition::Op::atom: break;
    }
    const auto& a = c.atom;
    bool r = false;
    switch (a.kind) {
      case AtomKind::achieved: r = st.achieved[a.a] != 0; break;
      case AtomKind::toggled_after: r = st.last_toggled[a.a] > st.last_toggled[a.b]; return r;
      case AtomKind::equals:
        if (!st.vars[a.a]) return false;  // unset variables satisfy nothing
        r = *st.vars[a.a] == a.value;
        break;
    }
    return a.negated ? !r : r;
  }

  static bool holds(const CSentry& s, const CEvent& e, const GsmState& st) {
    if (s.event && (s.event->kind != e.kind || s.event->subject != e.subject)) return false;
    return !s.cond || eval(*s.cond, st);
  }
};

GsmEvent public_event(const Compiled& c, const Compiled::CEvent& e) {
  const auto& m = *c.model;
  switch (e.kind) {
    case GsmEvent::Kind::milestone_achieved:
      return {e.kind, e.subject == static_cast<int>(m.stages.size()) ? kInitMilestone : m.stages[e.subject].milestone.name, ""};
    case GsmEvent::Kind::task_executed:
    case GsmEvent::Kind::stage_opened: return {e.kind, m.stages[e.subject].name, ""};
    default: return {e.kind, "", ""};
  }
}

struct Runner {
  const Compiled& c;
  ExecutionMode mode;
  std::size_t cap;
  StepResult* trace = nullptr;  // optional event recording

  void tick(GsmState& st, std::size_t m) const { st.last_toggled[m] = ++st.clock; }

  void run(GsmState& st, const Compiled::CEvent& first) const {
    std::deque<Compiled::CEvent> queue{first};
    std::size_t steps = 0;
    const auto& stages = c.model->stages;
    while (!queue.empty()) {
      if (++steps > cap)
        throw DivergenceError("GSM cascade exceeded " + std::to_string(cap) + " micro-steps");
      auto ev = queue.front();
      queue.pop_front();
      if (trace && steps > 1) trace->emitted.push_back(public_event(c, ev));
      if (ev.kind == GsmEvent::Kind::task_executed && trace) trace->executed.push_back(stages[ev.subject].task);

      const GsmState snap = st;
      for (auto i : c.order)
        if (snap.open[i] && !snap.achieved[i] && Compiled::holds(c.achieving[i], ev, snap)) {
          st.achieved[i] = 1;
          tick(st, i);
          st.open[i] = 0;
          queue.push_back({GsmEvent::Kind::milestone_achieved, static_cast<int>(i)});
        }
      for (auto i : c.order)
        if (c.has_invalidating[i] && snap.achieved[i] && st.achieved[i] &&
            Compiled::holds(c.invalidating[i], ev, snap)) {
          st.achieved[i] = 0;
          tick(st, i);
        }
      for (auto i : c.order) {
        if (snap.open[i] || st.open[i]) continue;
        bool fire = std::any_of(c.guards[i].begin(), c.guards[i].end(),
                                [&](const auto& g) { return Compiled::holds(g, ev, snap); });
        if (!fire) continue;
        st.open[i] = 1;
        Compiled::CEvent opened{GsmEvent::Kind::stage_opened, static_cast<int>(i)};
        // the stage's own invalidation happens at opening time
        for (auto j : c.order)
          if (c.has_invalidating[j] && st.achieved[j] && Compiled::holds(c.invalidating[j], opened, st)) {
            st.achieved[j] = 0;
            tick(st, j);
          }
        queue.push_back(opened);
        if (mode == ExecutionMode::immediate) queue.push_back({GsmEvent::Kind::task_executed, static_cast<int>(i)});
      }
    }
  }

  GsmState step(const GsmState& in, const GsmEvent& e) const {
    GsmState st = in;
    const auto& stages = c.model->stages;
    Compiled::CEvent ce{e.kind, -1};
    switch (e.kind) {
      case GsmEvent::Kind::create: {
        if (st.created) throw NotEnabledError("instance already created");
        st.created = true;
        auto init = stages.size();
        st.achieved[init] = 1;
        tick(st, init);
        break;
      }
      case GsmEvent::Kind::task_executed: {
        auto it = c.stage_ix.find(e.subject);
        if (it == c.stage_ix.end()) throw ValidationError("unknown stage '" + e.subject + "'");
        if (!st.open[it->second]) throw NotEnabledError("stage '" + e.subject + "' is not open");
        ce.subject = it->second;
        break;
      }
      case GsmEvent::Kind::milestone_achieved: {
        auto it = c.milestone_ix.find(e.subject);
        if (it == c.milestone_ix.end()) throw ValidationError("unknown milestone '" + e.subject + "'");
        ce.subject = it->second;
        break;
      }
      case GsmEvent::Kind::stage_opened: {
        auto it = c.stage_ix.find(e.subject);
        if (it == c.stage_ix.end()) throw ValidationError("unknown stage '" + e.subject + "'");
        ce.subject = it->second;
        break;
      }
      case GsmEvent::Kind::assign: {
        auto it = c.var_ix.find(e.subject);
        if (it == c.var_ix.end()) throw ValidationError("unknown variable '" + e.subject + "'");
        st.vars[it->second] = e.value;
        break;
      }
    }
    run(st, ce);
    return st;
  }
};

}  // namespace

StepResult gsm_step(const GsmModel& model, const GsmState& state, const GsmEvent& event, ExecutionMode mode,
                    std::size_t max_micro_steps) {
  Compiled c(model);
  StepResult r;
  Runner runner{c, mode, max_micro_steps, &r};
  r.state = runner.step(state, event);
  return r;
}

std::set<Trace> gsm_language(const GsmModel& model, std::size_t max_len, const std::optional<Valuation>& fixed) {
  Compiled c(model);
  Runner runner{c, ExecutionMode::deferred, 10000, nullptr};

  // every full assignment over the declared domains
  std::vector<std::vector<std::optional<std::string>>> assignments;
  if (fixed) {
    std::vector<std::optional<std::string>> a(model.variables.size());
    for (const auto& [k, v] : *fixed)
      if (auto it = c.var_ix.find(k); it != c.var_ix.end()) a[it->second] = v;
    assignments.push_back(std::move(a));
  } else {
    assignments.emplace_back(model.variables.size());
    for (std::size_t v = 0; v < model.variables.size(); ++v) {
      std::vector<std::vector<std::optional<std::string>>> next;
      for (const auto& a : assignments)
        for (const auto& val : model.variables[v].domain) {
          auto b = a;
          b[v] = val;
          next.push_back(std::move(b));
        }
      assignments = std::move(next);
    }
  }

  std::set<Trace> out;
  std::set<std::pair<GsmState, Trace>> seen;
  std::vector<std::pair<GsmState, Trace>> stack;
  for (const auto& a : assignments) {
    GsmState st = initial_state(model);
    st.vars = a;
    st = runner.step(st, {GsmEvent::Kind::create, "", ""});
    if (seen.insert({st, {}}).second) stack.push_back({st, {}});
  }
  while (!stack.empty()) {
    auto [st, trace] = std::move(stack.back());
    stack.pop_back();
    out.insert(trace);
    if (trace.size() >= max_len) continue;
    for (auto i : c.order) {
      if (!st.open[i]) continue;
      const auto& choices = fixed ? std::vector<std::vector<std::optional<std::string>>>{st.vars} : assignments;
      for (const auto& a : choices) {
        GsmState pre = st;
        pre.vars = a;
        auto next = runner.step(pre, {GsmEvent::Kind::task_executed, model.stages[i].name, ""});
        Trace t = trace;
        t.push_back(model.stages[i].task);
        if (seen.insert({next, t}).second) stack.push_back({std::move(next), std::move(t)});
      }
    }
  }
  return out;
}

ordered_json to_json(const GsmModel& model) {
  ordered_json j;
  j["artifact"] = model.artifact;
  j["variables"] = ordered_json::array();
  for (const auto& v : model.variables) j["variables"].push_back({{"name", v.name}, {"domain", v.domain}});
  j["stages"] = ordered_json::array();
  for (const auto& s : model.stages) {
    ordered_json guards = ordered_json::array();
    for (const auto& g : s.guards) guards.push_back(to_string(g));
    ordered_json m{{"name", s.milestone.name}, {"achieving", to_string(s.milestone.achieving)}};
    if (s.milestone.invalidating.event || s.milestone.invalidating.condition)
      m["invalidating"] = to_string(s.milestone.invalidating);
    j["stages"].push_back({{"name", s.name}, {"task", s.task}, {"guards", guards}, {"milestone", m}});
  }
  return j;
}

GsmModel gsm_model_from_json(const json& j) {
  GsmModel m;
  try {
    m.artifact = j.value("artifact", std::string{});
    if (j.contains("variables"))
      for (const auto& v : j.at("variables"))
        m.variables.push_back({v.at("name").get<std::string>(), v.at("domain").get<std::vector<std::string>>()});
    for (const auto& s : j.at("stages")) {
      Stage st;
      st.name = s.at("name").get<std::string>();
      st.task = s.value("task", st.name);
      for (const auto& g : s.at("guards")) st.guards.push_back(parse_sentry(g.get<std::string>()));
      const auto& ms = s.at("milestone");
      st.milestone.name = ms.value("name", milestone_name(st.name));
      st.milestone.achieving = parse_sentry(ms.at("achieving").get<std::string>());
      if (ms.contains("invalidating")) st.milestone.invalidating = parse_sentry(ms.at("invalidating").get<std::string>());
      m.stages.push_back(std::move(st));
    }
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("GSM JSON: ") + e.what());
  }
  return m;
}

std::string to_dot(const GsmModel& model) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"' || ch == '\\') out.push_back('\\');
      out.push_back(ch);
    }
    return out + "\"";
  };
  std::ostringstream out;
  out << "digraph gsm {\n  rankdir=LR;\n  compound=true;\n";
  std::map<std::string, std::string> milestone_node;
  for (std::size_t i = 0; i < model.stages.size(); ++i)
    milestone_node[model.stages[i].milestone.name] = "m" + std::to_string(i);
  for (std::size_t i = 0; i < model.stages.size(); ++i) {
    const auto& s = model.stages[i];
    out << "  subgraph cluster_" << i << " {\n    label=" << quote(s.name) << ";\n    style=rounded;\n";
    for (std::size_t g = 0; g < s.guards.size(); ++g)
      out << "    g" << i << "_" << g << " [shape=diamond,label=\"\",tooltip=" << quote(to_string(s.guards[g])) << "];\n";
    out << "    m" << i << " [shape=circle,label=\"\",tooltip=" << quote(s.milestone.name) << "];\n  }\n";
  }
  for (std::size_t i = 0; i < model.stages.size(); ++i)
    for (std::size_t g = 0; g < model.stages[i].guards.size(); ++g) {
      const auto& sentry = model.stages[i].guards[g];
      std::set<std::string> refs;
      if (sentry.event && sentry.event->kind == SentryEventKind::milestone_achieved) refs.insert(sentry.event->subject);
      if (sentry.condition) {
        std::vector<const Condition*> todo{&*sentry.condition};
        while (!todo.empty()) {
          auto c = todo.back();
          todo.pop_back();
          for (const auto& ch : c->children) todo.push_back(&ch);
          if (c->op == Condition::Op::atom && c->atom.kind == AtomKind::achieved) refs.insert(c->atom.first);
        }
      }
      for (const auto& r : refs)
        if (auto it = milestone_node.find(r); it != milestone_node.end())
          out << "  " << it->second << " -> g" << i << "_" << g << " [style=dotted];\n";
    }
  out << "}\n";
  return out.str();
}

}  // namespace artimine
