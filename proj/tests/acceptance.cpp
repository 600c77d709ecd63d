// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.
#include <chrono>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "artimine/artifact_view.hpp"
#include "artimine/error.hpp"
#include "artimine/miner.hpp"
#include "artimine/net_generator.hpp"
#include "artimine/net_io.hpp"
#include "artimine/pipeline.hpp"
#include "artimine/pn2gsm.hpp"
#include "artimine/schema.hpp"
#include "oracles.hpp"

using namespace artimine;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct WorkedExample {
  PipelineConfig config;
  Database db;
  ErModel er;
};

WorkedExample worked_example() {
  WorkedExample w;
  w.config = load_config(oracle::data_path("build_to_order.json"));
  w.db = tabulate(parse_native_log(read_file(w.config.log)));
  w.er = build_er_model(w.db, w.config.discovery);
  return w;
}

std::string ts(const Stamp& s) { return to_string(s.time); }

Outcome criterion1() {
  Outcome o;
  auto start = Clock::now();
  auto w = worked_example();
  auto secs = seconds_since(start);
  const auto& er = w.er;
  if (er.entities.size() != 2) o.fail(std::to_string(er.entities.size()) + " entities");
  std::map<std::string, AttributeSet> expect{{"PurchaseOrder", {"POrderID"}}, {"MaterialOrder", {"MOrderID"}}};
  for (const auto& [name, key] : expect) {
    auto it = std::find_if(er.entities.begin(), er.entities.end(), [&](const Entity& e) { return e.name == name; });
    if (it == er.entities.end()) o.fail("no entity " + name);
    else if (it->identifier != key) o.fail(name + " has identifier " + identifier_label(it->identifier));
  }
  if (er.foreign_keys.size() != 1) {
    o.fail(std::to_string(er.foreign_keys.size()) + " foreign keys");
  } else {
    const auto& fk = er.foreign_keys.front();
    if (fk.from_entity != "MaterialOrder" || fk.from_attrs != std::vector<std::string>{"POrderID"} ||
        fk.to_entity != "PurchaseOrder" || fk.to_attrs != std::vector<std::string>{"POrderID"})
      o.fail("unexpected foreign key " + fk.from_entity + " -> " + fk.to_entity);
    // many MaterialOrder rows per PurchaseOrder: PurchaseOrder is the 1 side
    if (fk.multiplicity != Multiplicity::many_to_one) o.fail("multiplicity " + to_string(fk.multiplicity));
  }
  if (er.top_level != std::set<std::string>{"PurchaseOrder"}) o.fail("unexpected top-level set");
  if (secs >= 1.0) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = "2 entities, MaterialOrder.POrderID -> PurchaseOrder.POrderID (PurchaseOrder 1 : n MaterialOrder), top-level {PurchaseOrder}";
  return o;
}

Outcome criterion2() {
  Outcome o;
  auto w = worked_example();
  auto t = merge_entity_table(w.db, w.er.entity("PurchaseOrder"));
  std::vector<std::vector<std::string>> golden{
      {"POrderID", "ReceivePO", "ShipPO", "InvoicePO", "ClosePO"},
      {"1", "11-24,17:12", "11-25,12:11", "11-26,09:30", "12-03,14:34"},
      {"2", "11-25,08:53", "12-06,09:34", "12-06,07:25", "12-13,04:30"},
      {"3", "12-04,15:02", "12-13,08:38", "12-13,08:37", "12-13,08:39"},
  };
  std::vector<std::vector<std::string>> got{{}};
  for (const auto& c : t.columns) got[0].push_back(c.name);
  for (const auto& r : t.rows) {
    got.emplace_back();
    for (const auto& c : r) got.back().push_back(cell_text(c));
  }
  if (got != golden) {
    std::ostringstream s;
    for (const auto& r : got) {
      for (const auto& c : r) s << c << " | ";
      s << "/ ";
    }
    o.fail("table differs: " + s.str());
  } else {
    o.detail = "3 rows x 5 columns, cell-for-cell";
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  auto w = worked_example();
  auto db = entity_database(w.er);
  auto view = build_view(w.er, db, w.config.view);
  const auto& artifact = view.artifacts.at(0);
  const auto& specs = view.specs.at(artifact.name);
  auto spec = std::find_if(specs.begin(), specs.end(), [](const ExtractionSpec& s) { return s.event_type == "ReceiveMO"; });
  if (spec == specs.end()) {
    o.fail("no ReceiveMO extraction");
    return o;
  }
  auto events = extract_events(db, artifact, *spec);
  if (events.size() != 6) o.fail(std::to_string(events.size()) + " ReceiveMO events");
  std::vector<std::pair<std::string, std::string>> first3{{"1", "11-24,19:56"}, {"2", "11-28,08:12"}, {"2", "12-03,14:54"}};
  for (std::size_t i = 0; i < 3 && i < events.size(); ++i)
    if (events[i].id != std::vector<std::string>{first3[i].first} || ts(events[i].stamp) != first3[i].second)
      o.fail("ReceiveMO event " + std::to_string(i + 1) + " is (" + events[i].id.at(0) + ", " + ts(events[i].stamp) + ")");
  auto logs = extract_logs(db, view);
  auto total = logs.at(0).event_count();
  auto lines = oracle::count_log_lines(oracle::data_path("build_to_order.log"));
  if (logs.at(0).cases.size() != 3) o.fail(std::to_string(logs.at(0).cases.size()) + " cases");
  if (total != lines) o.fail(std::to_string(total) + " events for " + std::to_string(lines) + " log lines");
  if (o.pass)
    o.detail = "6 ReceiveMO events, first three as in the worked example; 3 cases, " + std::to_string(total) +
               " events = one per log line (" + std::to_string(lines) + ")";
  return o;
}

using GuardKey = std::pair<std::string, std::set<std::string>>;

GuardKey guard_key(const Sentry& s) {
  GuardKey k{s.event ? to_string(*s.event) : "", {}};
  if (s.condition)
    if (auto atoms = conjunct_atoms(*s.condition))
      for (const auto& a : *atoms) k.second.insert(to_string(a));
  return k;
}

Outcome criterion4() {
  Outcome o;
  auto net = net_from_json(nlohmann::json::parse(read_file(oracle::data_path("material_order_net.json"))));
  auto conds = branch_conditions_from_json(nlohmann::json::parse(read_file(oracle::data_path("material_order_conditions.json"))));
  auto model = translate(net, conds).model;
  std::vector<std::pair<std::string, std::string>> reference_guards{
      {"CreateMO", "onCreate()"},
      {"ReceiveMO", "on CreateMOMilestoneAchieved()"},
      {"ReceiveSupplResponse", "on ReceiveMOMilestoneAchieved()"},
      {"ReassignSupplier", "on ReceiveSupplResponseMilestoneAchieved() if answer = reject"},
      {"InvoiceMO", "on ReceiveSupplResponseMilestoneAchieved() if answer = accept"},
      {"ReceiveItems", "on ReceiveSupplResponseMilestoneAchieved() if answer = accept"},
      {"AssembleMO", "on ReceiveItemsMilestoneAchieved() if quality = acceptable"},
      {"CompleteMO",
       "if InvoiceMOMilestone.hasBeenAchieved = true and AssembleMOMilestone.hasBeenAchieved = true"
       " and InvoiceMOMilestone.lastToggled > CompleteMOMilestone.lastToggled"
       " and AssembleMOMilestone.lastToggled > CompleteMOMilestone.lastToggled"},
      {"CompleteMO",
       "if InvoiceMOMilestone.hasBeenAchieved = true and ReceiveItemsMilestone.hasBeenAchieved = true"
       " and InvoiceMOMilestone.lastToggled > CompleteMOMilestone.lastToggled"
       " and ReceiveItemsMilestone.lastToggled > CompleteMOMilestone.lastToggled"
       " and ReceiveItemsMilestone.lastToggled > AssembleMOMilestone.lastToggled and quality = notacceptable"},
      {"CloseMO", "on CompleteMOMilestoneAchieved()"},
      {"CloseMO", "on ReassignSupplierMilestoneAchieved()"},
  };
  std::vector<std::pair<std::string, GuardKey>> got, want;
  for (const auto& s : model.stages)
    for (const auto& g : s.guards) got.emplace_back(s.name, guard_key(g));
  for (const auto& [stage, text] : reference_guards) want.emplace_back(stage, guard_key(parse_sentry(text)));
  if (model.stages.size() != 9) o.fail(std::to_string(model.stages.size()) + " stages");
  if (got.size() != want.size()) o.fail(std::to_string(got.size()) + " guard rows");
  for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i)
    if (got[i] != want[i]) o.fail("row " + std::to_string(i + 1) + " (" + got[i].first + ") differs");
  if (o.pass) o.detail = "9 stages, 11 guard rows equal to the reference table";
  return o;
}

// net traces by the oracle token game with the branch variables fixed
bool languages_agree(const PetriNet& net, const BranchConditions& conds, const GsmModel& model, std::size_t max_len,
                     std::size_t& valuations, std::string& witness) {
  std::vector<Valuation> vals{{}};
  for (const auto& v : conds.variables()) {
    std::vector<Valuation> next;
    for (const auto& base : vals)
      for (const auto& x : v.domain) {
        auto b = base;
        b[v.name] = x;
        next.push_back(b);
      }
    vals = next;
  }
  for (const auto& val : vals) {
    ++valuations;
    auto allow = [&](std::size_t t) {
      for (const auto& a : conds.arcs)
        if (a.transition == net.transitions[t].name && val.at(a.variable) != a.value) return false;
      return true;
    };
    auto pn = oracle::token_game(net, max_len, false, allow);
    auto gsm = gsm_language(model, max_len, val);
    if (pn != gsm) {
      witness = std::to_string(pn.size()) + " net traces vs " + std::to_string(gsm.size()) + " GSM traces";
      return false;
    }
  }
  return true;
}

Outcome criterion5() {
  Outcome o;
  auto start = Clock::now();
  auto net = net_from_json(nlohmann::json::parse(read_file(oracle::data_path("material_order_net.json"))));
  auto conds = branch_conditions_from_json(nlohmann::json::parse(read_file(oracle::data_path("material_order_conditions.json"))));
  std::size_t vals = 0;
  std::string witness;
  if (!languages_agree(net, conds, translate(net, conds).model, 10, vals, witness)) o.fail("reference net: " + witness);
  if (vals != 4) o.fail(std::to_string(vals) + " valuations for the reference net");
  std::size_t generated = 0;
  for (std::uint64_t seed = 1; generated < 20; ++seed) {
    auto g = random_workflow_net(seed);
    if (oracle::soundness(g.net) != oracle::Verdict::sound || !oracle::free_choice(g.net) || !oracle::workflow(g.net)) {
      o.fail("generator produced an unsuitable net for seed " + std::to_string(seed));
      break;
    }
    ++generated;
    std::size_t v = 0;
    if (!languages_agree(g.net, g.conditions, translate(g.net, g.conditions).model, 10, v, witness))
      o.fail("seed " + std::to_string(seed) + ": " + witness);
  }
  auto secs = seconds_since(start);
  if (secs >= 60) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass)
    o.detail = "reference net over 4 valuations and 20 generated nets agree up to length 10 (" +
               std::to_string(secs) + " s)";
  return o;
}

Outcome criterion6() {
  Outcome o;
  auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 200; ++i) {
    auto t = oracle::random_table(rng);
    if (discover_keys(t, 8) != oracle::brute_force_keys(t, 8)) o.fail("table " + std::to_string(i) + " differs");
  }
  auto secs = seconds_since(start);
  if (secs >= 30) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = "200 random tables match exhaustive subset search (" + std::to_string(secs) + " s)";
  return o;
}

Outcome criterion7() {
  Outcome o;
  auto start = Clock::now();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto tree = oracle::random_tree(rng, 12);
    if (!oracle::truth_table_equal(tree, to_dnf(tree))) o.fail("tree " + to_string(tree));
  }
  auto secs = seconds_since(start);
  if (secs >= 30) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = "200 random trees truth-table equivalent (" + std::to_string(secs) + " s)";
  return o;
}

Outcome criterion8() {
  Outcome o;
  auto start = Clock::now();
  GeneratorOptions opts;
  opts.tau_free = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto g = random_workflow_net(seed, opts);
    if (g.net.transitions.size() > 8) o.fail("seed " + std::to_string(seed) + " has too many transitions");
    for (const auto& t : g.net.transitions)
      if (!t.visible) o.fail("seed " + std::to_string(seed) + " has a silent transition");
    auto all = oracle::token_game(g.net, g.net.transitions.size(), true);
    std::vector<Trace> log(all.begin(), all.end());
    auto mined = mine_lifecycle(log);
    auto f = replay_fitness(mined, log);
    if (f != 1.0) o.fail("seed " + std::to_string(seed) + ": fitness " + std::to_string(f));
  }
  auto secs = seconds_since(start);
  if (secs >= 60) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = "20 nets, fitness 1.0 each (" + std::to_string(secs) + " s)";
  return o;
}

std::vector<std::pair<std::string, PetriNet>> fixture_nets() {
  std::vector<std::pair<std::string, PetriNet>> out;
  out.emplace_back("material order", net_from_json(nlohmann::json::parse(read_file(oracle::data_path("material_order_net.json")))));
  for (const char* f : {"unsound_deadlock.json", "unsound_improper.json", "unsound_dead.json", "not_free_choice.json",
                        "not_workflow.json", "unbounded.json", "wide_parallel.json"})
    out.emplace_back(f, net_from_json(nlohmann::json::parse(read_file(oracle::data_path(std::string("nets/") + f)))));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) out.emplace_back("random " + std::to_string(seed), random_workflow_net(seed).net);
  return out;
}

Outcome criterion9() {
  Outcome o;
  std::size_t compared = 0;
  bool reference_ok = false;
  for (const auto& [name, net] : fixture_nets()) {
    bool wf = oracle::workflow(net), fc = oracle::free_choice(net);
    if (is_workflow_net(net).ok != wf) o.fail(name + ": workflow verdict");
    if (is_free_choice(net).ok != fc) o.fail(name + ": free-choice verdict");
    if (!wf) continue;
    auto truth = oracle::soundness(net, 10000);
    auto got = is_sound(net, 10000).verdict;
    if (truth == oracle::Verdict::too_big) {
      if (got != Soundness::inconclusive) o.fail(name + ": expected inconclusive");
      continue;
    }
    ++compared;
    if ((got == Soundness::sound) != (truth == oracle::Verdict::sound)) o.fail(name + ": soundness verdict");
    if (name == "material order") reference_ok = wf && fc && got == Soundness::sound;
  }
  if (!reference_ok) o.fail("reference net not judged sound, free-choice workflow");
  if (o.pass) o.detail = std::to_string(compared) + " nets agree with brute-force reachability; reference net sound, free-choice, workflow";
  return o;
}

}  // namespace

int main() {
  std::vector<Outcome (*)()> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                      criterion6, criterion7, criterion8, criterion9};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    all = all && o.pass;
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
