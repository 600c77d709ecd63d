#include <gtest/gtest.h>

#include "artimine/error.hpp"
#include "artimine/miner.hpp"
#include "artimine/net_generator.hpp"
#include "artimine/net_io.hpp"
#include "artimine/pipeline.hpp"
#include "oracles.hpp"

using namespace artimine;

namespace {

PetriNet load(const std::string& name) { return read_net(read_file(oracle::data_path(name))); }

PetriNet chain(std::vector<std::string> labels) {
  PetriNet n;
  auto p = n.add_place("i");
  for (std::size_t k = 0; k < labels.size(); ++k) {
    auto t = n.add_transition(labels[k]);
    auto q = n.add_place(k + 1 == labels.size() ? "o" : "p" + std::to_string(k));
    n.add_arc_pt(p, t);
    n.add_arc_tp(t, q);
    p = q;
  }
  return n;
}

}  // namespace

TEST(Net, FiringRule) {
  auto n = chain({"a", "b"});
  auto m = initial_marking(n);
  EXPECT_EQ(enabled_transitions(n, m), std::vector<std::size_t>{0});
  EXPECT_THROW(fire(n, m, 1), NotEnabledError);
  m = fire(n, fire(n, m, 0), 1);
  EXPECT_EQ(m, final_marking(n));
  EXPECT_EQ(unfire(n, m, 1), fire(n, initial_marking(n), 0));
}

TEST(Net, ReferenceNetStructure) {
  auto n = load("material_order_net.json");
  EXPECT_TRUE(is_workflow_net(n).ok);
  EXPECT_TRUE(is_free_choice(n).ok);
  EXPECT_EQ(is_sound(n).verdict, Soundness::sound);
  EXPECT_TRUE(tau_cycle(n).empty());
}

TEST(Net, FixtureVerdictsMatchBruteForce) {
  for (const char* f : {"material_order_net.json", "nets/unsound_deadlock.json", "nets/unsound_improper.json",
                        "nets/unsound_dead.json", "nets/not_free_choice.json", "nets/not_workflow.json",
                        "nets/unbounded.json", "nets/wide_parallel.json"}) {
    auto n = load(f);
    EXPECT_EQ(is_workflow_net(n).ok, oracle::workflow(n)) << f;
    EXPECT_EQ(is_free_choice(n).ok, oracle::free_choice(n)) << f;
    if (!oracle::workflow(n)) continue;
    auto truth = oracle::soundness(n);
    auto got = is_sound(n).verdict;
    if (truth == oracle::Verdict::too_big) EXPECT_EQ(got, Soundness::inconclusive) << f;
    else EXPECT_EQ(got == Soundness::sound, truth == oracle::Verdict::sound) << f;
  }
}

TEST(Net, UnsoundWitnesses) {
  EXPECT_NE(is_sound(load("nets/unsound_dead.json")).witness.find("dead"), std::string::npos);
  EXPECT_NE(is_sound(load("nets/unsound_improper.json")).witness.find("improper"), std::string::npos);
}

TEST(Net, GeneratedNetsAreSoundFreeChoiceWorkflow) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto g = random_workflow_net(seed);
    ASSERT_TRUE(oracle::workflow(g.net)) << seed;
    ASSERT_TRUE(oracle::free_choice(g.net)) << seed;
    ASSERT_EQ(oracle::soundness(g.net), oracle::Verdict::sound) << seed;
    std::size_t vis = 0, tau = 0;
    for (const auto& t : g.net.transitions) (t.visible ? vis : tau)++;
    EXPECT_LE(vis, 8u);
    EXPECT_LE(tau, 2u);
    EXPECT_TRUE(tau_cycle(g.net).empty());
  }
}

TEST(Net, GeneratorIsDeterministic) {
  EXPECT_EQ(random_workflow_net(42).net, random_workflow_net(42).net);
}

TEST(Net, VisibleLanguageMatchesTokenGame) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto n = random_workflow_net(seed).net;
    EXPECT_EQ(visible_language(n, 6), oracle::token_game(n, 6, false)) << seed;
    EXPECT_EQ(complete_traces(n, 10), oracle::token_game(n, 10, true)) << seed;
  }
}

TEST(Net, TauCycleDetected) {
  PetriNet n;
  n.add_place("i");
  n.add_place("p");
  n.add_place("o");
  n.add_transition("a");
  n.add_transition("t1", false);
  n.add_transition("t2", false);
  n.add_transition("b");
  n.add_arc("i", "a");
  n.add_arc("a", "p");
  n.add_arc("p", "t1");
  n.add_arc("t1", "p");
  n.add_arc("p", "b");
  n.add_arc("b", "o");
  EXPECT_FALSE(tau_cycle(n).empty());
}

TEST(NetIo, JsonAndPnmlRoundTrip) {
  auto n = load("material_order_net.json");
  EXPECT_EQ(net_from_json(nlohmann::json::parse(to_json(n).dump())), n);
  auto back = read_pnml(write_pnml(n));
  EXPECT_EQ(back.places, n.places);
  EXPECT_EQ(back.transitions, n.transitions);
  EXPECT_EQ(back.arc_count(), n.arc_count());
  EXPECT_EQ(read_net(write_pnml(n)).transitions, n.transitions);
  EXPECT_NE(to_dot(n).find("digraph"), std::string::npos);
}

TEST(NetIo, ReadsProMInvisibleMarker) {
  auto xml = R"(<?xml version="1.0"?>
<pnml><net id="n" type="http://www.pnml.org/version-2009/grammar/ptnet"><page id="pg">
<place id="i"><name><text>i</text></name></place>
<place id="o"><name><text>o</text></name></place>
<transition id="t"><name><text>tau</text></name><toolspecific tool="ProM" version="6.4" activity="$invisible$"/></transition>
<arc id="a1" source="i" target="t"/><arc id="a2" source="t" target="o"/>
</page></net></pnml>)";
  auto n = read_pnml(xml);
  ASSERT_EQ(n.transitions.size(), 1u);
  EXPECT_FALSE(n.transitions[0].visible);
}

TEST(Miner, Footprint) {
  auto f = footprint({{"a", "b", "c"}, {"a", "c", "b"}});
  EXPECT_EQ(f.relation("a", "b"), Relation::causal);
  EXPECT_EQ(f.relation("b", "c"), Relation::parallel);
  EXPECT_EQ(f.relation("b", "a"), Relation::reverse_causal);
  EXPECT_EQ(f.relation("a", "a"), Relation::none);
}

TEST(Miner, SequenceAndChoice) {
  std::vector<Trace> log{{"a", "b", "d"}, {"a", "c", "d"}};
  auto n = mine_lifecycle(log);
  EXPECT_TRUE(oracle::workflow(n));
  EXPECT_EQ(replay_fitness(n, log), 1.0);
  EXPECT_FALSE(replays(n, {"a", "b", "c", "d"}));
  EXPECT_EQ(oracle::token_game(n, 5, true), std::set<Trace>(log.begin(), log.end()));
}

TEST(Miner, SeveralStartsGetSilentStart) {
  std::vector<Trace> log{{"a", "c"}, {"b", "d"}};
  auto r = mine_lifecycle_detailed(log);
  EXPECT_TRUE(r.artificial_start);
  EXPECT_TRUE(r.artificial_end);
  EXPECT_EQ(replay_fitness(r.net, log), 1.0);
}

TEST(Miner, EmptyLogRejected) { EXPECT_THROW(mine_lifecycle({}), ValidationError); }

TEST(Miner, FlowerAcceptsEverything) {
  auto f = flower_model({"a", "b"});
  EXPECT_TRUE(replays(f, {"b", "a", "a"}));
  EXPECT_TRUE(replays(f, {}));
}

TEST(Miner, RediscoversGeneratedNets) {
  GeneratorOptions o;
  o.tau_free = true;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto g = random_workflow_net(seed, o);
    auto all = oracle::token_game(g.net, g.net.transitions.size(), true);
    std::vector<Trace> log(all.begin(), all.end());
    EXPECT_EQ(replay_fitness(mine_lifecycle(log), log), 1.0) << seed;
  }
}
