#include <gtest/gtest.h>

#include <random>

#include "artimine/error.hpp"
#include "artimine/pipeline.hpp"
#include "artimine/schema.hpp"
#include "oracles.hpp"

using namespace artimine;

namespace {

Table table_of(std::vector<std::string> cols, std::vector<std::vector<std::string>> rows) {
  Table t;
  t.name = "T";
  t.kind = TableKind::event_type;
  for (auto& c : cols) t.columns.push_back({c, ColumnKind::data});
  for (auto& r : rows) {
    Row row;
    for (auto& v : r) row.push_back(v.empty() ? Cell{} : Cell{v});
    t.rows.push_back(row);
  }
  return t;
}

struct BuildToOrder : ::testing::Test {
  PipelineConfig config = load_config(oracle::data_path("build_to_order.json"));
  Database db = tabulate(parse_native_log(read_file(config.log)));
};

}  // namespace

TEST(Keys, SingleColumnKey) {
  auto t = table_of({"id", "v"}, {{"1", "a"}, {"2", "a"}, {"3", "b"}});
  EXPECT_EQ(discover_keys(t), (std::vector<AttributeSet>{{"id"}}));
}

TEST(Keys, CompositeKeyAndMinimality) {
  auto t = table_of({"a", "b", "c"}, {{"1", "1", "x"}, {"1", "2", "y"}, {"2", "1", "z"}});
  // c alone, and {a,b}; {a,b,c} is not minimal
  EXPECT_EQ(discover_keys(t), (std::vector<AttributeSet>{{"c"}, {"a", "b"}}));
}

TEST(Keys, SingleRowYieldsEmptyKey) {
  auto t = table_of({"a", "b"}, {{"1", "2"}});
  EXPECT_EQ(discover_keys(t), (std::vector<AttributeSet>{{}}));
}

TEST(Keys, DuplicateRowsDoNotBreakKeys) {
  auto t = table_of({"a", "b"}, {{"1", "x"}, {"1", "x"}, {"2", "y"}});
  EXPECT_EQ(discover_keys(t), (std::vector<AttributeSet>{{"a"}, {"b"}}));
}

TEST(Keys, MatchesBruteForce) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    auto t = oracle::random_table(rng);
    for (std::size_t arity : {std::size_t{2}, std::size_t{8}})
      ASSERT_EQ(discover_keys(t, arity), oracle::brute_force_keys(t, arity)) << "table " << i;
  }
}

TEST(Keys, PrimaryKeySelection) {
  EXPECT_EQ(select_primary_key("T", {{"b"}, {"a", "c"}}), (AttributeSet{"b"}));
  EXPECT_EQ(select_primary_key("T", {{"b"}, {"a"}}), (AttributeSet{"a"}));
  EXPECT_EQ(select_primary_key("T", {{"b"}, {"a"}}, AttributeSet{"b"}), (AttributeSet{"b"}));
  EXPECT_THROW(select_primary_key("T", {{}}), UnresolvedKeyError);
}

TEST_F(BuildToOrder, GroupsTwoEntities) {
  auto g = group_entities(db, config.discovery.schema);
  ASSERT_EQ(g.entities.size(), 2u);
  std::map<std::string, std::size_t> tables;
  for (const auto& e : g.entities) tables[e.name] = e.tables.size();
  EXPECT_EQ(tables["PurchaseOrder"], 4u);
  EXPECT_EQ(tables["MaterialOrder"], 6u);
  EXPECT_TRUE(g.unassigned.empty());
}

TEST_F(BuildToOrder, WithoutHintSingleRowTableIsUnassigned) {
  auto g = group_entities(db, {});
  ASSERT_EQ(g.unassigned.size(), 1u);
  EXPECT_EQ(g.unassigned[0].table, "ReassignSupplier");
}

TEST_F(BuildToOrder, ConflictingHintIsRejected) {
  SchemaConfig bad;
  bad.key_hints["CreateMO"] = {"supplier"};
  EXPECT_THROW(group_entities(db, bad), ValidationError);
  bad.key_hints["CreateMO"] = {"nosuchcolumn"};
  EXPECT_THROW(group_entities(db, bad), ValidationError);
}

TEST_F(BuildToOrder, ErModel) {
  auto er = build_er_model(db, config.discovery);
  ASSERT_EQ(er.foreign_keys.size(), 1u);
  EXPECT_EQ(er.foreign_keys[0].from_entity, "MaterialOrder");
  EXPECT_EQ(to_string(er.foreign_keys[0].multiplicity), "n-1");
  EXPECT_EQ(er.horizon.at("MaterialOrder"), (std::set<std::string>{"PurchaseOrder"}));
  EXPECT_TRUE(er.horizon.at("PurchaseOrder").empty());
  EXPECT_TRUE(precedes(er, "PurchaseOrder", "MaterialOrder"));
  EXPECT_FALSE(precedes(er, "MaterialOrder", "PurchaseOrder"));
  EXPECT_EQ(er.top_level, (std::set<std::string>{"PurchaseOrder"}));
  // the best candidate is the accepted one
  ASSERT_FALSE(er.candidates.empty());
  EXPECT_EQ(er.candidates[0].coverage, 1.0);
  EXPECT_EQ(er.candidates[0].from_entity, "MaterialOrder");
}

TEST_F(BuildToOrder, ErModelJsonRoundTrip) {
  auto er = build_er_model(db, config.discovery);
  auto back = er_model_from_json(nlohmann::json::parse(to_json(er).dump()));
  EXPECT_EQ(to_json(back).dump(), to_json(er).dump());
}

TEST_F(BuildToOrder, MaterialOrderTableMergesSharedColumns) {
  auto er = build_er_model(db, config.discovery);
  const auto& mo = er.table("MaterialOrder");
  EXPECT_EQ(mo.rows.size(), 6u);
  EXPECT_TRUE(mo.has_column("supplier"));
  EXPECT_TRUE(mo.has_column("POrderID"));
  EXPECT_EQ(mo.timestamp_columns().size(), 6u);
}

TEST(Merge, ConflictingValuesStayApart) {
  auto db = tabulate(parse_native_log(
      "01-01,10:00  A  id=1, v=x\n"
      "01-01,11:00  B  id=1, v=y\n"));
  Entity e{"E", {"id"}, {"A", "B"}};
  auto t = merge_entity_table(db, e);
  EXPECT_TRUE(t.has_column("A.v"));
  EXPECT_TRUE(t.has_column("B.v"));
  EXPECT_FALSE(t.has_column("v"));
}

TEST(Multiplicity, Directions) {
  auto parent = table_of({"id"}, {{"1"}, {"2"}});
  auto child = table_of({"cid", "id"}, {{"a", "1"}, {"b", "1"}, {"c", "2"}});
  EXPECT_EQ(multiplicity(child, {"id"}, parent, {"id"}), Multiplicity::many_to_one);
  auto twin = table_of({"cid", "id"}, {{"a", "1"}, {"b", "2"}});
  EXPECT_EQ(multiplicity(twin, {"id"}, parent, {"id"}), Multiplicity::one_to_one);
  EXPECT_EQ(multiplicity_from_string(to_string(Multiplicity::many_to_many)), Multiplicity::many_to_many);
}

TEST(InclusionDeps, NoSharedValuesNoCandidates) {
  auto db = tabulate(parse_native_log(
      "01-01,10:00  A  a=1\n"
      "01-01,11:00  A  a=2\n"
      "01-02,10:00  B  b=7\n"
      "01-02,11:00  B  b=8\n"));
  auto er = build_er_model(db, {});
  EXPECT_EQ(er.entities.size(), 2u);
  EXPECT_TRUE(er.candidates.empty());
  EXPECT_TRUE(er.foreign_keys.empty());
  // unnamed entities take their identifier as name
  EXPECT_EQ(er.top_level, (std::set<std::string>{"a", "b"}));
}

TEST(Similarity, LcsRatio) {
  EXPECT_EQ(name_similarity("POrderID", "POrderID"), 1.0);
  EXPECT_LT(name_similarity("POrderID", "MOrderID"), 1.0);
  EXPECT_GT(name_similarity("POrderID", "MOrderID"), name_similarity("POrderID", "supplier"));
}

TEST(Qualified, Parses) {
  EXPECT_EQ(parse_qualified("MaterialOrder.POrderID"),
            (std::pair<std::string, std::vector<std::string>>{"MaterialOrder", {"POrderID"}}));
  EXPECT_EQ(parse_qualified("E.(A,B)").second, (std::vector<std::string>{"A", "B"}));
}
