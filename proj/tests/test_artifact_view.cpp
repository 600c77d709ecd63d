#include <gtest/gtest.h>

#include <random>

#include "artimine/artifact_view.hpp"
#include "artimine/error.hpp"
#include "artimine/pipeline.hpp"
#include "oracles.hpp"

using namespace artimine;

namespace {

struct BuildToOrder : ::testing::Test {
  PipelineConfig config = load_config(oracle::data_path("build_to_order.json"));
  ErModel er = build_er_model(tabulate(parse_native_log(read_file(config.log))), config.discovery);
  Database db = entity_database(er);
};

Table small_table(const std::string& name, std::vector<std::string> cols, std::mt19937_64& rng) {
  Table t;
  t.name = name;
  t.kind = TableKind::entity;
  for (auto& c : cols) t.columns.push_back({c, ColumnKind::data});
  auto rows = std::uniform_int_distribution<int>(0, 6)(rng);
  for (int r = 0; r < rows; ++r) {
    Row row;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      auto v = std::uniform_int_distribution<int>(0, 3)(rng);
      row.push_back(v ? Cell{std::to_string(v)} : Cell{});
    }
    t.rows.push_back(row);
  }
  return t;
}

// cross product of the path's tables, filtered on every link
std::multiset<std::vector<std::string>> cross_product_join(const Database& db, const std::string& start,
                                                          const KeyPath& p) {
  std::vector<const Table*> tables{&db.require(start)};
  for (const auto& l : p) tables.push_back(&db.require(l.to_table));
  std::vector<std::size_t> offset{0};
  for (auto* t : tables) offset.push_back(offset.back() + t->columns.size());
  std::multiset<std::vector<std::string>> out;
  std::vector<std::size_t> pick(tables.size(), 0);
  std::function<void(std::size_t, Row&)> go = [&](std::size_t i, Row& row) {
    if (i == tables.size()) {
      for (std::size_t k = 0; k < p.size(); ++k) {
        // the link's from table is the nearest earlier one of that name
        std::size_t from = 0;
        for (std::size_t j = 0; j <= k; ++j)
          if (tables[j]->name == p[k].from_table) from = j;
        for (std::size_t a = 0; a < p[k].from_attrs.size(); ++a) {
          const auto& x = row[offset[from] + tables[from]->require_column(p[k].from_attrs[a])];
          const auto& y = row[offset[k + 1] + tables[k + 1]->require_column(p[k].to_attrs[a])];
          if (is_null(x) || x != y) return;
        }
      }
      std::vector<std::string> text;
      for (const auto& c : row) text.push_back(cell_text(c));
      out.insert(text);
      return;
    }
    for (const auto& r : tables[i]->rows) {
      auto size = row.size();
      row.insert(row.end(), r.begin(), r.end());
      go(i + 1, row);
      row.resize(size);
    }
  };
  Row row;
  go(0, row);
  return out;
}

}  // namespace

TEST_F(BuildToOrder, PathBetweenEntities) {
  auto p = path(db, "MaterialOrder", {"ReceiveMO"}, "PurchaseOrder", {"POrderID"});
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].from_table, "MaterialOrder");
  EXPECT_EQ(p[0].to_table, "PurchaseOrder");
  EXPECT_TRUE(path(db, "PurchaseOrder", {"ShipPO"}, "PurchaseOrder", {"POrderID"}).empty());
}

TEST_F(BuildToOrder, IdentityJoinIsTheTable) {
  EXPECT_EQ(join_path(db, "PurchaseOrder", {}), db.require("PurchaseOrder"));
}

TEST_F(BuildToOrder, ReceiveMOExtraction) {
  auto view = build_view(er, db, config.view);
  const auto& specs = view.specs.at("PurchaseOrder");
  auto s = std::find_if(specs.begin(), specs.end(), [](const auto& x) { return x.event_type == "ReceiveMO"; });
  ASSERT_NE(s, specs.end());
  auto events = extract_events(db, view.artifacts[0], *s);
  ASSERT_EQ(events.size(), 6u);
  EXPECT_EQ(events[0].id, std::vector<std::string>{"1"});
  EXPECT_EQ(to_string(events[0].stamp.time), "11-24,19:56");
  EXPECT_EQ(to_string(events[2].stamp.time), "12-03,14:54");
}

TEST_F(BuildToOrder, MergedViewCases) {
  auto logs = extract_logs(db, build_view(er, db, config.view));
  ASSERT_EQ(logs.size(), 1u);
  const auto& l = logs[0];
  ASSERT_EQ(l.cases.size(), 3u);
  EXPECT_EQ(l.event_count(), oracle::count_log_lines(oracle::data_path("build_to_order.log")));
  std::vector<std::string> po1{"ReceivePO", "CreateMO", "ReceiveMO", "ReceiveSupplResp", "ReceiveItems",
                               "Assemble", "ShipPO", "InvoicePO", "ClosePO"};
  EXPECT_EQ(traces(l)[0], po1);
  for (const auto& c : l.cases)
    for (std::size_t i = 1; i < c.events.size(); ++i) EXPECT_LT(c.events[i - 1].stamp, c.events[i].stamp);
}

TEST_F(BuildToOrder, SplitViewCases) {
  auto split = load_config(oracle::data_path("build_to_order_split.json"));
  auto logs = extract_logs(db, build_view(er, db, split.view));
  ASSERT_EQ(logs.size(), 2u);
  EXPECT_EQ(logs[0].cases.size(), 3u);
  EXPECT_EQ(logs[1].cases.size(), 6u);
  EXPECT_EQ(logs[0].event_count() + logs[1].event_count(), 41u);
}

TEST_F(BuildToOrder, ViewValidation) {
  ViewConfig none;
  EXPECT_THROW(build_view(er, db, none), ValidationError);
  ViewConfig missing_top;
  missing_top.artifacts.push_back({"M", "MaterialOrder", {}});
  EXPECT_THROW(build_view(er, db, missing_top), ValidationError);
  ViewConfig top_as_member;
  top_as_member.artifacts.push_back({"M", "MaterialOrder", {"PurchaseOrder"}});
  EXPECT_THROW(build_view(er, db, top_as_member), ValidationError);
}

TEST_F(BuildToOrder, Suggestions) {
  auto s = suggest_artifacts(er);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].entity, "PurchaseOrder");
  EXPECT_EQ(s[0].kind, SuggestionKind::mandatory);
  EXPECT_EQ(s[1].entity, "MaterialOrder");
}

TEST_F(BuildToOrder, JsonlRoundTrip) {
  auto logs = extract_logs(db, build_view(er, db, config.view));
  auto text = write_jsonl(logs[0]);
  auto back = read_jsonl(text, logs[0].artifact);
  EXPECT_EQ(write_jsonl(back), text);
  EXPECT_EQ(traces(back), traces(logs[0]));
}

TEST(Path, Unpathable) {
  Database db;
  Table a, b;
  a.name = "A";
  a.columns = {{"x", ColumnKind::data}};
  b.name = "B";
  b.columns = {{"y", ColumnKind::data}};
  db.tables = {a, b};
  EXPECT_THROW(path(db, "A", {"x"}, "B", {"y"}), UnpathableError);
}

TEST(Join, MatchesCrossProduct) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    Database db;
    db.tables.push_back(small_table("A", {"a", "k"}, rng));
    db.tables.push_back(small_table("B", {"k", "m"}, rng));
    db.tables.push_back(small_table("C", {"m", "c"}, rng));
    db.keys = {{"A", {"k"}, "B", {"k"}}, {"B", {"m"}, "C", {"m"}}};
    auto p = path(db, "A", {"a"}, "C", {"c"});
    ASSERT_EQ(p.size(), 2u);
    auto joined = join_path(db, "A", p);
    std::multiset<std::vector<std::string>> got;
    for (const auto& r : joined.rows) {
      std::vector<std::string> text;
      for (const auto& c : r) text.push_back(cell_text(c));
      got.insert(text);
    }
    ASSERT_EQ(got, cross_product_join(db, "A", p)) << "case " << i;
    EXPECT_EQ(joined.columns.front().name, "A.a");
  }
}

TEST(Path, ShortestWithLexicographicTie) {
  Database db;
  for (const char* n : {"S", "X", "Y", "T"}) {
    Table t;
    t.name = n;
    t.columns = {{"k", ColumnKind::data}, {std::string("own") + n, ColumnKind::data}};
    db.tables.push_back(t);
  }
  db.keys = {{"S", {"k"}, "Y", {"k"}}, {"S", {"k"}, "X", {"k"}}, {"Y", {"k"}, "T", {"k"}}, {"X", {"k"}, "T", {"k"}}};
  auto p = path(db, "S", {"ownS"}, "T", {"ownT"});
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].to_table, "X");
}
