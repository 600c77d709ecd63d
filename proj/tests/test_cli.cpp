#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "artimine/error.hpp"
#include "artimine/pipeline.hpp"
#include "oracles.hpp"

using namespace artimine;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("artimine_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  auto cmd = std::string(CLI_PATH) + " " + args + " >/dev/null 2>&1";
  auto status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read_file(e.path());
  return out;
}

}  // namespace

TEST(Pipeline, FileStem) {
  EXPECT_EQ(file_stem("PurchaseOrder"), "purchase_order");
  EXPECT_EQ(file_stem("MO"), "mo");
}

TEST(Pipeline, ConfigParsing) {
  auto c = load_config(oracle::data_path("build_to_order.json"));
  EXPECT_EQ(c.log, fs::path(oracle::data_path("build_to_order.log")));
  EXPECT_EQ(c.discovery.schema.key_hints.at("ReassignSupplier"), (AttributeSet{"MOrderID"}));
  ASSERT_EQ(c.view.artifacts.size(), 1u);
  auto j = nlohmann::json::parse(R"({"foreign_keys":["MaterialOrder.POrderID -> PurchaseOrder.POrderID"]})");
  auto fk = config_from_json(j).discovery.foreign_keys;
  ASSERT_TRUE(fk);
  EXPECT_EQ(fk->at(0).to_entity, "PurchaseOrder");
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"foreign_keys":["A.x"]})")), ValidationError);
}

TEST(Pipeline, StepwiseMatchesRun) {
  auto config = load_config(oracle::data_path("build_to_order_split.json"));
  std::ostringstream log;
  auto steps = scratch("steps");
  auto db = cmd_ingest(config.log, config.format, config.csv, steps, log);
  auto er = cmd_discover(db, config, steps, log);
  auto logs = cmd_extract(er, config, steps, log);
  ASSERT_EQ(logs.size(), 2u);
  EXPECT_EQ(logs[0].filename(), "purchase_order.jsonl");
  EXPECT_EQ(logs[1].filename(), "material_order.jsonl");
  EXPECT_EQ(read_jsonl(read_file(logs[1])).cases.size(), 6u);
  for (std::size_t i = 0; i < logs.size(); ++i) {
    auto net = cmd_mine(logs[i], steps, log);
    cmd_translate({net, std::nullopt, config.view.artifacts[i].name, 10000, false}, steps, log);
  }
  auto all = scratch("run");
  cmd_run(config, all, log);
  EXPECT_EQ(snapshot(steps), snapshot(all));
}

TEST(Pipeline, RunIsIdempotent) {
  auto config = load_config(oracle::data_path("build_to_order.json"));
  std::ostringstream log;
  auto dir = scratch("idem");
  EXPECT_TRUE(cmd_run(config, dir, log)) << log.str();
  auto first = snapshot(dir);
  cmd_run(config, dir, log);
  EXPECT_EQ(snapshot(dir), first);
  EXPECT_TRUE(first.contains("er_model.json"));
  EXPECT_TRUE(first.contains("purchase_order.gsm.json"));
}

TEST(Pipeline, CheckReportsVerdicts) {
  std::ostringstream out;
  CheckRequest r;
  r.net = oracle::data_path("material_order_net.json");
  EXPECT_TRUE(cmd_check(r, out));
  EXPECT_NE(out.str().find("soundness: sound"), std::string::npos);
  r.net = oracle::data_path("nets/unsound_deadlock.json");
  EXPECT_FALSE(cmd_check(r, out));
}

TEST(Cli, ExitCodes) {
  auto dir = scratch("cli");
  auto data = std::string(TEST_DATA_DIR);
  EXPECT_EQ(run_cli("--out-dir " + dir.string() + " ingest " + data + "/build_to_order.log"), 0);
  EXPECT_TRUE(fs::exists(dir / "database.json"));

  auto bad = dir / "bad.log";
  write_file(bad, "11-24,17:12  ShipPO  POrderID=1\nnot an event\n");
  EXPECT_EQ(run_cli("--out-dir " + dir.string() + " ingest " + bad.string()), 1);

  auto empty = dir / "empty.log";
  write_file(empty, "");
  EXPECT_EQ(run_cli("--out-dir " + dir.string() + " ingest " + empty.string()), 0);

  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("ingest /no/such/file.log"), 2);
  EXPECT_EQ(run_cli(""), 2);

  EXPECT_EQ(run_cli("--out-dir " + dir.string() + " translate " + data + "/material_order_net.json --conditions " + data +
                    "/material_order_conditions.json"),
            0);
  EXPECT_TRUE(fs::exists(dir / "material_order_net.guards.txt"));
  EXPECT_EQ(run_cli("check --net " + data + "/material_order_net.json --gsm " + (dir / "material_order_net.gsm.json").string() +
                    " --conditions " + data + "/material_order_conditions.json --random 5"),
            0);
  EXPECT_EQ(run_cli("check --net " + data + "/nets/unsound_improper.json"), 1);
  EXPECT_EQ(run_cli("--out-dir " + dir.string() + " translate " + data + "/nets/not_free_choice.json"), 1);
  // extract without artifact selections
  EXPECT_EQ(run_cli("--out-dir " + dir.string() + " extract " + (dir / "database.json").string()), 1);
}

TEST(Cli, DiscoverWithConflictingHintFails) {
  auto dir = scratch("hint");
  auto data = std::string(TEST_DATA_DIR);
  ASSERT_EQ(run_cli("--out-dir " + dir.string() + " ingest " + data + "/build_to_order.log"), 0);
  auto cfg = dir / "cfg.json";
  write_file(cfg, R"({"key_hints":{"CreateMO":["supplier"]}})");
  EXPECT_EQ(run_cli("--config " + cfg.string() + " --out-dir " + dir.string() + " discover " +
                    (dir / "database.json").string()),
            1);
}
