#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "artimine/error.hpp"
#include "artimine/pipeline.hpp"

using namespace artimine;

int main(int argc, char** argv) {
  CLI::App app{"Artifact discovery, lifecycle mining and GSM translation"};
  app.require_subcommand(1);

  std::string config_file, out_dir = ".";
  std::uint64_t seed = 1;
  std::optional<std::size_t> state_cap;
  app.add_option("--config", config_file, "pipeline config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for generated nets in check");
  app.add_option("--state-cap", state_cap, "reachability state cap for soundness");

  auto* ingest = app.add_subcommand("ingest", "tabulate a raw log into database.json");
  std::string log_file, format;
  ingest->add_option("log", log_file, "raw event log")->check(CLI::ExistingFile);
  ingest->add_option("--format", format, "native or csv")->check(CLI::IsMember({"native", "csv"}));

  auto* discover = app.add_subcommand("discover", "keys, entities and foreign keys -> er_model.json");
  std::string database_file;
  discover->add_option("database", database_file, "database.json")->required()->check(CLI::ExistingFile);

  auto* extract = app.add_subcommand("extract", "one lifecycle log per selected artifact");
  std::string er_file;
  extract->add_option("er_model", er_file, "er_model.json")->required()->check(CLI::ExistingFile);

  auto* mine = app.add_subcommand("mine", "workflow net from a lifecycle log");
  std::string lifecycle_file;
  mine->add_option("log", lifecycle_file, "lifecycle log (.jsonl)")->required()->check(CLI::ExistingFile);

  auto* translate = app.add_subcommand("translate", "GSM model from a workflow net");
  TranslateRequest tr;
  std::string net_file, conds_file;
  translate->add_option("net", net_file, "net (JSON or PNML)")->required()->check(CLI::ExistingFile);
  translate->add_option("--conditions", conds_file, "branch conditions (JSON)")->check(CLI::ExistingFile);
  translate->add_option("--artifact", tr.artifact, "artifact name");
  translate->add_flag("--allow-inconclusive", tr.allow_inconclusive, "translate when soundness is inconclusive");

  auto* check = app.add_subcommand("check", "structure, soundness, fitness and PN/GSM equivalence");
  CheckRequest cr;
  std::string check_net, check_gsm, check_log, check_conds;
  check->add_option("--net", check_net, "net (JSON or PNML)")->check(CLI::ExistingFile);
  check->add_option("--gsm", check_gsm, "GSM model (JSON)")->check(CLI::ExistingFile);
  check->add_option("--log", check_log, "lifecycle log for replay fitness")->check(CLI::ExistingFile);
  check->add_option("--conditions", check_conds, "branch conditions (JSON)")->check(CLI::ExistingFile);
  check->add_option("--max-len", cr.max_len, "trace length bound for the language comparison");
  check->add_option("--random", cr.random_nets, "also compare this many generated nets");

  app.add_subcommand("run", "the whole chain from the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    PipelineConfig config;
    if (!config_file.empty()) config = load_config(config_file);
    if (state_cap) config.state_cap = *state_cap;
    auto need_config = [&](const char* what) {
      if (config_file.empty()) throw ValidationError(std::string(what) + " needs --config");
    };
    fs::path out(out_dir);

    if (*ingest) {
      fs::path file = log_file.empty() ? config.log : fs::path(log_file);
      if (file.empty()) throw ValidationError("no log given");
      auto fmt = config.format;
      if (format == "native") fmt = LogFormat::native;
      if (format == "csv") fmt = LogFormat::csv;
      cmd_ingest(file, fmt, config.csv, out, std::cerr);
    } else if (*discover) {
      cmd_discover(database_file, config, out, std::cerr);
    } else if (*extract) {
      need_config("extract");
      cmd_extract(er_file, config, out, std::cerr);
    } else if (*mine) {
      cmd_mine(lifecycle_file, out, std::cerr);
    } else if (*translate) {
      tr.net = net_file;
      if (!conds_file.empty()) tr.conditions = conds_file;
      tr.state_cap = config.state_cap;
      tr.allow_inconclusive = tr.allow_inconclusive || config.allow_inconclusive;
      cmd_translate(tr, out, std::cerr);
    } else if (*check) {
      if (!check_net.empty()) cr.net = check_net;
      if (!check_gsm.empty()) cr.gsm = check_gsm;
      if (!check_log.empty()) cr.lifecycle = check_log;
      if (!check_conds.empty()) cr.conditions = check_conds;
      cr.state_cap = config.state_cap;
      cr.seed = seed;
      if (!cmd_check(cr, std::cout)) return 1;
    } else {
      need_config("run");
      if (!cmd_run(config, out, std::cerr)) return 1;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
