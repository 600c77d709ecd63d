#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "artimine/artifact_view.hpp"
#include "artimine/raw_log.hpp"
#include "artimine/schema.hpp"

namespace artimine {

namespace fs = std::filesystem;

// Relative paths in a config file resolve against the file's directory.
//
// {"log": "orders.log", "format": "native" | "csv",
//  "csv": {"timestamp": "timestamp", "type": "type", "delimiter": ","},
//  "max_arity": 3,
//  "key_hints": {"ReassignSupplier": ["MOrderID"]},
//  "entity_names": {"POrderID": "PurchaseOrder"},
//  "foreign_keys": ["MaterialOrder.POrderID -> PurchaseOrder.POrderID"],
//  "artifacts": [{"name": "...", "main": "...", "members": [...]}],
//  "path_overrides": {"EventType": [{"from_table", "from_attrs", "to_table", "to_attrs"}]},
//  "conditions": {"ArtifactName": "conditions.json"},
//  "state_cap": 10000, "allow_inconclusive": false, "max_len": 10}
struct PipelineConfig {
  fs::path log;
  LogFormat format = LogFormat::native;
  CsvOptions csv;
  DiscoveryConfig discovery;
  ViewConfig view;
  std::map<std::string, fs::path> conditions;  // by artifact
  std::size_t state_cap = 10000;
  bool allow_inconclusive = false;
  std::size_t max_len = 10;
};

PipelineConfig load_config(const fs::path& file);
PipelineConfig config_from_json(const nlohmann::json& j, const fs::path& base = {});

std::string read_file(const fs::path& file);
void write_file(const fs::path& file, const std::string& text);

// "PurchaseOrder" -> "purchase_order"
std::string file_stem(const std::string& name);

// Every command writes into `out_dir` and reports progress on `log`.
// Returned paths are the files written.

fs::path cmd_ingest(const fs::path& log_file, LogFormat format, const CsvOptions& csv, const fs::path& out_dir,
                    std::ostream& log);

fs::path cmd_discover(const fs::path& database_file, const PipelineConfig& config, const fs::path& out_dir,
                      std::ostream& log);

std::vector<fs::path> cmd_extract(const fs::path& er_file, const PipelineConfig& config, const fs::path& out_dir,
                                  std::ostream& log);

fs::path cmd_mine(const fs::path& lifecycle_file, const fs::path& out_dir, std::ostream& log);

struct TranslateRequest {
  fs::path net;
  std::optional<fs::path> conditions;
  std::string artifact;
  std::size_t state_cap = 10000;
  bool allow_inconclusive = false;
};

fs::path cmd_translate(const TranslateRequest& request, const fs::path& out_dir, std::ostream& log);

struct CheckRequest {
  std::optional<fs::path> net;
  std::optional<fs::path> gsm;
  std::optional<fs::path> lifecycle;   // replay fitness against this log
  std::optional<fs::path> conditions;  // for the PN/GSM comparison
  std::size_t state_cap = 10000;
  std::size_t max_len = 10;
  std::size_t random_nets = 0;  // extra PN/GSM comparisons on generated nets
  std::uint64_t seed = 1;
};

/// Writes a report to `log`; false when any verdict fails.
bool cmd_check(const CheckRequest& request, std::ostream& log);

/// ingest, discover, extract, then mine, translate and check per artifact.
bool cmd_run(const PipelineConfig& config, const fs::path& out_dir, std::ostream& log);

}  // namespace artimine
