#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "artimine/database.hpp"
#include "artimine/schema.hpp"

namespace artimine {

struct Artifact {
  std::string name;
  std::string main;                  // main entity
  std::vector<std::string> members;  // entities, main included
  AttributeSet identifier;           // identifier of the main entity
};

// Key-relation path, each link oriented in walking direction.
using KeyPath = std::vector<KeyLink>;

// How one event type is extracted: its timestamp column, the table holding
// it, and the path from that table to the artifact's main table.
struct ExtractionSpec {
  std::string event_type;
  std::string table;
  std::string timestamp;
  KeyPath path;
};

struct ArtifactView {
  std::vector<Artifact> artifacts;
  std::map<std::string, std::vector<ExtractionSpec>> specs;  // by artifact
  std::vector<std::string> warnings;
};

enum class SuggestionKind { mandatory, promote, merge };

struct ArtifactSuggestion {
  std::string entity;
  SuggestionKind kind;
  std::size_t event_types = 0;
  std::vector<std::string> merge_targets;  // artifacts that may adopt it
  std::string reason;
};

std::string to_string(SuggestionKind k);

/// Top-level entities first (mandatory), then the rest by descending event
/// type count. Entities without event types are left out; merge targets
/// never include an entity in an n-m relation with the candidate.
std::vector<ArtifactSuggestion> suggest_artifacts(const ErModel& er);

struct ArtifactSelection {
  std::string name;
  std::string main;
  std::vector<std::string> members;  // main may be omitted
};

struct ViewConfig {
  std::vector<ArtifactSelection> artifacts;
  std::map<std::string, KeyPath> path_overrides;  // by event type
};

/// Shortest path between the table holding `from_attrs` and the one holding
/// `to_attrs`, treating K as an undirected graph. Ties go to the
/// lexicographically smaller next table. Empty when both sets live in one
/// table. Throws UnpathableError.
KeyPath path(const Database& db, const std::string& from_table, const std::vector<std::string>& from_attrs,
             const std::string& to_table, const std::vector<std::string>& to_attrs);

/// Equi-join of the tables along `p` starting at `start`. Columns are
/// qualified as `Table.Attr`; with an empty path the start table comes back
/// unchanged.
Table join_path(const Database& db, const std::string& start, const KeyPath& p);

/// Validates the selections against the ER model and derives TS(a) and
/// Path(a) for every event type of every member entity. `db` is the entity
/// database of `er`.
ArtifactView build_view(const ErModel& er, const Database& db, const ViewConfig& config);

struct InstanceAwareEvent {
  std::string type;
  Stamp stamp;
  std::vector<std::string> id;  // identifier values
};

struct ArtifactCase {
  std::vector<std::string> id;
  std::vector<InstanceAwareEvent> events;
};

struct LifecycleLog {
  std::string artifact;
  AttributeSet identifier;
  std::vector<ArtifactCase> cases;                // by first event
  std::map<std::string, std::size_t> orphans;     // by event type
  std::size_t event_count() const;
};

/// Instance-aware events of one event type, in join order.
std::vector<InstanceAwareEvent> extract_events(const Database& db, const Artifact& artifact,
                                               const ExtractionSpec& spec, std::size_t* orphans = nullptr);

std::vector<LifecycleLog> extract_logs(const Database& db, const ArtifactView& view);

/// One JSON object per line: {"id":{...},"events":[{"type","ts","seq"}]}.
std::string write_jsonl(const LifecycleLog& log);
LifecycleLog read_jsonl(const std::string& text, const std::string& artifact = "");

/// Visible traces (event type sequences) of every case.
std::vector<std::vector<std::string>> traces(const LifecycleLog& log);

nlohmann::ordered_json to_json(const ArtifactView& view);

}  // namespace artimine
