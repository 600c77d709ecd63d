#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "artimine/database.hpp"

namespace artimine {

// Attribute names of one table, sorted.
using AttributeSet = std::vector<std::string>;

/// True when no two rows that differ on some data attribute agree on `attrs`.
/// Null compares equal to null.
bool is_distinguishing(const Table& table, const AttributeSet& attrs);

/// All minimal distinguishing sets of data attributes with at most
/// `max_arity` members, by level-wise enumeration with superset pruning.
/// Ordered by arity, then lexicographically. A table whose rows agree on
/// every data attribute (e.g. a single row) yields the empty key.
std::vector<AttributeSet> discover_keys(const Table& table, std::size_t max_arity = 3);

/// The hint if given, otherwise the smallest non-empty key (ties broken
/// lexicographically). Throws UnresolvedKeyError when neither exists.
AttributeSet select_primary_key(const std::string& table, const std::vector<AttributeSet>& keys,
                                const std::optional<AttributeSet>& hint = std::nullopt);

struct SchemaConfig {
  std::size_t max_arity = 3;
  std::map<std::string, AttributeSet> key_hints;          // event type -> primary key
  std::map<std::string, std::string> entity_names;        // "A,B" identifier -> entity name
};

/// Event type tables sharing a primary key; the key is the instance identifier.
struct Entity {
  std::string name;
  AttributeSet identifier;
  std::vector<std::string> tables;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct UnassignedTable {
  std::string table;
  std::string reason;
};

struct EntityGrouping {
  std::vector<Entity> entities;
  std::map<std::string, std::vector<AttributeSet>> keys;  // discovered, per table
  std::map<std::string, AttributeSet> primary_keys;
  std::vector<UnassignedTable> unassigned;
};

std::string identifier_label(const AttributeSet& identifier);  // "A,B"

/// Partitions event type tables by primary key. Tables without a usable key
/// are reported in `unassigned`. A hint that names a missing column or is
/// not distinguishing on the data throws ValidationError.
EntityGrouping group_entities(const Database& db, const SchemaConfig& config = {});

/// Projects each side table onto its owner's primary key plus the value
/// column and rewrites the side-table links of K accordingly.
Database normalize_side_tables(const Database& db, const EntityGrouping& grouping);

/// One row per identifier value (in order of first occurrence). Same-named
/// attributes merge when they agree per identifier value and are otherwise
/// kept apart as `Table.attr`. Each event type contributes its timestamp
/// column.
Table merge_entity_table(const Database& db, const Entity& entity);

struct FkCandidate {
  std::string from_entity;
  std::vector<std::string> from_attrs;
  std::string to_entity;
  std::vector<std::string> to_attrs;
  double coverage = 0;         // |source values| / |target identifier values|
  double name_similarity = 0;  // 1.0 for identical attribute names

  friend bool operator==(const FkCandidate&, const FkCandidate&) = default;
};

double name_similarity(const std::string& a, const std::string& b);

/// Inclusion dependencies from attributes of one entity's combined table
/// into another entity's identifier, ranked for user confirmation.
std::vector<FkCandidate> discover_inclusion_deps(const std::vector<Entity>& entities,
                                                 const std::map<std::string, Table>& entity_tables);

enum class Multiplicity { one_to_one, one_to_many, many_to_one, many_to_many };

// Read from the referencing side: "n-1" means many source rows per target.
std::string to_string(Multiplicity m);
Multiplicity multiplicity_from_string(const std::string& s);

/// Counts distinct matches per side. Source instances are rows of `from`
/// unless `from_instance_key` groups them.
Multiplicity multiplicity(const Table& from, const std::vector<std::string>& from_attrs, const Table& to,
                          const std::vector<std::string>& to_attrs,
                          const std::vector<std::string>& from_instance_key = {});

struct ForeignKey {
  std::string from_entity;
  std::vector<std::string> from_attrs;
  std::string to_entity;
  std::vector<std::string> to_attrs;
  Multiplicity multiplicity = Multiplicity::many_to_one;

  friend bool operator==(const ForeignKey&, const ForeignKey&) = default;
};

struct ForeignKeySelection {
  std::string from_entity;
  std::vector<std::string> from_attrs;
  std::string to_entity;
  std::vector<std::string> to_attrs;
};

/// Parses "Entity.Attr" or "Entity.(A,B)".
std::pair<std::string, std::vector<std::string>> parse_qualified(const std::string& text);

struct ErModel {
  std::vector<Entity> entities;
  std::map<std::string, Table> tables;  // combined table per entity
  std::map<std::string, AttributeSet> primary_keys;
  std::vector<UnassignedTable> unassigned;
  std::vector<FkCandidate> candidates;
  std::vector<ForeignKey> foreign_keys;
  std::map<std::string, std::set<std::string>> horizon;
  std::set<std::string> top_level;
  std::vector<std::string> warnings;

  const Entity& entity(const std::string& name) const;
  const Table& table(const std::string& name) const;
};

struct DiscoveryConfig {
  SchemaConfig schema;
  // Accepted foreign keys. When unset, candidates whose attribute names
  // equal the target identifier names are accepted.
  std::optional<std::vector<ForeignKeySelection>> foreign_keys;
};

/// The logical horizon: entities uniquely and transitively identified from
/// each entity through the accepted foreign keys, judged on the data.
std::map<std::string, std::set<std::string>> logical_horizon(const ErModel& er,
                                                             std::vector<std::string>* warnings = nullptr);

/// Instance of `to` identified by each instance of `from` along the
/// foreign-key path used for the horizon. Instances are keyed by the
/// identifier values joined with '\x1f'.
std::map<std::string, std::string> instance_mapping(const ErModel& er, const std::string& from,
                                                    const std::string& to);

/// Earliest timestamp per instance of an entity.
std::map<std::string, Timestamp> creation_times(const ErModel& er, const std::string& entity);

/// `earlier` precedes `later`: `earlier` lies in the horizon of `later` and
/// every related `earlier` instance is created strictly before its `later`
/// instance.
bool precedes(const ErModel& er, const std::string& earlier, const std::string& later);

std::set<std::string> top_level_entities(const ErModel& er);

ErModel build_er_model(const Database& db, const DiscoveryConfig& config = {});

/// Combined entity tables with the accepted foreign keys as key relation.
Database entity_database(const ErModel& er);

nlohmann::ordered_json to_json(const ErModel& er);
ErModel er_model_from_json(const nlohmann::json& j);

/// Human-readable candidate foreign key report.
std::string candidate_report(const ErModel& er);

}  // namespace artimine
