#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "artimine/raw_log.hpp"
#include "artimine/timestamp.hpp"
#include "json.hpp"

namespace artimine {

// A table cell: null (⊥), a data value, or an event timestamp.
using Cell = std::variant<std::monostate, std::string, Stamp>;

inline bool is_null(const Cell& c) { return std::holds_alternative<std::monostate>(c); }
std::string cell_text(const Cell& c);  // "" for null

enum class ColumnKind { data, timestamp };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::data;

  friend bool operator==(const Column&, const Column&) = default;
};

enum class TableKind { event_type, multi_valued, entity, derived };

using Row = std::vector<Cell>;

struct Table {
  std::string name;
  TableKind kind = TableKind::derived;
  std::string owner;  // owning event type of a multi-valued table
  std::vector<Column> columns;
  std::vector<Row> rows;

  std::optional<std::size_t> column_index(const std::string& column) const;
  std::size_t require_column(const std::string& column) const;
  bool has_column(const std::string& column) const { return column_index(column).has_value(); }
  std::vector<std::string> data_columns() const;
  std::vector<std::string> timestamp_columns() const;

  friend bool operator==(const Table&, const Table&) = default;
};

// One element of the key relation K: `from_attrs` of `from_table` are a
// foreign key onto `to_attrs` of `to_table`.
struct KeyLink {
  std::string from_table;
  std::vector<std::string> from_attrs;
  std::string to_table;
  std::vector<std::string> to_attrs;

  friend bool operator==(const KeyLink&, const KeyLink&) = default;
};

struct Database {
  std::vector<Table> tables;
  std::vector<KeyLink> keys;

  const Table* find(const std::string& name) const;
  Table* find(const std::string& name);
  const Table& require(const std::string& name) const;

  friend bool operator==(const Database&, const Database&) = default;
};

/// Name of the side table holding multi-valued attribute `attr` of `type`.
std::string multi_valued_table_name(const std::string& type, const std::string& attr);

/// One event type table per event type (timestamp column named after the
/// type, one column per single-valued attribute, ⊥ where absent) and one
/// side table per multi-valued attribute. Side tables carry every data
/// column of their owner until a primary key is chosen; K links each side
/// table to its owner over those columns.
Database tabulate(const RawLog& log);

/// Throws ValidationError when a key link names a missing table or column.
void validate(const Database& db);

nlohmann::ordered_json cell_to_json(const Cell& c);
Cell cell_from_json(const nlohmann::json& j, ColumnKind kind);
nlohmann::ordered_json to_json(const Table& t);
Table table_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const KeyLink& k);
KeyLink key_link_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const Database& db);
Database database_from_json(const nlohmann::json& j);

}  // namespace artimine
