#include "artimine/database.hpp"

#include <algorithm>
#include <map>

#include "artimine/error.hpp"

namespace artimine {

using nlohmann::json;
using nlohmann::ordered_json;

std::string cell_text(const Cell& c) {
  if (auto s = std::get_if<std::string>(&c)) return *s;
  if (auto t = std::get_if<Stamp>(&c)) return to_string(t->time);
  return {};
}

std::optional<std::size_t> Table::column_index(const std::string& column) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == column) return i;
  return std::nullopt;
}

std::size_t Table::require_column(const std::string& column) const {
  if (auto i = column_index(column)) return *i;
  throw ValidationError("table '" + name + "' has no column '" + column + "'");
}

std::vector<std::string> Table::data_columns() const {
  std::vector<std::string> out;
  for (const auto& c : columns)
    if (c.kind == ColumnKind::data) out.push_back(c.name);
  return out;
}

std::vector<std::string> Table::timestamp_columns() const {
  std::vector<std::string> out;
  for (const auto& c : columns)
    if (c.kind == ColumnKind::timestamp) out.push_back(c.name);
  return out;
}

const Table* Database::find(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

Table* Database::find(const std::string& name) {
  for (auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

const Table& Database::require(const std::string& name) const {
  if (auto t = find(name)) return *t;
  throw ValidationError("no table named '" + name + "'");
}

std::string multi_valued_table_name(const std::string& type, const std::string& attr) {
  return type + "[" + attr + "]";
}

Database tabulate(const RawLog& log) {
  std::vector<std::string> types;
  std::map<std::string, std::vector<std::size_t>> events_of;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const auto& type = log.events[i].type;
    if (!events_of.contains(type)) types.push_back(type);
    events_of[type].push_back(i);
  }

  Database db;
  for (const auto& type : types) {
    const auto& indices = events_of[type];
    std::vector<std::string> names;
    std::map<std::string, bool> multi;
    for (auto i : indices) {
      std::map<std::string, int> count;
      for (const auto& [name, value] : log.events[i].attrs) {
        if (!multi.contains(name)) {
          names.push_back(name);
          multi[name] = false;
        }
        if (++count[name] > 1) multi[name] = true;
      }
    }

    Table main;
    main.name = type;
    main.kind = TableKind::event_type;
    main.columns.push_back({type, ColumnKind::timestamp});
    std::vector<std::string> single;
    for (const auto& n : names)
      if (!multi[n]) {
        single.push_back(n);
        main.columns.push_back({n, ColumnKind::data});
      }

    std::vector<Table> sides;
    for (const auto& n : names) {
      if (!multi[n]) continue;
      Table side;
      side.name = multi_valued_table_name(type, n);
      side.kind = TableKind::multi_valued;
      side.owner = type;
      for (const auto& s : single) side.columns.push_back({s, ColumnKind::data});
      side.columns.push_back({n, ColumnKind::data});
      sides.push_back(std::move(side));
    }

    for (auto i : indices) {
      const auto& event = log.events[i];
      Row row(main.columns.size());
      row[0] = Stamp{event.time, i};
      for (std::size_t c = 0; c < single.size(); ++c) {
        for (const auto& [name, value] : event.attrs)
          if (name == single[c]) row[c + 1] = value;
      }
      for (auto& side : sides) {
        const auto& attr = side.columns.back().name;
        for (const auto& [name, value] : event.attrs) {
          if (name != attr) continue;
          Row srow(row.begin() + 1, row.end());
          srow.push_back(value);
          side.rows.push_back(std::move(srow));
        }
      }
      main.rows.push_back(std::move(row));
    }

    db.tables.push_back(std::move(main));
    for (auto& side : sides) {
      if (!single.empty()) db.keys.push_back({side.name, single, type, single});
      db.tables.push_back(std::move(side));
    }
  }
  return db;
}

void validate(const Database& db) {
  std::map<std::string, int> seen;
  for (const auto& t : db.tables)
    if (++seen[t.name] > 1) throw ValidationError("duplicate table '" + t.name + "'");
  for (const auto& k : db.keys) {
    const auto& from = db.require(k.from_table);
    const auto& to = db.require(k.to_table);
    if (k.from_attrs.size() != k.to_attrs.size() || k.from_attrs.empty())
      throw ValidationError("key link " + k.from_table + " -> " + k.to_table + " has mismatched arity");
    for (const auto& a : k.from_attrs) from.require_column(a);
    for (const auto& a : k.to_attrs) to.require_column(a);
  }
}

ordered_json cell_to_json(const Cell& c) {
  if (auto s = std::get_if<std::string>(&c)) return *s;
  if (auto t = std::get_if<Stamp>(&c)) return ordered_json{{"ts", to_string(t->time)}, {"seq", t->seq}};
  return nullptr;
}

Cell cell_from_json(const json& j, ColumnKind kind) {
  if (j.is_null()) return std::monostate{};
  if (kind == ColumnKind::timestamp) {
    if (j.is_string()) return Stamp{parse_timestamp(j.get<std::string>()), 0};
    return Stamp{parse_timestamp(j.at("ts").get<std::string>()), j.value("seq", std::size_t{0})};
  }
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

namespace {

const char* kind_name(TableKind k) {
  switch (k) {
    case TableKind::event_type: return "event_type";
    case TableKind::multi_valued: return "multi_valued";
    case TableKind::entity: return "entity";
    case TableKind::derived: return "derived";
  }
  return "derived";
}

TableKind kind_from(const std::string& s) {
  if (s == "event_type") return TableKind::event_type;
  if (s == "multi_valued") return TableKind::multi_valued;
  if (s == "entity") return TableKind::entity;
  if (s == "derived") return TableKind::derived;
  throw ParseError(0, "unknown table kind '" + s + "'");
}

}  // namespace

ordered_json to_json(const Table& t) {
  ordered_json j;
  j["name"] = t.name;
  j["kind"] = kind_name(t.kind);
  if (!t.owner.empty()) j["owner"] = t.owner;
  j["columns"] = ordered_json::array();
  for (const auto& c : t.columns)
    j["columns"].push_back({{"name", c.name}, {"kind", c.kind == ColumnKind::timestamp ? "timestamp" : "data"}});
  j["rows"] = ordered_json::array();
  for (const auto& r : t.rows) {
    ordered_json row = ordered_json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) row[t.columns[i].name] = cell_to_json(r[i]);
    j["rows"].push_back(std::move(row));
  }
  return j;
}

Table table_from_json(const json& j) {
  Table t;
  t.name = j.at("name").get<std::string>();
  t.kind = kind_from(j.value("kind", std::string("derived")));
  t.owner = j.value("owner", std::string());
  for (const auto& c : j.at("columns")) {
    t.columns.push_back({c.at("name").get<std::string>(),
                         c.value("kind", std::string("data")) == "timestamp" ? ColumnKind::timestamp : ColumnKind::data});
  }
  for (const auto& r : j.at("rows")) {
    Row row;
    for (const auto& c : t.columns) row.push_back(r.contains(c.name) ? cell_from_json(r.at(c.name), c.kind) : Cell{});
    t.rows.push_back(std::move(row));
  }
  return t;
}

ordered_json to_json(const KeyLink& k) {
  return {{"from_table", k.from_table}, {"from", k.from_attrs}, {"to_table", k.to_table}, {"to", k.to_attrs}};
}

KeyLink key_link_from_json(const json& j) {
  return {j.at("from_table").get<std::string>(), j.at("from").get<std::vector<std::string>>(),
          j.at("to_table").get<std::string>(), j.at("to").get<std::vector<std::string>>()};
}

ordered_json to_json(const Database& db) {
  ordered_json j;
  j["tables"] = ordered_json::array();
  for (const auto& t : db.tables) j["tables"].push_back(to_json(t));
  j["key_relation"] = ordered_json::array();
  for (const auto& k : db.keys) j["key_relation"].push_back(to_json(k));
  return j;
}

Database database_from_json(const json& j) {
  Database db;
  for (const auto& t : j.at("tables")) db.tables.push_back(table_from_json(t));
  if (j.contains("key_relation"))
    for (const auto& k : j.at("key_relation")) db.keys.push_back(key_link_from_json(k));
  return db;
}

}  // namespace artimine
