#include "artimine/schema.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "artimine/error.hpp"

namespace artimine {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr char kSep = '\x1f';

// Data columns of a table re-encoded as small integers, null included.
struct EncodedColumns {
  std::vector<std::string> names;
  std::vector<std::vector<int>> values;  // [column][row]
};

EncodedColumns encode(const Table& table) {
  EncodedColumns enc;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (table.columns[c].kind != ColumnKind::data) continue;
    enc.names.push_back(table.columns[c].name);
    std::map<std::string, int> ids;
    std::vector<int> col;
    col.reserve(table.rows.size());
    for (const auto& row : table.rows) {
      if (is_null(row[c])) {
        col.push_back(-1);
        continue;
      }
      auto [it, _] = ids.emplace(cell_text(row[c]), static_cast<int>(ids.size()));
      col.push_back(it->second);
    }
    enc.values.push_back(std::move(col));
  }
  return enc;
}

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = v.size();
    for (int x : v) h ^= std::hash<int>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

bool distinguishing(const EncodedColumns& enc, const std::vector<std::size_t>& cols, std::size_t rows) {
  std::unordered_map<std::vector<int>, std::size_t, VecHash> first;
  std::vector<int> key(cols.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < cols.size(); ++i) key[i] = enc.values[cols[i]][r];
    auto [it, inserted] = first.emplace(key, r);
    if (inserted) continue;
    for (const auto& column : enc.values)
      if (column[r] != column[it->second]) return false;
  }
  return true;
}

bool is_subset(const AttributeSet& small, const AttributeSet& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

std::string row_key(const Table&, const Row& row, const std::vector<std::size_t>& cols) {
  std::string k;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) k.push_back(kSep);
    k += is_null(row[cols[i]]) ? std::string("\x1e") : cell_text(row[cols[i]]);
  }
  return k;
}

std::vector<std::size_t> indices_of(const Table& t, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& n : names) out.push_back(t.require_column(n));
  return out;
}

bool any_null(const Row& row, const std::vector<std::size_t>& cols) {
  return std::any_of(cols.begin(), cols.end(), [&](std::size_t c) { return is_null(row[c]); });
}

std::size_t first_seq(const Table& t) {
  std::size_t best = SIZE_MAX;
  for (const auto& row : t.rows)
    for (const auto& cell : row)
      if (auto s = std::get_if<Stamp>(&cell)) best = std::min(best, s->seq);
  return best;
}

}  // namespace

bool is_distinguishing(const Table& table, const AttributeSet& attrs) {
  auto enc = encode(table);
  std::vector<std::size_t> cols;
  for (const auto& a : attrs) {
    auto it = std::find(enc.names.begin(), enc.names.end(), a);
    if (it == enc.names.end()) return false;
    cols.push_back(static_cast<std::size_t>(it - enc.names.begin()));
  }
  return distinguishing(enc, cols, table.rows.size());
}

std::vector<AttributeSet> discover_keys(const Table& table, std::size_t max_arity) {
  auto enc = encode(table);
  // Canonical (sorted) column order so that emitted sets are sorted.
  std::vector<std::size_t> order(enc.names.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return enc.names[a] < enc.names[b]; });

  std::vector<AttributeSet> keys;
  const std::size_t n = order.size();
  for (std::size_t k = 0; k <= std::min(max_arity, n); ++k) {
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    for (;;) {
      AttributeSet set;
      std::vector<std::size_t> cols;
      for (auto p : pick) {
        set.push_back(enc.names[order[p]]);
        cols.push_back(order[p]);
      }
      bool pruned = std::any_of(keys.begin(), keys.end(), [&](const AttributeSet& key) { return is_subset(key, set); });
      if (!pruned && distinguishing(enc, cols, table.rows.size())) keys.push_back(std::move(set));

      // next combination
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    if (!keys.empty() && keys.front().empty()) break;
  }
  return keys;
}

AttributeSet select_primary_key(const std::string& table, const std::vector<AttributeSet>& keys,
                                const std::optional<AttributeSet>& hint) {
  if (hint) {
    auto h = *hint;
    std::sort(h.begin(), h.end());
    return h;
  }
  const AttributeSet* best = nullptr;
  for (const auto& k : keys) {
    if (k.empty()) continue;
    if (!best || k.size() < best->size() || (k.size() == best->size() && k < *best)) best = &k;
  }
  if (!best) throw UnresolvedKeyError(table);
  return *best;
}

std::string identifier_label(const AttributeSet& identifier) { return join(identifier, ","); }

EntityGrouping group_entities(const Database& db, const SchemaConfig& config) {
  EntityGrouping g;
  std::map<AttributeSet, std::size_t> by_key;
  for (const auto& t : db.tables) {
    if (t.kind != TableKind::event_type) continue;
    auto keys = discover_keys(t, config.max_arity);
    g.keys[t.name] = keys;

    std::optional<AttributeSet> hint;
    if (auto it = config.key_hints.find(t.name); it != config.key_hints.end()) {
      AttributeSet h = it->second;
      std::sort(h.begin(), h.end());
      for (const auto& a : h) {
        auto idx = t.column_index(a);
        if (!idx || t.columns[*idx].kind != ColumnKind::data)
          throw ValidationError("key hint for '" + t.name + "' names unknown data attribute '" + a + "'");
      }
      if (h.empty() || !is_distinguishing(t, h))
        throw ValidationError("key hint {" + join(h, ",") + "} for '" + t.name + "' conflicts with the data");
      hint = h;
    }

    AttributeSet pk;
    try {
      pk = select_primary_key(t.name, keys, hint);
    } catch (const UnresolvedKeyError&) {
      std::string reason = keys.empty() ? "no key found" : "only the empty key holds; supply a key hint";
      g.unassigned.push_back({t.name, reason});
      continue;
    }
    g.primary_keys[t.name] = pk;
    auto [it, inserted] = by_key.emplace(pk, g.entities.size());
    if (inserted) {
      Entity e;
      e.identifier = pk;
      auto label = identifier_label(pk);
      auto name = config.entity_names.find(label);
      e.name = name != config.entity_names.end() ? name->second : join(pk, "_");
      g.entities.push_back(std::move(e));
    }
    g.entities[it->second].tables.push_back(t.name);
  }
  return g;
}

Database normalize_side_tables(const Database& db, const EntityGrouping& grouping) {
  Database out;
  for (const auto& t : db.tables) {
    auto pk = grouping.primary_keys.find(t.owner);
    if (t.kind != TableKind::multi_valued || pk == grouping.primary_keys.end()) {
      out.tables.push_back(t);
      continue;
    }
    Table side;
    side.name = t.name;
    side.kind = t.kind;
    side.owner = t.owner;
    std::vector<std::size_t> keep = indices_of(t, pk->second);
    keep.push_back(t.columns.size() - 1);
    for (auto c : keep) side.columns.push_back(t.columns[c]);
    for (const auto& row : t.rows) {
      Row r;
      for (auto c : keep) r.push_back(row[c]);
      side.rows.push_back(std::move(r));
    }
    out.tables.push_back(std::move(side));
  }
  for (const auto& k : db.keys) {
    const Table* from = db.find(k.from_table);
    auto pk = from ? grouping.primary_keys.find(from->owner) : grouping.primary_keys.end();
    if (from && from->kind == TableKind::multi_valued && from->owner == k.to_table && pk != grouping.primary_keys.end())
      out.keys.push_back({k.from_table, pk->second, k.to_table, pk->second});
    else
      out.keys.push_back(k);
  }
  return out;
}

Table merge_entity_table(const Database& db, const Entity& entity) {
  std::vector<const Table*> tables;
  for (const auto& name : entity.tables) tables.push_back(&db.require(name));
  std::stable_sort(tables.begin(), tables.end(), [](auto a, auto b) { return first_seq(*a) < first_seq(*b); });

  // identifier values in order of first occurrence
  std::vector<std::string> ids;
  std::map<std::string, Row> id_cells;
  std::map<std::string, std::size_t> id_seq;
  for (auto t : tables) {
    auto cols = indices_of(*t, entity.identifier);
    for (const auto& row : t->rows) {
      auto k = row_key(*t, row, cols);
      std::size_t seq = SIZE_MAX;
      for (const auto& cell : row)
        if (auto s = std::get_if<Stamp>(&cell)) seq = std::min(seq, s->seq);
      if (!id_cells.contains(k)) {
        Row cells;
        for (auto c : cols) cells.push_back(row[c]);
        id_cells[k] = std::move(cells);
        id_seq[k] = seq;
        ids.push_back(k);
      } else {
        id_seq[k] = std::min(id_seq[k], seq);
      }
    }
  }
  std::stable_sort(ids.begin(), ids.end(), [&](const auto& a, const auto& b) { return id_seq[a] < id_seq[b]; });
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < ids.size(); ++i) row_of[ids[i]] = i;

  // non-key data attributes and whether they conflict
  std::vector<std::string> attrs;
  std::map<std::string, std::vector<const Table*>> holders;
  for (auto t : tables)
    for (const auto& c : t->columns) {
      if (c.kind != ColumnKind::data) continue;
      if (std::find(entity.identifier.begin(), entity.identifier.end(), c.name) != entity.identifier.end()) continue;
      if (!holders.contains(c.name)) attrs.push_back(c.name);
      holders[c.name].push_back(t);
    }
  std::map<std::string, bool> conflicting;
  for (const auto& a : attrs) {
    std::map<std::string, std::string> seen;
    bool conflict = false;
    for (auto t : holders[a]) {
      auto cols = indices_of(*t, entity.identifier);
      auto ac = t->require_column(a);
      for (const auto& row : t->rows) {
        if (is_null(row[ac])) continue;
        auto [it, inserted] = seen.emplace(row_key(*t, row, cols), cell_text(row[ac]));
        if (!inserted && it->second != cell_text(row[ac])) conflict = true;
      }
    }
    conflicting[a] = conflict;
  }

  Table out;
  out.name = entity.name;
  out.kind = TableKind::entity;
  for (const auto& a : entity.identifier) out.columns.push_back({a, ColumnKind::data});
  // (output column, source table, source column)
  struct Source {
    std::size_t out_col;
    const Table* table;
    std::size_t col;
  };
  std::vector<Source> sources;
  for (const auto& a : attrs) {
    if (!conflicting[a]) {
      std::size_t oc = out.columns.size();
      out.columns.push_back({a, ColumnKind::data});
      for (auto t : holders[a]) sources.push_back({oc, t, t->require_column(a)});
    } else {
      for (auto t : holders[a]) {
        sources.push_back({out.columns.size(), t, t->require_column(a)});
        out.columns.push_back({t->name + "." + a, ColumnKind::data});
      }
    }
  }
  for (auto t : tables)
    for (std::size_t c = 0; c < t->columns.size(); ++c)
      if (t->columns[c].kind == ColumnKind::timestamp) {
        sources.push_back({out.columns.size(), t, c});
        out.columns.push_back(t->columns[c]);
      }

  out.rows.assign(ids.size(), Row(out.columns.size()));
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t c = 0; c < entity.identifier.size(); ++c) out.rows[i][c] = id_cells[ids[i]][c];
  for (const auto& s : sources) {
    auto cols = indices_of(*s.table, entity.identifier);
    for (const auto& row : s.table->rows) {
      if (is_null(row[s.col])) continue;
      out.rows[row_of[row_key(*s.table, row, cols)]][s.out_col] = row[s.col];
    }
  }
  return out;
}

double name_similarity(const std::string& a, const std::string& b) {
  if (a == b) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  auto x = lower(a), y = lower(b);
  std::vector<std::vector<int>> lcs(x.size() + 1, std::vector<int>(y.size() + 1, 0));
  for (std::size_t i = 1; i <= x.size(); ++i)
    for (std::size_t j = 1; j <= y.size(); ++j)
      lcs[i][j] = x[i - 1] == y[j - 1] ? lcs[i - 1][j - 1] + 1 : std::max(lcs[i - 1][j], lcs[i][j - 1]);
  double r = 2.0 * lcs[x.size()][y.size()] / static_cast<double>(x.size() + y.size());
  return std::min(r, 0.99);
}

std::vector<FkCandidate> discover_inclusion_deps(const std::vector<Entity>& entities,
                                                 const std::map<std::string, Table>& entity_tables) {
  std::vector<FkCandidate> out;
  for (const auto& dst : entities) {
    const auto& dt = entity_tables.at(dst.name);
    auto dcols = indices_of(dt, dst.identifier);
    std::set<std::string> ids;
    for (const auto& row : dt.rows)
      if (!any_null(row, dcols)) ids.insert(row_key(dt, row, dcols));
    if (ids.empty()) continue;
    const std::size_t k = dst.identifier.size();

    for (const auto& src : entities) {
      if (src.name == dst.name) continue;
      const auto& st = entity_tables.at(src.name);
      auto data = st.data_columns();
      if (data.size() < k || (k > 1 && data.size() > 10)) continue;

      // ordered k-tuples of distinct data columns
      std::vector<std::size_t> idx(k, 0);
      std::function<void(std::size_t, std::vector<std::string>&)> rec = [&](std::size_t depth,
                                                                             std::vector<std::string>& tuple) {
        if (depth == k) {
          auto scols = indices_of(st, tuple);
          std::set<std::string> values;
          for (const auto& row : st.rows)
            if (!any_null(row, scols)) values.insert(row_key(st, row, scols));
          if (values.empty()) return;
          if (!std::includes(ids.begin(), ids.end(), values.begin(), values.end())) return;
          double sim = 0;
          for (std::size_t i = 0; i < k; ++i) sim += name_similarity(tuple[i], dst.identifier[i]);
          out.push_back({src.name, tuple, dst.name, dst.identifier,
                         static_cast<double>(values.size()) / static_cast<double>(ids.size()), sim / k});
          return;
        }
        for (const auto& c : data) {
          if (std::find(tuple.begin(), tuple.end(), c) != tuple.end()) continue;
          tuple.push_back(c);
          rec(depth + 1, tuple);
          tuple.pop_back();
        }
      };
      std::vector<std::string> tuple;
      rec(0, tuple);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const FkCandidate& a, const FkCandidate& b) {
    if (a.coverage != b.coverage) return a.coverage > b.coverage;
    if (a.name_similarity != b.name_similarity) return a.name_similarity > b.name_similarity;
    return std::tie(a.from_entity, a.from_attrs, a.to_entity) < std::tie(b.from_entity, b.from_attrs, b.to_entity);
  });
  return out;
}

std::string to_string(Multiplicity m) {
  switch (m) {
    case Multiplicity::one_to_one: return "1-1";
    case Multiplicity::one_to_many: return "1-n";
    case Multiplicity::many_to_one: return "n-1";
    case Multiplicity::many_to_many: return "n-m";
  }
  return "n-m";
}

Multiplicity multiplicity_from_string(const std::string& s) {
  if (s == "1-1") return Multiplicity::one_to_one;
  if (s == "1-n") return Multiplicity::one_to_many;
  if (s == "n-1") return Multiplicity::many_to_one;
  if (s == "n-m") return Multiplicity::many_to_many;
  throw ParseError(0, "unknown multiplicity '" + s + "'");
}

Multiplicity multiplicity(const Table& from, const std::vector<std::string>& from_attrs, const Table& to,
                          const std::vector<std::string>& to_attrs, const std::vector<std::string>& from_instance_key) {
  auto fcols = indices_of(from, from_attrs);
  auto tcols = indices_of(to, to_attrs);
  std::vector<std::size_t> icols = from_instance_key.empty() ? std::vector<std::size_t>{} : indices_of(from, from_instance_key);

  std::map<std::string, std::vector<std::size_t>> targets_by_value;
  for (std::size_t r = 0; r < to.rows.size(); ++r)
    if (!any_null(to.rows[r], tcols)) targets_by_value[row_key(to, to.rows[r], tcols)].push_back(r);

  std::map<std::string, std::set<std::size_t>> targets_of_source;
  std::map<std::size_t, std::set<std::string>> sources_of_target;
  for (std::size_t r = 0; r < from.rows.size(); ++r) {
    const auto& row = from.rows[r];
    if (any_null(row, fcols)) continue;
    auto it = targets_by_value.find(row_key(from, row, fcols));
    if (it == targets_by_value.end()) continue;
    std::string inst = icols.empty() ? std::to_string(r) : row_key(from, row, icols);
    for (auto t : it->second) {
      targets_of_source[inst].insert(t);
      sources_of_target[t].insert(inst);
    }
  }
  bool many_sources = std::any_of(sources_of_target.begin(), sources_of_target.end(),
                                  [](const auto& e) { return e.second.size() > 1; });
  bool many_targets = std::any_of(targets_of_source.begin(), targets_of_source.end(),
                                  [](const auto& e) { return e.second.size() > 1; });
  if (many_sources && many_targets) return Multiplicity::many_to_many;
  if (many_sources) return Multiplicity::many_to_one;
  if (many_targets) return Multiplicity::one_to_many;
  return Multiplicity::one_to_one;
}

std::pair<std::string, std::vector<std::string>> parse_qualified(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == text.size())
    throw ValidationError("expected Entity.Attribute, got '" + text + "'");
  std::string entity = text.substr(0, dot);
  std::string rest = text.substr(dot + 1);
  std::vector<std::string> attrs;
  if (rest.front() == '(' && rest.back() == ')') {
    std::stringstream ss(rest.substr(1, rest.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto b = item.find_first_not_of(' ');
      auto e = item.find_last_not_of(' ');
      if (b == std::string::npos) throw ValidationError("empty attribute in '" + text + "'");
      attrs.push_back(item.substr(b, e - b + 1));
    }
  } else {
    attrs.push_back(rest);
  }
  return {entity, attrs};
}

const Entity& ErModel::entity(const std::string& name) const {
  for (const auto& e : entities)
    if (e.name == name) return e;
  throw ValidationError("unknown entity '" + name + "'");
}

const Table& ErModel::table(const std::string& name) const {
  auto it = tables.find(name);
  if (it == tables.end()) throw ValidationError("unknown entity '" + name + "'");
  return it->second;
}

namespace {

// Instances of `to` identified by each instance of `from` over one foreign
// key (in either direction).
std::map<std::string, std::set<std::string>> identified(const ErModel& er, const ForeignKey& fk,
                                                        const std::string& from, const std::string& to) {
  const auto& ft = er.table(from);
  const auto& tt = er.table(to);
  auto fid = indices_of(ft, er.entity(from).identifier);
  auto tid = indices_of(tt, er.entity(to).identifier);
  std::map<std::string, std::set<std::string>> out;

  if (fk.from_entity == from && fk.to_entity == to) {
    auto fa = indices_of(ft, fk.from_attrs);
    auto ta = indices_of(tt, fk.to_attrs);
    std::map<std::string, std::vector<std::string>> by_value;
    for (const auto& row : tt.rows)
      if (!any_null(row, ta)) by_value[row_key(tt, row, ta)].push_back(row_key(tt, row, tid));
    for (const auto& row : ft.rows) {
      auto& slot = out[row_key(ft, row, fid)];
      if (any_null(row, fa)) continue;
      if (auto it = by_value.find(row_key(ft, row, fa)); it != by_value.end()) slot.insert(it->second.begin(), it->second.end());
    }
  } else {
    // fk points from `to` into `from`
    auto fa = indices_of(ft, fk.to_attrs);
    auto ta = indices_of(tt, fk.from_attrs);
    std::map<std::string, std::vector<std::string>> by_value;
    for (const auto& row : tt.rows)
      if (!any_null(row, ta)) by_value[row_key(tt, row, ta)].push_back(row_key(tt, row, tid));
    for (const auto& row : ft.rows) {
      auto& slot = out[row_key(ft, row, fid)];
      if (any_null(row, fa)) continue;
      if (auto it = by_value.find(row_key(ft, row, fa)); it != by_value.end()) slot.insert(it->second.begin(), it->second.end());
    }
  }
  return out;
}

bool uniquely_identifies(const ErModel& er, const std::string& from, const std::string& to) {
  bool related = false;
  for (const auto& fk : er.foreign_keys) {
    bool forward = fk.from_entity == from && fk.to_entity == to;
    bool backward = fk.from_entity == to && fk.to_entity == from;
    if (!forward && !backward) continue;
    related = true;
    for (const auto& [inst, targets] : identified(er, fk, from, to))
      if (targets.size() > 1) return false;
  }
  return related;
}

// BFS tree over uniquely-identifying hops: parent links per reached entity.
std::map<std::string, std::string> horizon_tree(const ErModel& er, const std::string& root) {
  std::map<std::string, std::string> parent;
  std::deque<std::string> queue{root};
  parent[root] = root;
  std::vector<std::string> names;
  for (const auto& e : er.entities) names.push_back(e.name);
  std::sort(names.begin(), names.end());
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    for (const auto& next : names) {
      if (parent.contains(next) || !uniquely_identifies(er, cur, next)) continue;
      parent[next] = cur;
      queue.push_back(next);
    }
  }
  return parent;
}

std::map<std::string, std::string> direct_mapping(const ErModel& er, const std::string& from, const std::string& to) {
  std::map<std::string, std::string> out;
  for (const auto& fk : er.foreign_keys) {
    bool forward = fk.from_entity == from && fk.to_entity == to;
    bool backward = fk.from_entity == to && fk.to_entity == from;
    if (!forward && !backward) continue;
    for (const auto& [inst, targets] : identified(er, fk, from, to))
      if (targets.size() == 1 && !out.contains(inst)) out[inst] = *targets.begin();
  }
  return out;
}

}  // namespace

std::map<std::string, std::set<std::string>> logical_horizon(const ErModel& er, std::vector<std::string>* warnings) {
  std::map<std::string, std::set<std::string>> h;
  for (const auto& e : er.entities) {
    auto& set = h[e.name];
    for (const auto& [name, parent] : horizon_tree(er, e.name))
      if (name != e.name) set.insert(name);
    if (warnings && !set.empty() && er.table(e.name).rows.size() < 3)
      warnings->push_back("horizon of '" + e.name + "' rests on fewer than 3 instances");
  }
  return h;
}

std::map<std::string, std::string> instance_mapping(const ErModel& er, const std::string& from, const std::string& to) {
  auto parent = horizon_tree(er, from);
  if (!parent.contains(to) || from == to) return {};
  std::vector<std::string> path{to};
  while (path.back() != from) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());

  std::map<std::string, std::string> mapping;
  const auto& ft = er.table(from);
  auto fid = indices_of(ft, er.entity(from).identifier);
  for (const auto& row : ft.rows) {
    auto k = row_key(ft, row, fid);
    mapping[k] = k;
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    auto hop = direct_mapping(er, path[i], path[i + 1]);
    std::map<std::string, std::string> next;
    for (const auto& [src, cur] : mapping)
      if (auto it = hop.find(cur); it != hop.end()) next[src] = it->second;
    mapping = std::move(next);
  }
  return mapping;
}

std::map<std::string, Timestamp> creation_times(const ErModel& er, const std::string& entity) {
  const auto& t = er.table(entity);
  auto id = indices_of(t, er.entity(entity).identifier);
  std::map<std::string, Timestamp> out;
  for (const auto& row : t.rows) {
    std::optional<Timestamp> best;
    for (const auto& cell : row)
      if (auto s = std::get_if<Stamp>(&cell))
        if (!best || s->time < *best) best = s->time;
    if (best) out[row_key(t, row, id)] = *best;
  }
  return out;
}

bool precedes(const ErModel& er, const std::string& earlier, const std::string& later) {
  if (earlier == later) return false;
  auto mapping = instance_mapping(er, later, earlier);
  if (mapping.empty()) return false;
  auto created_later = creation_times(er, later);
  auto created_earlier = creation_times(er, earlier);
  for (const auto& [late_inst, early_inst] : mapping) {
    auto a = created_earlier.find(early_inst);
    auto b = created_later.find(late_inst);
    if (a == created_earlier.end() || b == created_later.end()) return false;
    if (!(a->second < b->second)) return false;
  }
  return true;
}

std::set<std::string> top_level_entities(const ErModel& er) {
  std::set<std::string> out;
  for (const auto& e : er.entities) {
    bool preceded = std::any_of(er.entities.begin(), er.entities.end(),
                                [&](const Entity& other) { return precedes(er, other.name, e.name); });
    if (!preceded) out.insert(e.name);
  }
  return out;
}

ErModel build_er_model(const Database& db, const DiscoveryConfig& config) {
  auto grouping = group_entities(db, config.schema);
  auto normalized = normalize_side_tables(db, grouping);

  ErModel er;
  er.entities = grouping.entities;
  er.primary_keys = grouping.primary_keys;
  er.unassigned = grouping.unassigned;
  for (const auto& e : er.entities) er.tables.emplace(e.name, merge_entity_table(normalized, e));
  er.candidates = discover_inclusion_deps(er.entities, er.tables);

  if (config.foreign_keys) {
    for (const auto& sel : *config.foreign_keys) {
      const auto& ft = er.table(sel.from_entity);
      const auto& tt = er.table(sel.to_entity);
      for (const auto& a : sel.from_attrs) ft.require_column(a);
      for (const auto& a : sel.to_attrs) tt.require_column(a);
      if (sel.from_attrs.size() != sel.to_attrs.size())
        throw ValidationError("foreign key " + sel.from_entity + " -> " + sel.to_entity + " has mismatched arity");
      bool known = std::any_of(er.candidates.begin(), er.candidates.end(), [&](const FkCandidate& c) {
        return c.from_entity == sel.from_entity && c.from_attrs == sel.from_attrs && c.to_entity == sel.to_entity &&
               c.to_attrs == sel.to_attrs;
      });
      if (!known)
        er.warnings.push_back("accepted foreign key " + sel.from_entity + "." + join(sel.from_attrs, ",") + " -> " +
                              sel.to_entity + "." + join(sel.to_attrs, ",") + " is not an inclusion dependency of the data");
      er.foreign_keys.push_back({sel.from_entity, sel.from_attrs, sel.to_entity, sel.to_attrs,
                                 multiplicity(ft, sel.from_attrs, tt, sel.to_attrs)});
    }
  } else {
    for (const auto& c : er.candidates) {
      if (c.name_similarity < 1.0) continue;
      er.foreign_keys.push_back({c.from_entity, c.from_attrs, c.to_entity, c.to_attrs,
                                 multiplicity(er.table(c.from_entity), c.from_attrs, er.table(c.to_entity), c.to_attrs)});
    }
  }
  er.horizon = logical_horizon(er, &er.warnings);
  er.top_level = top_level_entities(er);
  return er;
}

Database entity_database(const ErModel& er) {
  Database db;
  for (const auto& e : er.entities) db.tables.push_back(er.table(e.name));
  for (const auto& fk : er.foreign_keys) db.keys.push_back({fk.from_entity, fk.from_attrs, fk.to_entity, fk.to_attrs});
  return db;
}

ordered_json to_json(const ErModel& er) {
  ordered_json j;
  j["entities"] = ordered_json::array();
  for (const auto& e : er.entities) {
    ordered_json horizon = ordered_json::array();
    if (auto it = er.horizon.find(e.name); it != er.horizon.end())
      for (const auto& h : it->second) horizon.push_back(h);
    j["entities"].push_back({{"name", e.name},
                             {"identifier", e.identifier},
                             {"event_types", e.tables},
                             {"horizon", horizon},
                             {"top_level", er.top_level.contains(e.name)}});
  }
  j["primary_keys"] = ordered_json::object();
  for (const auto& [t, k] : er.primary_keys) j["primary_keys"][t] = k;
  j["unassigned"] = ordered_json::array();
  for (const auto& u : er.unassigned) j["unassigned"].push_back({{"table", u.table}, {"reason", u.reason}});
  j["foreign_keys"] = ordered_json::array();
  for (const auto& fk : er.foreign_keys)
    j["foreign_keys"].push_back({{"from_entity", fk.from_entity},
                                 {"from", fk.from_attrs},
                                 {"to_entity", fk.to_entity},
                                 {"to", fk.to_attrs},
                                 {"multiplicity", to_string(fk.multiplicity)}});
  j["candidates"] = ordered_json::array();
  for (const auto& c : er.candidates)
    j["candidates"].push_back({{"from_entity", c.from_entity},
                               {"from", c.from_attrs},
                               {"to_entity", c.to_entity},
                               {"to", c.to_attrs},
                               {"coverage", c.coverage},
                               {"name_similarity", c.name_similarity}});
  j["top_level"] = er.top_level;
  j["warnings"] = er.warnings;
  j["tables"] = ordered_json::array();
  for (const auto& e : er.entities) j["tables"].push_back(to_json(er.table(e.name)));
  return j;
}

ErModel er_model_from_json(const json& j) {
  ErModel er;
  for (const auto& e : j.at("entities")) {
    Entity ent{e.at("name").get<std::string>(), e.at("identifier").get<AttributeSet>(),
               e.at("event_types").get<std::vector<std::string>>()};
    er.horizon[ent.name] = e.value("horizon", std::set<std::string>{});
    if (e.value("top_level", false)) er.top_level.insert(ent.name);
    er.entities.push_back(std::move(ent));
  }
  if (j.contains("primary_keys"))
    for (const auto& [t, k] : j.at("primary_keys").items()) er.primary_keys[t] = k.get<AttributeSet>();
  if (j.contains("unassigned"))
    for (const auto& u : j.at("unassigned"))
      er.unassigned.push_back({u.at("table").get<std::string>(), u.at("reason").get<std::string>()});
  for (const auto& fk : j.at("foreign_keys"))
    er.foreign_keys.push_back({fk.at("from_entity").get<std::string>(), fk.at("from").get<std::vector<std::string>>(),
                               fk.at("to_entity").get<std::string>(), fk.at("to").get<std::vector<std::string>>(),
                               multiplicity_from_string(fk.at("multiplicity").get<std::string>())});
  if (j.contains("candidates"))
    for (const auto& c : j.at("candidates"))
      er.candidates.push_back({c.at("from_entity").get<std::string>(), c.at("from").get<std::vector<std::string>>(),
                               c.at("to_entity").get<std::string>(), c.at("to").get<std::vector<std::string>>(),
                               c.at("coverage").get<double>(), c.at("name_similarity").get<double>()});
  if (j.contains("warnings")) er.warnings = j.at("warnings").get<std::vector<std::string>>();
  for (const auto& t : j.at("tables")) {
    auto table = table_from_json(t);
    er.tables.emplace(table.name, std::move(table));
  }
  for (const auto& e : er.entities) er.table(e.name);
  return er;
}

std::string candidate_report(const ErModel& er) {
  std::ostringstream out;
  out << "Candidate foreign keys (ranked):\n";
  if (er.candidates.empty()) {
    out << "  (none)\n";
    return out.str();
  }
  std::size_t rank = 0;
  for (const auto& c : er.candidates) {
    bool accepted = std::any_of(er.foreign_keys.begin(), er.foreign_keys.end(), [&](const ForeignKey& fk) {
      return fk.from_entity == c.from_entity && fk.from_attrs == c.from_attrs && fk.to_entity == c.to_entity &&
             fk.to_attrs == c.to_attrs;
    });
    char buf[64];
    std::snprintf(buf, sizeof buf, "coverage %.2f  similarity %.2f", c.coverage, c.name_similarity);
    out << "  " << ++rank << ". " << c.from_entity << "." << join(c.from_attrs, ",") << " -> " << c.to_entity << "."
        << join(c.to_attrs, ",") << "  " << buf << (accepted ? "  [accepted]" : "") << "\n";
  }
  return out.str();
}

}  // namespace artimine
