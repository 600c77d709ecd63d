#include "artimine/artifact_view.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>

#include "artimine/error.hpp"

namespace artimine {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

std::string describe(const std::string& table, const std::vector<std::string>& attrs) {
  return table + ".{" + join(attrs, ",") + "}";
}

KeyLink reversed(const KeyLink& k) { return {k.to_table, k.to_attrs, k.from_table, k.from_attrs}; }

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

struct Joined {
  Table table;
  std::vector<std::size_t> origin;  // start-table row of each output row
};

std::string key_of(const Row& row, const std::vector<std::size_t>& cols, bool& has_null) {
  std::string k;
  has_null = false;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (is_null(row[cols[i]])) has_null = true;
    if (i) k.push_back('\x1f');
    k += cell_text(row[cols[i]]);
  }
  return k;
}

Joined join_tracked(const Database& db, const std::string& start, const KeyPath& p) {
  const Table& s = db.require(start);
  Joined out;
  out.table.name = start;
  out.table.kind = TableKind::derived;
  if (p.empty()) {
    out.table = s;
  } else {
    for (const auto& c : s.columns) out.table.columns.push_back({start + "." + c.name, c.kind});
    out.table.rows = s.rows;
  }
  out.origin.resize(s.rows.size());
  for (std::size_t i = 0; i < s.rows.size(); ++i) out.origin[i] = i;

  std::string current = start;
  for (const auto& link : p) {
    if (link.from_table != current && !out.table.has_column(link.from_table + "." + link.from_attrs.front()))
      throw UnpathableError("path step " + describe(link.from_table, link.from_attrs) + " does not continue from '" +
                            current + "'");
    if (link.from_attrs.size() != link.to_attrs.size())
      throw ValidationError("path step " + describe(link.from_table, link.from_attrs) + " has mismatched arity");
    const Table& t = db.require(link.to_table);
    std::vector<std::size_t> left, right;
    for (const auto& a : link.from_attrs) left.push_back(out.table.require_column(link.from_table + "." + a));
    for (const auto& a : link.to_attrs) right.push_back(t.require_column(a));

    std::unordered_map<std::string, std::vector<std::size_t>> index;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      bool null = false;
      auto k = key_of(t.rows[r], right, null);
      if (!null) index[k].push_back(r);
    }
    Joined next;
    next.table.name = out.table.name;
    next.table.kind = TableKind::derived;
    next.table.columns = out.table.columns;
    for (const auto& c : t.columns) next.table.columns.push_back({link.to_table + "." + c.name, c.kind});
    for (std::size_t r = 0; r < out.table.rows.size(); ++r) {
      bool null = false;
      auto k = key_of(out.table.rows[r], left, null);
      if (null) continue;
      auto it = index.find(k);
      if (it == index.end()) continue;
      for (auto tr : it->second) {
        Row row = out.table.rows[r];
        row.insert(row.end(), t.rows[tr].begin(), t.rows[tr].end());
        next.table.rows.push_back(std::move(row));
        next.origin.push_back(out.origin[r]);
      }
    }
    out = std::move(next);
    current = link.to_table;
  }
  return out;
}

}  // namespace

std::string to_string(SuggestionKind k) {
  switch (k) {
    case SuggestionKind::mandatory: return "mandatory";
    case SuggestionKind::promote: return "promote";
    case SuggestionKind::merge: return "merge";
  }
  return "merge";
}

std::vector<ArtifactSuggestion> suggest_artifacts(const ErModel& er) {
  std::vector<ArtifactSuggestion> top, rest;
  auto many_to_many = [&](const std::string& a, const std::string& b) {
    return std::any_of(er.foreign_keys.begin(), er.foreign_keys.end(), [&](const ForeignKey& fk) {
      return fk.multiplicity == Multiplicity::many_to_many &&
             ((fk.from_entity == a && fk.to_entity == b) || (fk.from_entity == b && fk.to_entity == a));
    });
  };
  for (const auto& e : er.entities) {
    if (e.tables.empty()) continue;
    ArtifactSuggestion s{e.name, SuggestionKind::mandatory, e.tables.size(), {}, ""};
    if (er.top_level.contains(e.name)) {
      s.reason = "top-level entity";
      top.push_back(std::move(s));
      continue;
    }
    for (const auto& t : er.top_level)
      if (!many_to_many(e.name, t)) s.merge_targets.push_back(t);
    s.kind = s.merge_targets.empty() || e.tables.size() > 1 ? SuggestionKind::promote : SuggestionKind::merge;
    s.reason = std::to_string(e.tables.size()) + " event type" + (e.tables.size() == 1 ? "" : "s") +
               (s.merge_targets.empty() ? "; no artifact may adopt it" : "");
    rest.push_back(std::move(s));
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [](const auto& a, const auto& b) { return a.event_types > b.event_types; });
  top.insert(top.end(), rest.begin(), rest.end());
  return top;
}

KeyPath path(const Database& db, const std::string& from_table, const std::vector<std::string>& from_attrs,
             const std::string& to_table, const std::vector<std::string>& to_attrs) {
  auto check = [&](const std::string& table, const std::vector<std::string>& attrs) {
    const Table* t = db.find(table);
    if (!t) throw UnpathableError("unknown table '" + table + "'");
    for (const auto& a : attrs)
      if (!t->has_column(a)) throw UnpathableError("table '" + table + "' has no attribute '" + a + "'");
  };
  check(from_table, from_attrs);
  check(to_table, to_attrs);
  if (from_table == to_table) return {};

  // adjacency with oriented links, first K entry per neighbour
  std::map<std::string, std::map<std::string, KeyLink>> adj;
  for (const auto& k : db.keys) {
    if (k.from_table == k.to_table) continue;
    adj[k.from_table].emplace(k.to_table, k);
    adj[k.to_table].emplace(k.from_table, reversed(k));
  }
  std::map<std::string, std::size_t> dist{{to_table, 0}};
  std::deque<std::string> queue{to_table};
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    for (const auto& [next, _] : adj[cur])
      if (!dist.contains(next)) {
        dist[next] = dist[cur] + 1;
        queue.push_back(next);
      }
  }
  if (!dist.contains(from_table))
    throw UnpathableError("no key path from " + describe(from_table, from_attrs) + " to " + describe(to_table, to_attrs));

  KeyPath p;
  std::string cur = from_table;
  while (cur != to_table) {
    for (const auto& [next, link] : adj[cur]) {  // map order = lexicographic
      auto it = dist.find(next);
      if (it != dist.end() && it->second + 1 == dist[cur]) {
        p.push_back(link);
        cur = next;
        break;
      }
    }
  }
  return p;
}

Table join_path(const Database& db, const std::string& start, const KeyPath& p) {
  return join_tracked(db, start, p).table;
}

ArtifactView build_view(const ErModel& er, const Database& db, const ViewConfig& config) {
  if (config.artifacts.empty()) throw ValidationError("no artifacts selected");
  ArtifactView view;
  std::map<std::string, std::string> adopted_by;
  std::set<std::string> names;

  for (const auto& sel : config.artifacts) {
    if (sel.name.empty()) throw ValidationError("artifact without a name");
    if (!names.insert(sel.name).second) throw ValidationError("duplicate artifact '" + sel.name + "'");
    Artifact a;
    a.name = sel.name;
    a.main = sel.main;
    a.identifier = er.entity(sel.main).identifier;
    a.members.push_back(sel.main);
    for (const auto& m : sel.members) {
      er.entity(m);
      if (!contains(a.members, m)) a.members.push_back(m);
    }
    for (const auto& m : a.members) {
      auto [it, inserted] = adopted_by.emplace(m, a.name);
      if (!inserted)
        throw ValidationError("entity '" + m + "' belongs to both '" + it->second + "' and '" + a.name + "'");
      if (m != a.main && er.top_level.contains(m))
        throw ValidationError("top-level entity '" + m + "' can only be the main entity of artifact '" + a.name +
                              "'" + (er.top_level.contains(a.main) ? " (it already has top-level '" + a.main + "')" : ""));
    }
    view.artifacts.push_back(std::move(a));
  }
  for (const auto& t : er.top_level)
    if (!adopted_by.contains(t)) throw ValidationError("top-level entity '" + t + "' is not covered by any artifact");
  for (const auto& e : er.entities)
    if (!adopted_by.contains(e.name)) view.warnings.push_back("entity '" + e.name + "' belongs to no artifact");

  for (const auto& a : view.artifacts) {
    auto& specs = view.specs[a.name];
    for (const auto& m : a.members) {
      const Table& t = db.require(m);
      for (const auto& ts : t.timestamp_columns()) {
        ExtractionSpec s{ts, m, ts, {}};
        if (auto o = config.path_overrides.find(ts); o != config.path_overrides.end()) {
          s.path = o->second;
          std::string cur = m;
          for (const auto& link : s.path) {
            bool in_k = std::any_of(db.keys.begin(), db.keys.end(), [&](const KeyLink& k) {
              return k == link || reversed(k) == link;
            });
            if (!in_k || link.from_table != cur)
              throw ValidationError("path override for '" + ts + "' uses a step outside the key relation: " +
                                    describe(link.from_table, link.from_attrs) + " -> " +
                                    describe(link.to_table, link.to_attrs));
            cur = link.to_table;
          }
          if (cur != a.main) throw ValidationError("path override for '" + ts + "' does not end at '" + a.main + "'");
        } else {
          try {
            s.path = path(db, m, {ts}, a.main, a.identifier);
          } catch (const UnpathableError& e) {
            throw UnpathableError("artifact '" + a.name + "', event type '" + ts + "': " + e.what());
          }
        }
        specs.push_back(std::move(s));
      }
    }
  }
  return view;
}

std::size_t LifecycleLog::event_count() const {
  std::size_t n = 0;
  for (const auto& c : cases) n += c.events.size();
  return n;
}

std::vector<InstanceAwareEvent> extract_events(const Database& db, const Artifact& artifact, const ExtractionSpec& spec,
                                               std::size_t* orphans) {
  auto joined = join_tracked(db, spec.table, spec.path);
  const Table& t = joined.table;
  bool qualified = !spec.path.empty();
  auto col = [&](const std::string& table, const std::string& attr) {
    return t.require_column(qualified ? table + "." + attr : attr);
  };
  auto ts = col(spec.table, spec.timestamp);
  std::vector<std::size_t> id;
  for (const auto& a : artifact.identifier) id.push_back(col(artifact.main, a));

  std::vector<InstanceAwareEvent> out;
  std::set<std::size_t> served;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (is_null(row[ts])) continue;
    if (std::any_of(id.begin(), id.end(), [&](std::size_t c) { return is_null(row[c]); })) continue;
    InstanceAwareEvent e{spec.event_type, std::get<Stamp>(row[ts]), {}};
    for (auto c : id) e.id.push_back(cell_text(row[c]));
    out.push_back(std::move(e));
    served.insert(joined.origin[r]);
  }
  if (orphans) {
    const Table& src = db.require(spec.table);
    auto sc = src.require_column(spec.timestamp);
    std::size_t n = 0;
    for (std::size_t r = 0; r < src.rows.size(); ++r)
      if (!is_null(src.rows[r][sc]) && !served.contains(r)) ++n;
    *orphans = n;
  }
  return out;
}

std::vector<LifecycleLog> extract_logs(const Database& db, const ArtifactView& view) {
  std::vector<LifecycleLog> logs;
  for (const auto& a : view.artifacts) {
    LifecycleLog log;
    log.artifact = a.name;
    log.identifier = a.identifier;
    std::map<std::vector<std::string>, std::size_t> case_of;
    std::vector<InstanceAwareEvent> all;
    auto it = view.specs.find(a.name);
    if (it != view.specs.end())
      for (const auto& spec : it->second) {
        std::size_t orphans = 0;
        auto events = extract_events(db, a, spec, &orphans);
        if (orphans) log.orphans[spec.event_type] += orphans;
        all.insert(all.end(), events.begin(), events.end());
      }
    std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.stamp < y.stamp; });
    for (auto& e : all) {
      auto [c, inserted] = case_of.emplace(e.id, log.cases.size());
      if (inserted) log.cases.push_back({e.id, {}});
      log.cases[c->second].events.push_back(std::move(e));
    }
    logs.push_back(std::move(log));
  }
  return logs;
}

std::string write_jsonl(const LifecycleLog& log) {
  std::string out;
  for (const auto& c : log.cases) {
    ordered_json line;
    line["id"] = ordered_json::object();
    for (std::size_t i = 0; i < log.identifier.size() && i < c.id.size(); ++i) line["id"][log.identifier[i]] = c.id[i];
    line["events"] = ordered_json::array();
    for (const auto& e : c.events)
      line["events"].push_back({{"type", e.type}, {"ts", to_string(e.stamp.time)}, {"seq", e.stamp.seq}});
    out += line.dump() + "\n";
  }
  return out;
}

LifecycleLog read_jsonl(const std::string& text, const std::string& artifact) {
  LifecycleLog log;
  log.artifact = artifact;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, e.what());
    }
    try {
      ArtifactCase c;
      AttributeSet ident;
      for (const auto& [k, v] : j.at("id").items()) {
        ident.push_back(k);
        c.id.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
      if (log.cases.empty()) log.identifier = ident;
      else if (ident != log.identifier) throw ParseError(lineno, "case identifier attributes differ from the first case");
      for (const auto& e : j.at("events")) {
        InstanceAwareEvent ev;
        ev.type = e.at("type").get<std::string>();
        ev.stamp.time = e.contains("ts") ? parse_timestamp(e.at("ts").get<std::string>()) : Timestamp{};
        ev.stamp.seq = e.value("seq", std::size_t{0});
        ev.id = c.id;
        c.events.push_back(std::move(ev));
      }
      log.cases.push_back(std::move(c));
    } catch (const ParseError& e) {
      if (e.line()) throw;
      throw ParseError(lineno, e.what());
    } catch (const json::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return log;
}

std::vector<std::vector<std::string>> traces(const LifecycleLog& log) {
  std::vector<std::vector<std::string>> out;
  for (const auto& c : log.cases) {
    std::vector<std::string> t;
    for (const auto& e : c.events) t.push_back(e.type);
    out.push_back(std::move(t));
  }
  return out;
}

ordered_json to_json(const ArtifactView& view) {
  ordered_json j;
  j["artifacts"] = ordered_json::array();
  for (const auto& a : view.artifacts) {
    ordered_json specs = ordered_json::array();
    if (auto it = view.specs.find(a.name); it != view.specs.end())
      for (const auto& s : it->second) {
        ordered_json p = ordered_json::array();
        for (const auto& link : s.path) p.push_back(to_json(link));
        specs.push_back({{"event_type", s.event_type}, {"table", s.table}, {"timestamp", s.timestamp}, {"path", p}});
      }
    j["artifacts"].push_back({{"name", a.name},
                              {"main", a.main},
                              {"members", a.members},
                              {"identifier", a.identifier},
                              {"event_types", specs}});
  }
  j["warnings"] = view.warnings;
  return j;
}

}  // namespace artimine
