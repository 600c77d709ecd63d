#include "artimine/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

#include "artimine/database.hpp"
#include "artimine/error.hpp"
#include "artimine/gsm.hpp"
#include "artimine/miner.hpp"
#include "artimine/net_generator.hpp"
#include "artimine/net_io.hpp"
#include "artimine/pn2gsm.hpp"

namespace artimine {

using nlohmann::json;

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(file.parent_path(), ec);
  }
  std::ofstream out(file, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + file.string());
}

std::string file_stem(const std::string& name) {
  std::string out;
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (i && std::islower(static_cast<unsigned char>(name[i - 1]))) out += '_';
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (std::isalnum(static_cast<unsigned char>(c))) {
      out += c;
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  return out;
}

namespace {

json parse_json_file(const fs::path& file) {
  auto text = read_file(file);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, file.string() + ": " + e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

ForeignKeySelection parse_fk(const std::string& text) {
  auto arrow = text.find("->");
  if (arrow == std::string::npos) throw ValidationError("foreign key '" + text + "' lacks '->'");
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto [fe, fa] = parse_qualified(trim(text.substr(0, arrow)));
  auto [te, ta] = parse_qualified(trim(text.substr(arrow + 2)));
  return {fe, fa, te, ta};
}

// strips ".net.json", ".jsonl", ".pnml" and similar
std::string stem_of(const fs::path& p) {
  auto name = p.filename().string();
  for (const char* suffix : {".net.json", ".gsm.json", ".jsonl", ".json", ".pnml"})
    if (name.size() > std::string(suffix).size() && name.ends_with(suffix))
      return name.substr(0, name.size() - std::string(suffix).size());
  return p.stem().string();
}

void warn_all(std::ostream& log, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) log << "warning: " << w << "\n";
}

}  // namespace

PipelineConfig config_from_json(const json& j, const fs::path& base) {
  PipelineConfig c;
  try {
    if (j.contains("log")) c.log = resolve(base, j.at("log").get<std::string>());
    if (j.contains("format")) {
      auto f = j.at("format").get<std::string>();
      if (f == "native") c.format = LogFormat::native;
      else if (f == "csv") c.format = LogFormat::csv;
      else throw ValidationError("unknown log format '" + f + "'");
    }
    if (j.contains("csv")) {
      const auto& csv = j.at("csv");
      c.csv.timestamp_column = csv.value("timestamp", c.csv.timestamp_column);
      c.csv.type_column = csv.value("type", c.csv.type_column);
      auto d = csv.value("delimiter", std::string(","));
      if (d.size() != 1) throw ValidationError("csv delimiter must be one character");
      c.csv.delimiter = d[0];
    }
    c.discovery.schema.max_arity = j.value("max_arity", c.discovery.schema.max_arity);
    if (j.contains("key_hints"))
      for (const auto& [t, attrs] : j.at("key_hints").items()) {
        auto a = attrs.get<AttributeSet>();
        std::sort(a.begin(), a.end());
        c.discovery.schema.key_hints[t] = a;
      }
    if (j.contains("entity_names"))
      c.discovery.schema.entity_names = j.at("entity_names").get<std::map<std::string, std::string>>();
    if (j.contains("foreign_keys")) {
      std::vector<ForeignKeySelection> fks;
      for (const auto& f : j.at("foreign_keys")) fks.push_back(parse_fk(f.get<std::string>()));
      c.discovery.foreign_keys = std::move(fks);
    }
    if (j.contains("artifacts"))
      for (const auto& a : j.at("artifacts"))
        c.view.artifacts.push_back({a.at("name").get<std::string>(), a.value("main", a.at("name").get<std::string>()),
                                    a.value("members", std::vector<std::string>{})});
    if (j.contains("path_overrides"))
      for (const auto& [type, links] : j.at("path_overrides").items()) {
        KeyPath p;
        for (const auto& l : links) p.push_back(key_link_from_json(l));
        c.view.path_overrides[type] = std::move(p);
      }
    if (j.contains("conditions"))
      for (const auto& [artifact, file] : j.at("conditions").items())
        c.conditions[artifact] = resolve(base, file.get<std::string>());
    c.state_cap = j.value("state_cap", c.state_cap);
    c.allow_inconclusive = j.value("allow_inconclusive", c.allow_inconclusive);
    c.max_len = j.value("max_len", c.max_len);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

PipelineConfig load_config(const fs::path& file) {
  return config_from_json(parse_json_file(file), file.parent_path());
}

fs::path cmd_ingest(const fs::path& log_file, LogFormat format, const CsvOptions& csv, const fs::path& out_dir,
                    std::ostream& log) {
  auto raw = parse_raw_log(read_file(log_file), format, csv);
  warn_all(log, check_order(raw));
  auto db = tabulate(raw);
  auto out = out_dir / "database.json";
  write_file(out, to_json(db).dump(2) + "\n");
  std::size_t clusters = 0;
  for (const auto& t : db.tables) clusters += t.kind == TableKind::event_type;
  log << "ingest: " << raw.events.size() << " events, " << clusters << " event type clusters, " << db.tables.size()
      << " tables -> " << out.string() << "\n";
  return out;
}

fs::path cmd_discover(const fs::path& database_file, const PipelineConfig& config, const fs::path& out_dir,
                      std::ostream& log) {
  auto db = database_from_json(parse_json_file(database_file));
  validate(db);
  auto er = build_er_model(db, config.discovery);
  warn_all(log, er.warnings);
  for (const auto& u : er.unassigned) log << "warning: table " << u.table << " not assigned: " << u.reason << "\n";
  auto out = out_dir / "er_model.json";
  write_file(out, to_json(er).dump(2) + "\n");
  write_file(out_dir / "candidates.txt", candidate_report(er));
  log << "discover: " << er.entities.size() << " entities, " << er.foreign_keys.size() << " foreign keys, "
      << er.candidates.size() << " candidates -> " << out.string() << "\n";
  return out;
}

std::vector<fs::path> cmd_extract(const fs::path& er_file, const PipelineConfig& config, const fs::path& out_dir,
                                  std::ostream& log) {
  if (config.view.artifacts.empty()) throw ValidationError("no artifacts selected in the config");
  auto er = er_model_from_json(parse_json_file(er_file));
  auto db = entity_database(er);
  auto view = build_view(er, db, config.view);
  warn_all(log, view.warnings);
  write_file(out_dir / "view.json", to_json(view).dump(2) + "\n");
  std::vector<fs::path> written;
  for (const auto& l : extract_logs(db, view)) {
    auto out = out_dir / (file_stem(l.artifact) + ".jsonl");
    write_file(out, write_jsonl(l));
    for (const auto& [type, n] : l.orphans)
      if (n) log << "warning: " << n << " " << type << " events not related to any " << l.artifact << "\n";
    log << "extract: " << l.artifact << ": " << l.cases.size() << " cases, " << l.event_count() << " events -> "
        << out.string() << "\n";
    written.push_back(out);
  }
  return written;
}

fs::path cmd_mine(const fs::path& lifecycle_file, const fs::path& out_dir, std::ostream& log) {
  auto lifecycle = read_jsonl(read_file(lifecycle_file));
  auto log_traces = traces(lifecycle);
  auto mined = mine_lifecycle_detailed(log_traces);
  if (mined.flower) log << "warning: alpha result is not a workflow net; flower model used\n";
  auto stem = stem_of(lifecycle_file);
  auto out = out_dir / (stem + ".net.json");
  write_file(out, to_json(mined.net).dump(2) + "\n");
  write_file(out_dir / (stem + ".pnml"), write_pnml(mined.net, stem));
  write_file(out_dir / (stem + ".net.dot"), to_dot(mined.net));
  log << "mine: " << stem << ": " << mined.net.places.size() << " places, " << mined.net.transitions.size()
      << " transitions, fitness " << replay_fitness(mined.net, log_traces) << " -> " << out.string() << "\n";
  return out;
}

fs::path cmd_translate(const TranslateRequest& request, const fs::path& out_dir, std::ostream& log) {
  auto net = read_net(read_file(request.net));
  BranchConditions conds;
  if (request.conditions) conds = branch_conditions_from_json(parse_json_file(*request.conditions));
  TranslateOptions options;
  options.state_cap = request.state_cap;
  options.allow_inconclusive = request.allow_inconclusive;
  auto stem = stem_of(request.net);
  options.artifact = request.artifact.empty() ? stem : request.artifact;
  auto tr = translate(net, conds, options);
  warn_all(log, tr.warnings);
  auto out = out_dir / (stem + ".gsm.json");
  write_file(out, to_json(tr.model).dump(2) + "\n");
  auto table = guard_table(tr.model);
  write_file(out_dir / (stem + ".guards.txt"), table);
  write_file(out_dir / (stem + ".gsm.dot"), to_dot(tr.model));
  std::size_t guards = 0;
  for (const auto& s : tr.model.stages) guards += s.guards.size();
  log << "translate: " << stem << ": " << tr.model.stages.size() << " stages, " << guards << " guards -> "
      << out.string() << "\n";
  return out;
}

bool cmd_check(const CheckRequest& request, std::ostream& log) {
  bool ok = true;
  auto verdict = [&](const std::string& what, bool good, const std::string& detail = "") {
    log << what << ": " << (good ? "yes" : "no") << (detail.empty() ? "" : " (" + detail + ")") << "\n";
    ok = ok && good;
  };
  std::optional<PetriNet> net;
  if (request.net) {
    net = read_net(read_file(*request.net));
    auto wf = is_workflow_net(*net);
    verdict("workflow net", wf.ok, wf.ok ? "" : wf.witnesses.front());
    auto fc = is_free_choice(*net);
    verdict("free-choice", fc.ok, fc.ok ? "" : fc.witnesses.front());
    if (wf.ok) {
      auto s = is_sound(*net, request.state_cap);
      log << "soundness: " << to_string(s.verdict) << " after " << s.states << " states"
          << (s.witness.empty() ? "" : " (" + s.witness + ")") << "\n";
      ok = ok && s.verdict == Soundness::sound;
    }
    if (request.lifecycle) {
      auto l = read_jsonl(read_file(*request.lifecycle));
      auto f = replay_fitness(*net, traces(l));
      log << "replay fitness: " << f << "\n";
      ok = ok && f == 1.0;
    }
  }
  std::optional<GsmModel> model;
  if (request.gsm) {
    auto j = parse_json_file(*request.gsm);
    auto d = validate_json(j);
    verdict("gsm model valid", d.ok, d.ok ? "" : d.messages.front());
    if (d.ok) model = gsm_model_from_json(j);
  }
  if (net && model) {
    BranchConditions conds;
    if (request.conditions) conds = branch_conditions_from_json(parse_json_file(*request.conditions));
    auto what = "net and gsm languages agree up to length " + std::to_string(request.max_len);
    try {
      auto r = check_equivalence(*net, conds, *model, request.max_len);
      verdict(what, r.equivalent,
              std::to_string(r.valuations) + " valuations, " + std::to_string(r.traces_compared) + " traces" +
                  (r.witness.empty() ? "" : "; " + r.witness));
    } catch (const Error& e) {
      log << what << ": inconclusive (" << e.what() << ")\n";
    }
  }
  for (std::size_t i = 0; i < request.random_nets; ++i) {
    auto seed = request.seed + i;
    auto g = random_workflow_net(seed);
    auto tr = translate(g.net, g.conditions);
    auto r = check_equivalence(g.net, g.conditions, tr.model, request.max_len);
    verdict("random net seed " + std::to_string(seed), r.equivalent, r.witness);
  }
  return ok;
}

bool cmd_run(const PipelineConfig& config, const fs::path& out_dir, std::ostream& log) {
  if (config.log.empty()) throw ValidationError("config names no log");
  auto db = cmd_ingest(config.log, config.format, config.csv, out_dir, log);
  auto er = cmd_discover(db, config, out_dir, log);
  bool ok = true;
  auto logs = cmd_extract(er, config, out_dir, log);
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const auto& artifact = config.view.artifacts[i].name;
    auto net = cmd_mine(logs[i], out_dir, log);
    TranslateRequest tr{net, std::nullopt, artifact, config.state_cap, config.allow_inconclusive};
    if (auto it = config.conditions.find(artifact); it != config.conditions.end()) tr.conditions = it->second;
    try {
      auto gsm = cmd_translate(tr, out_dir, log);
      CheckRequest check;
      check.net = net;
      check.gsm = gsm;
      check.lifecycle = logs[i];
      check.conditions = tr.conditions;
      check.state_cap = config.state_cap;
      check.max_len = config.max_len;
      ok = cmd_check(check, log) && ok;
    } catch (const TranslationError& e) {
      log << "translate: " << artifact << ": " << e.what() << "\n";
      ok = false;
    }
  }
  return ok;
}

}  // namespace artimine
