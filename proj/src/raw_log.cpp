#include "artimine/raw_log.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "artimine/error.hpp"

namespace artimine {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits on `sep` outside of parentheses and double quotes.
std::vector<std::string_view> split_top_level(std::string_view s, char sep, std::size_t line) {
  std::vector<std::string_view> out;
  int depth = 0;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quoted) {
      if (c == '\\') ++i;
      else if (c == '"') quoted = false;
      continue;
    }
    if (c == '"') quoted = true;
    else if (c == '(') ++depth;
    else if (c == ')') {
      if (--depth < 0) throw ParseError(line, "unbalanced ')'");
    } else if (c == sep && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  if (quoted) throw ParseError(line, "unterminated quote");
  if (depth != 0) throw ParseError(line, "unbalanced '('");
  out.push_back(s.substr(start));
  return out;
}

std::string unquote(std::string_view v, std::size_t line) {
  v = trim(v);
  if (v.size() < 2 || v.front() != '"') return std::string(v);
  if (v.back() != '"') throw ParseError(line, "malformed quoted value");
  std::string out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] == '\\' && i + 2 < v.size()) ++i;
    out.push_back(v[i]);
  }
  return out;
}

// Expands one `value` or `(v1,...,vn)` into its values. Sets `listed` when
// the parenthesized form was used.
std::vector<std::string> expand_value(std::string_view raw, std::size_t line, bool& listed) {
  raw = trim(raw);
  listed = raw.size() >= 2 && raw.front() == '(' && raw.back() == ')';
  if (!listed) return {unquote(raw, line)};
  std::vector<std::string> values;
  auto inner = raw.substr(1, raw.size() - 2);
  if (trim(inner).empty()) return values;
  for (auto part : split_top_level(inner, ',', line)) {
    if (trim(part).empty()) throw ParseError(line, "empty value in list");
    values.push_back(unquote(part, line));
  }
  return values;
}

// Adds attribute pairs, rejecting a scalar attribute repeated with a
// different value on the same event.
class AttrCollector {
 public:
  explicit AttrCollector(std::size_t line) : line_(line) {}

  void add(const std::string& name, std::string_view raw) {
    if (name.empty()) throw ParseError(line_, "empty attribute name");
    bool listed = false;
    auto values = expand_value(raw, line_, listed);
    if (!listed) {
      auto [it, inserted] = scalars_.emplace(name, values.front());
      if (!inserted) {
        if (it->second != values.front())
          throw ParseError(line_, "attribute '" + name + "' has conflicting values '" + it->second + "' and '" +
                                      values.front() + "'");
        return;
      }
    }
    for (auto& v : values) attrs_.emplace_back(name, std::move(v));
  }

  std::vector<AttributeValue> take() { return std::move(attrs_); }

 private:
  std::size_t line_;
  std::map<std::string, std::string> scalars_;
  std::vector<AttributeValue> attrs_;
};

bool needs_quotes(const std::string& v) {
  if (v.empty()) return true;
  if (v.front() == ' ' || v.back() == ' ' || v.front() == '"') return true;
  return v.find_first_of(",()=\t\"\\") != std::string::npos;
}

std::string quote_if_needed(const std::string& v) {
  if (!needs_quotes(v)) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> parse_csv_record(std::string_view line, char delim, std::size_t lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == delim) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (quoted) throw ParseError(lineno, "unterminated quoted CSV field");
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

RawLog parse_native_log(std::string_view text) {
  RawLog log;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    auto raw = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++lineno;

    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    auto ws = line.find_first_of(" \t");
    if (ws == std::string_view::npos) throw ParseError(lineno, "expected '<timestamp> <event type> [attributes]'");
    Event event;
    try {
      event.time = parse_timestamp(line.substr(0, ws));
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.what());
    }
    auto rest = trim(line.substr(ws));
    auto ws2 = rest.find_first_of(" \t");
    event.type = std::string(rest.substr(0, ws2));
    auto attr_text = ws2 == std::string_view::npos ? std::string_view{} : trim(rest.substr(ws2));

    AttrCollector attrs(lineno);
    if (!attr_text.empty()) {
      for (auto item : split_top_level(attr_text, ',', lineno)) {
        item = trim(item);
        auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ParseError(lineno, "expected attr=value, got '" + std::string(item) + "'");
        attrs.add(std::string(trim(item.substr(0, eq))), item.substr(eq + 1));
      }
    }
    event.attrs = attrs.take();
    log.events.push_back(std::move(event));
  }
  return log;
}

RawLog parse_csv_log(std::string_view text, const CsvOptions& options) {
  RawLog log;
  std::vector<std::string> header;
  std::size_t ts_col = 0, type_col = 0;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() : end + 1;
    ++lineno;
    if (trim(line).empty()) continue;

    auto fields = parse_csv_record(line, options.delimiter, lineno);
    if (header.empty()) {
      header = std::move(fields);
      for (auto& h : header) h = std::string(trim(h));
      auto find = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ParseError(lineno, "CSV header lacks column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
      };
      ts_col = find(options.timestamp_column);
      type_col = find(options.type_column);
      continue;
    }
    if (fields.size() != header.size())
      throw ParseError(lineno, "expected " + std::to_string(header.size()) + " fields, got " +
                                   std::to_string(fields.size()));
    Event event;
    try {
      event.time = parse_timestamp(trim(fields[ts_col]));
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.what());
    }
    event.type = std::string(trim(fields[type_col]));
    if (event.type.empty()) throw ParseError(lineno, "empty event type");
    AttrCollector attrs(lineno);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i == ts_col || i == type_col || trim(fields[i]).empty()) continue;
      attrs.add(header[i], fields[i]);
    }
    event.attrs = attrs.take();
    log.events.push_back(std::move(event));
  }
  return log;
}

RawLog parse_raw_log(std::string_view text, LogFormat format, const CsvOptions& options) {
  return format == LogFormat::csv ? parse_csv_log(text, options) : parse_native_log(text);
}

std::string write_native_log(const RawLog& log) {
  std::ostringstream out;
  for (const auto& e : log.events) {
    out << to_string(e.time) << "  " << e.type;
    std::map<std::string, int> runs;
    std::vector<std::pair<std::string, std::vector<std::string>>> grouped;
    for (const auto& [name, value] : e.attrs) {
      if (grouped.empty() || grouped.back().first != name) {
        grouped.push_back({name, {}});
        ++runs[name];
      }
      grouped.back().second.push_back(value);
    }
    const char* sep = "  ";
    for (const auto& [name, values] : grouped) {
      out << sep << name << '=';
      sep = ", ";
      if (values.size() == 1 && runs[name] == 1) {
        out << quote_if_needed(values.front());
        continue;
      }
      out << '(';
      for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << quote_if_needed(values[i]);
      out << ')';
    }
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> check_order(const RawLog& log) {
  std::vector<std::string> warnings;
  for (std::size_t i = 1; i < log.events.size(); ++i) {
    if (log.events[i].time < log.events[i - 1].time)
      warnings.push_back("event " + std::to_string(i + 1) + " (" + log.events[i].type + " at " +
                         to_string(log.events[i].time) + ") is earlier than its predecessor; file order kept");
  }
  return warnings;
}

}  // namespace artimine
