#include "artimine/timestamp.hpp"

#include <charconv>
#include <cstdio>
#include <tuple>
#include <vector>

#include "artimine/error.hpp"

namespace artimine {
namespace {

int parse_field(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw ParseError(0, "malformed timestamp '" + std::string(whole) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  auto sep = text.find_first_of(", ");
  if (sep == std::string_view::npos) throw ParseError(0, "malformed timestamp '" + std::string(text) + "'");
  auto date = split(text.substr(0, sep), '-');
  auto time = split(text.substr(sep + 1), ':');
  if ((date.size() != 2 && date.size() != 3) || (time.size() != 2 && time.size() != 3))
    throw ParseError(0, "malformed timestamp '" + std::string(text) + "'");

  Timestamp ts;
  std::size_t i = 0;
  if (date.size() == 3) {
    ts.year = parse_field(date[i++], text);
    ts.has_year = true;
  }
  ts.month = parse_field(date[i++], text);
  ts.day = parse_field(date[i], text);
  ts.hour = parse_field(time[0], text);
  ts.minute = parse_field(time[1], text);
  if (time.size() == 3) {
    ts.second = parse_field(time[2], text);
    ts.has_seconds = true;
  }
  if (ts.month < 1 || ts.month > 12 || ts.day < 1 || ts.day > 31 || ts.hour > 23 || ts.minute > 59 ||
      ts.second > 60 || ts.hour < 0 || ts.minute < 0 || ts.second < 0)
    throw ParseError(0, "timestamp out of range '" + std::string(text) + "'");
  return ts;
}

std::string to_string(const Timestamp& ts) {
  char buf[40];
  int n = 0;
  if (ts.has_year) n = std::snprintf(buf, sizeof buf, "%04d-", ts.year);
  n += std::snprintf(buf + n, sizeof buf - n, "%02d-%02d,%02d:%02d", ts.month, ts.day, ts.hour, ts.minute);
  if (ts.has_seconds) std::snprintf(buf + n, sizeof buf - n, ":%02d", ts.second);
  return buf;
}

}  // namespace artimine
