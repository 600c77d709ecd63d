#pragma once

#include <compare>
#include <tuple>
#include <cstddef>
#include <string>
#include <string_view>

namespace artimine {

// Calendar timestamp with minute precision. The year is optional because
// many system logs print only month and day; a missing year sorts as 0.
struct Timestamp {
  int year = 0;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;
  int second = 0;
  bool has_year = false;
  bool has_seconds = false;

  auto key() const { return std::tuple(year, month, day, hour, minute, second); }
  friend bool operator==(const Timestamp& a, const Timestamp& b) { return a.key() == b.key(); }
  friend auto operator<=>(const Timestamp& a, const Timestamp& b) { return a.key() <=> b.key(); }
};

/// Parses `MM-DD,HH:MM[:SS]` or `YYYY-MM-DD,HH:MM[:SS]`. A single space is
/// accepted in place of the comma. Throws ParseError (line 0) on failure.
Timestamp parse_timestamp(std::string_view text);

std::string to_string(const Timestamp& ts);

// A timestamp together with the raw-log position of the event that carried
// it. The position breaks ties between equal timestamps.
struct Stamp {
  Timestamp time;
  std::size_t seq = 0;

  friend bool operator==(const Stamp&, const Stamp&) = default;
  friend auto operator<=>(const Stamp& a, const Stamp& b) {
    if (auto c = a.time <=> b.time; c != 0) return c;
    return a.seq <=> b.seq;
  }
};

}  // namespace artimine
