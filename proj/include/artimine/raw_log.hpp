#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "artimine/timestamp.hpp"

namespace artimine {

using AttributeValue = std::pair<std::string, std::string>;

// One case-less event. Repeated attribute names encode multi-valued
// attributes; values are kept as strings.
struct Event {
  std::string type;
  Timestamp time;
  std::vector<AttributeValue> attrs;

  friend bool operator==(const Event&, const Event&) = default;
};

// Events in file order. The index in `events` is the total order of the log.
struct RawLog {
  std::vector<Event> events;

  friend bool operator==(const RawLog&, const RawLog&) = default;
};

enum class LogFormat { native, csv };

struct CsvOptions {
  std::string timestamp_column = "timestamp";
  std::string type_column = "type";
  char delimiter = ',';
};

/// Native format, one event per line:
///
///     11-24,17:12  ReceivePO  items=(it0), POrderID=1
///
/// `(v1,v2,...)` expands into one attribute pair per value; values may be
/// double-quoted. Blank lines and lines starting with '#' are skipped.
RawLog parse_native_log(std::string_view text);

/// CSV with a header row. Empty cells are absent attributes; a cell of the
/// form `(v1,v2)` is multi-valued as in the native format.
RawLog parse_csv_log(std::string_view text, const CsvOptions& options = {});

RawLog parse_raw_log(std::string_view text, LogFormat format, const CsvOptions& options = {});

/// Writes the native format; `parse_native_log(write_native_log(log)) == log`.
std::string write_native_log(const RawLog& log);

/// Warnings for events whose timestamp is earlier than a preceding event's.
/// File order stays the total order either way.
std::vector<std::string> check_order(const RawLog& log);

}  // namespace artimine
