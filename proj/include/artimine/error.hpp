#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace artimine {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A model or configuration violates a structural rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A table has no usable primary key and no hint was supplied.
class UnresolvedKeyError : public Error {
 public:
  explicit UnresolvedKeyError(const std::string& table)
      : Error("no primary key could be selected for table '" + table + "'"), table_(table) {}
  const std::string& table() const noexcept { return table_; }

 private:
  std::string table_;
};

/// No key-relation path connects two attribute sets.
class UnpathableError : public Error {
 public:
  using Error::Error;
};

class NotEnabledError : public Error {
 public:
  using Error::Error;
};

/// A GSM cascade did not reach quiescence within the micro-step budget.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class TranslationError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace artimine
