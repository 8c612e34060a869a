#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hotelwatt {

enum class ErrorKind {
  Argument,
  Parse,
  Consistency,
  Join,
  Generation,
  Shape,
  Data,
  MissingFeature,
  UndefinedCorrelation,
  MetricDomain,
  Training,
  Search,
  Format,
  Io,
  Provider,
  IncompleteData,
  Transport,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library.  The kind
/// drives the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// CSV parse failure located at a 1-based data row (the header is row 0)
/// and a named column.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& detail);

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class ProviderError : public Error {
 public:
  ProviderError(int status, const std::string& message)
      : Error(ErrorKind::Provider, message), status_(status) {}

  /// HTTP status, or 0 when the failure was not an HTTP response.
  int status() const noexcept { return status_; }

 private:
  int status_;
};

}  // namespace hotelwatt
