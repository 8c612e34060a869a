#include "hotelwatt/error.hpp"

namespace hotelwatt {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Argument: return "argument error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Consistency: return "consistency error";
    case ErrorKind::Join: return "join error";
    case ErrorKind::Generation: return "generation error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::MissingFeature: return "missing feature";
    case ErrorKind::UndefinedCorrelation: return "undefined correlation";
    case ErrorKind::MetricDomain: return "metric domain error";
    case ErrorKind::Training: return "training error";
    case ErrorKind::Search: return "search error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::Provider: return "provider error";
    case ErrorKind::IncompleteData: return "incomplete data";
    case ErrorKind::Transport: return "transport error";
  }
  return "error";
}

ParseError::ParseError(std::size_t row, std::string column, const std::string& detail)
    : Error(ErrorKind::Parse,
            "row " + std::to_string(row) + ", column " + column + ": " + detail),
      row_(row),
      column_(std::move(column)) {}

}  // namespace hotelwatt
