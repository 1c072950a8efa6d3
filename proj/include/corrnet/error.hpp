#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace corrnet {

enum class ErrorKind {
  // input data problems (CLI exit status 1)
  EmptyFile,
  MalformedRow,
  NonPositivePrice,
  DuplicateObservation,
  EmptyIntersection,
  TooFewInstruments,
  NoWindow,
  InsufficientRows,
  AllExcluded,
  NotPositiveSemidefinite,
  Io,
  // caller / configuration problems (CLI exit status 2)
  InvalidArgument,
  Config,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::NonPositivePrice: return "NonPositivePrice";
    case ErrorKind::DuplicateObservation: return "DuplicateObservation";
    case ErrorKind::EmptyIntersection: return "EmptyIntersection";
    case ErrorKind::TooFewInstruments: return "TooFewInstruments";
    case ErrorKind::NoWindow: return "NoWindow";
    case ErrorKind::InsufficientRows: return "InsufficientRows";
    case ErrorKind::AllExcluded: return "AllExcluded";
    case ErrorKind::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorKind::Io: return "Io";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

constexpr bool is_config_error(ErrorKind kind) {
  return kind == ErrorKind::InvalidArgument || kind == ErrorKind::Config;
}

/// Every failure raised by the library. `line()` is the 1-based input line
/// for parse errors and 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::size_t line = 0)
      : std::runtime_error(format(kind, message, line)), kind_(kind), line_(line) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(ErrorKind kind, const std::string& message, std::size_t line) {
    std::string out(to_string(kind));
    if (line != 0) out += " (line " + std::to_string(line) + ")";
    out += ": ";
    out += message;
    return out;
  }

  ErrorKind kind_;
  std::size_t line_;
};

}  // namespace corrnet
