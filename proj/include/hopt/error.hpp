#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hopt {

enum class ErrorKind {
  NonSymmetric,
  NonFinite,
  NotPositiveDefinite,
  DimensionMismatch,
  ParseError,
  DegenerateResponse,
  InfeasibleSpec,
  AllZeroVariance,
  Diverged,
  RhoOutOfRange,
  ZetaOutOfRange,
  ConfigError,
  IoError,
  InvalidArgument,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed LIBSVM input; `line` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonSymmetric: return "NonSymmetric";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DegenerateResponse: return "DegenerateResponse";
    case ErrorKind::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorKind::AllZeroVariance: return "AllZeroVariance";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::RhoOutOfRange: return "RhoOutOfRange";
    case ErrorKind::ZetaOutOfRange: return "ZetaOutOfRange";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + " (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace hopt
