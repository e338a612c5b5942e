#ifndef SIMDIALOG_ERROR_HPP
#define SIMDIALOG_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace simdialog {

enum class ErrorCode {
  NotFound,
  DimensionMismatch,
  NoCandidates,
  InvalidPhase,
  InvalidChoice,
  UnmatchedBranch,
  CycleOverflow,
  ParseError,
  ImportError,
  RefusedInvalid,
  IoError,
  UnsupportedVersion,
  SchemaError,
  InvalidArgument,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::InvalidPhase: return "InvalidPhase";
    case ErrorCode::InvalidChoice: return "InvalidChoice";
    case ErrorCode::UnmatchedBranch: return "UnmatchedBranch";
    case ErrorCode::CycleOverflow: return "CycleOverflow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ImportError: return "ImportError";
    case ErrorCode::RefusedInvalid: return "RefusedInvalid";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. The code is the
/// stable, machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// Parse failures that can point at a line in the input.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Raised by the auto-advance guard; carries the number of nodes executed.
class CycleOverflowError : public Error {
 public:
  explicit CycleOverflowError(std::size_t steps)
      : Error(ErrorCode::CycleOverflow,
              "auto-advance executed " + std::to_string(steps) + " nodes without reaching a player menu or an ending"),
        steps_(steps) {}

  std::size_t steps() const noexcept { return steps_; }

 private:
  std::size_t steps_;
};

/// A replay failure wraps the underlying error with the 1-based choice step
/// at which it happened (step 0 = starting the conversation).
class ReplayError : public Error {
 public:
  ReplayError(std::size_t step, ErrorCode inner, const std::string& message)
      : Error(inner, "step " + std::to_string(step) + ": " + message), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace simdialog

#endif  // SIMDIALOG_ERROR_HPP
