#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpn {

/// Stable error identifiers. The spelling returned by error_name() is part of
/// the HTTP and CLI contract, so entries must not be renamed.
enum class ErrorCode {
  SyntaxError,
  DelaySyntaxError,
  UnknownColorSet,
  DuplicateColorSet,
  DuplicateLiteral,
  UnboundVariable,
  UnknownFunction,
  ArityMismatch,
  TypeErrorAtRuntime,
  DivisionByZero,
  ArithmeticOverflow,
  RecursionLimitExceeded,
  NotAPattern,
  DuplicateFunction,
  NotEnabled,
  ColorMismatch,
  NegativeDelay,
  UnknownPlace,
  UnknownTransition,
  ValidationFailed,
  TimedNetUnsupported,
  LimitZero,
  HomeUndecidable,
  LivenessUndecidable,
  SchemaError,
  XmlParseError,
  HierarchyUnsupportedInStub,
  EmptyInput,
  NothingToUndo,
  SessionNotFound,
  IoError,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail, std::string path = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  /// JSON path of the offending element, e.g. "transitions[0].guard". Empty if unknown.
  const std::string& path() const noexcept { return path_; }

  /// Copy of this error with `prefix` prepended to the detail text.
  Error with_context(std::string_view prefix) const;
  /// Copy of this error located at `path` (kept if already set and `path` is empty).
  Error at(std::string path) const;

 private:
  ErrorCode code_;
  std::string detail_;
  std::string path_;
};

}  // namespace cpn
