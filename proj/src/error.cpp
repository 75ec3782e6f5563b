#include "cpnkit/error.hpp"

namespace cpn {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DelaySyntaxError: return "DelaySyntaxError";
    case ErrorCode::UnknownColorSet: return "UnknownColorSet";
    case ErrorCode::DuplicateColorSet: return "DuplicateColorSet";
    case ErrorCode::DuplicateLiteral: return "DuplicateLiteral";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::TypeErrorAtRuntime: return "TypeErrorAtRuntime";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ArithmeticOverflow: return "ArithmeticOverflow";
    case ErrorCode::RecursionLimitExceeded: return "RecursionLimitExceeded";
    case ErrorCode::NotAPattern: return "NotAPattern";
    case ErrorCode::DuplicateFunction: return "DuplicateFunction";
    case ErrorCode::NotEnabled: return "NotEnabled";
    case ErrorCode::ColorMismatch: return "ColorMismatch";
    case ErrorCode::NegativeDelay: return "NegativeDelay";
    case ErrorCode::UnknownPlace: return "UnknownPlace";
    case ErrorCode::UnknownTransition: return "UnknownTransition";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::TimedNetUnsupported: return "TimedNetUnsupported";
    case ErrorCode::LimitZero: return "LimitZero";
    case ErrorCode::HomeUndecidable: return "HomeUndecidable";
    case ErrorCode::LivenessUndecidable: return "LivenessUndecidable";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::XmlParseError: return "XmlParseError";
    case ErrorCode::HierarchyUnsupportedInStub: return "HierarchyUnsupportedInStub";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NothingToUndo: return "NothingToUndo";
    case ErrorCode::SessionNotFound: return "SessionNotFound";
    case ErrorCode::IoError: return "IoError";
  }
  return "Error";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail, const std::string& path) {
  std::string out(error_name(code));
  if (!path.empty()) out += " at " + path;
  if (!detail.empty()) out += ": " + detail;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string detail, std::string path)
    : std::runtime_error(compose(code, detail, path)),
      code_(code),
      detail_(std::move(detail)),
      path_(std::move(path)) {}

Error Error::with_context(std::string_view prefix) const {
  return Error(code_, std::string(prefix) + ": " + detail_, path_);
}

Error Error::at(std::string path) const {
  if (path.empty()) return *this;
  return Error(code_, detail_, std::move(path));
}

}  // namespace cpn
