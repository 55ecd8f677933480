#include "og/errors.hpp"

namespace og {

const char* to_string(EvalErrorKind k) {
  switch (k) {
    case EvalErrorKind::TypeMismatch: return "TypeMismatch";
    case EvalErrorKind::EmptyStackAccess: return "EmptyStackAccess";
    case EvalErrorKind::AbsentOptional: return "AbsentOptional";
    case EvalErrorKind::DomainViolation: return "DomainViolation";
    case EvalErrorKind::DuplicateTarget: return "DuplicateTarget";
    case EvalErrorKind::ControlPredicate: return "ControlPredicate";
  }
  return "EvalError";
}

const char* to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::SyntaxError: return "SyntaxError";
    case ParseErrorKind::TypeError: return "TypeError";
    case ParseErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ParseErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "ParseError";
}

ParseError::ParseError(ParseErrorKind kind, SrcPos pos, const std::string& reason)
    : std::runtime_error(std::string(to_string(kind)) + " at " + std::to_string(pos.line) + ":" +
                         std::to_string(pos.col) + ": " + reason),
      kind_(kind),
      pos_(pos),
      reason_(reason) {}

}  // namespace og
