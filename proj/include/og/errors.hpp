#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace og {

enum class EvalErrorKind {
  TypeMismatch,
  EmptyStackAccess,
  AbsentOptional,
  DomainViolation,
  DuplicateTarget,
  ControlPredicate,
};

const char* to_string(EvalErrorKind k);

/// Raised while evaluating an expression or applying an update. The explorer
/// turns these into recorded model errors instead of propagating them.
class EvalError : public std::runtime_error {
 public:
  EvalError(EvalErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  EvalErrorKind kind() const { return kind_; }

 private:
  EvalErrorKind kind_;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by hw::default_interrupt_policy when a routine has no priority.
class MissingPriority : public ConfigError {
 public:
  explicit MissingPriority(const std::string& what) : ConfigError(what) {}
};

class UnboundedDomain : public std::runtime_error {
 public:
  explicit UnboundedDomain(const std::string& what) : std::runtime_error(what) {}
};

struct SrcPos {
  std::uint32_t line = 0;
  std::uint32_t col = 0;
};

enum class ParseErrorKind { SyntaxError, TypeError, UnknownIdentifier, ConfigInvalid };

const char* to_string(ParseErrorKind k);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, SrcPos pos, const std::string& reason);
  ParseErrorKind kind() const { return kind_; }
  SrcPos pos() const { return pos_; }
  const std::string& reason() const { return reason_; }

 private:
  ParseErrorKind kind_;
  SrcPos pos_;
  std::string reason_;
};

}  // namespace og
