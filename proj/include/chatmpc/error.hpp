#pragma once

#include <stdexcept>
#include <string>

namespace chatmpc {

/// Caller broke a documented precondition (shape mismatch, non-positive gamma, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A configuration cannot be used as given (e.g. a classifier class without examples).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transient failure talking to an external service; the call may be retried.
class RetriableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chatmpc
