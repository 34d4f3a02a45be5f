#pragma once

#include <stdexcept>
#include <string>

namespace eamc {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad geometry, negative beta, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Campaign configuration could not be parsed or validated. `field()` names
/// the offending key using dotted notation.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Halo protocol failure: a message was missing, duplicated or malformed.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed (energy cache drift, broken permutation).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace eamc
