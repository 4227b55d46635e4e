#pragma once

#include <stdexcept>
#include <string>

namespace nldelta {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function was evaluated outside its domain (e.g. |psi|^alpha with
/// alpha < 0 at psi = 0, Lambert W below -1/e).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input. `field()` names the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Every grid evaluation of a scanned function was NaN.
class ScanError : public Error {
 public:
  using Error::Error;
};

/// Bracket endpoints do not straddle a sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// The scattering closure equation has no root in the scanned range.
class NoBranchError : public Error {
 public:
  using Error::Error;
};

/// No bound state satisfies the consistency and normalization conditions.
class NoBoundStateError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver failed to converge from every seed.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written. The message names the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nldelta
