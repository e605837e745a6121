#pragma once

#include <stdexcept>
#include <string>

namespace qw {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A coin or model violates one of its invariants. `field` is a dotted path
/// such as "origin.alpha" when known.
struct ValidationError : Error {
  ValidationError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ParseError : Error {
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

/// A closed-form solver was handed a model outside its theorem's assumptions.
struct ClassMismatch : Error {
  using Error::Error;
};

/// Spectral phase outside the admissible region where D(lambda) is defined.
struct OutsideAdmissibleRegion : Error {
  using Error::Error;
};

struct ExpandingModeError : Error {
  using Error::Error;
};

struct InsufficientData : Error {
  using Error::Error;
};

}  // namespace qw
