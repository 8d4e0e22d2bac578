#pragma once

#include <stdexcept>
#include <string>

namespace nirisk {

// Base for every error raised by the library.  The derived types let callers
// (the CLI and the HTTP service) map failures onto exit codes and statuses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A complete assignment was required but some variable was left unbound.
class IncompleteAssignment : public Error {
 public:
  using Error::Error;
};

// The evidence has probability zero under the model.
class ImpossibleEvidence : public Error {
 public:
  using Error::Error;
};

// A data label or evidence binding does not belong to the variable's states,
// or names a variable the model does not have.
class SchemaMismatch : public Error {
 public:
  SchemaMismatch(std::string field, const std::string& what)
      : Error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Ill-formed network or DBN specification.
class SpecError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class BinningError : public Error {
 public:
  BinningError(std::string variable, std::string value)
      : Error("value '" + value + "' of '" + variable + "' falls outside every bin"),
        variable_(std::move(variable)),
        value_(std::move(value)) {}
  const std::string& variable() const { return variable_; }
  const std::string& value() const { return value_; }

 private:
  std::string variable_;
  std::string value_;
};

// Two models were expected to share a structure and do not.
class ComparisonError : public Error {
 public:
  using Error::Error;
};

}  // namespace nirisk
