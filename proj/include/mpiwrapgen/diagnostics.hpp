#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mpiwrapgen {

/// Base of every error the generator raises. `location` names the input file,
/// procedure or task the error refers to; it may be empty.
class Error : public std::runtime_error {
 public:
  Error(std::string location, const std::string& message);

  const std::string& location() const noexcept { return location_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string location_;
  std::string detail_;
};

/// Malformed input document (spec, supplement, task library, config, template).
class ParseError : public Error {
  using Error::Error;
};

/// Lookup of a procedure that is not in the spec.
class NotFoundError : public Error {
  using Error::Error;
};

/// An operation was called outside its precondition, e.g. asking for the C
/// prototype of a Fortran-only routine.
class ContractError : public Error {
  using Error::Error;
};

/// Semantically invalid but well-formed input: dangling argument references,
/// unknown tasks, duplicate definitions, local-variable collisions.
class ValidationError : public Error {
  using Error::Error;
};

/// Filesystem failures while reading inputs or writing the output tree.
class IoError : public Error {
  using Error::Error;
};

enum class Severity { kWarning, kError };

struct Diagnostic {
  Severity severity = Severity::kWarning;
  std::string location;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Collects warnings (and aggregated errors) produced during a run.
class Diagnostics {
 public:
  void warn(std::string location, std::string message);
  void error(std::string location, std::string message);

  const std::vector<Diagnostic>& entries() const noexcept { return entries_; }
  std::size_t warning_count() const noexcept;
  std::size_t error_count() const noexcept;
  bool empty() const noexcept { return entries_.empty(); }

  void append(const Diagnostics& other);

 private:
  std::vector<Diagnostic> entries_;
};

std::string format(const Diagnostic& d);

}  // namespace mpiwrapgen
