#pragma once

#include <stdexcept>
#include <string>

namespace radnet {

/// Cholesky factorization met a nonpositive pivot; `pivot()` is its 0-based index.
class DefinitenessError : public std::runtime_error {
 public:
  DefinitenessError(int pivot, double value, const std::string& context = "matrix")
      : std::runtime_error(context + " is not positive definite: pivot " +
                           std::to_string(pivot) + " = " + std::to_string(value)),
        pivot_(pivot) {}
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

/// Target and node coincide (or range is otherwise nonpositive).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A code makes the Doppler CRLB undefined: phi(c) fell below its scale-aware tolerance.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Taylor expansion point is invalid (nonpositive detection probability or phi).
class ExpansionPointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The information-matrix recursion produced or received an invalid operand.
class RecursionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The relaxed subproblem had no feasible candidate. Cannot occur when the
/// current iterate is feasible; reaching this indicates corrupted inputs.
class SubproblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario file violates the schema; `path()` is the offending field.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& field_path, const std::string& message)
      : std::runtime_error("scenario field '" + field_path + "': " + message),
        path_(field_path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Scenario file could not be read at all.
class ScenarioIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario file is not syntactically valid; carries 1-based line/column.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error("parse error at line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace radnet
