#pragma once

#include <stdexcept>
#include <string>

namespace featimp {

/// Base of every error raised by the library. Catch this to report any
/// featimp failure; the derived types let callers react to specific ones.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A CSV cell could not be parsed; the message names row and column.
class IngestionError : public Error {
 public:
  using Error::Error;
};

/// Column names or roles are inconsistent (duplicates, unknown names, bad roles).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A column has zero variance or too few observed values for the requested statistic.
class DegenerateColumnError : public Error {
 public:
  using Error::Error;
};

/// Two columns share too few jointly observed rows.
class OverlapError : public Error {
 public:
  using Error::Error;
};

/// An iterative fit did not converge within its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the arguments was violated.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace featimp
