#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctns {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a function (negative density,
/// singular point of an entropy weight, empty sample set, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative or quadrature solver failed to reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : Error(what + " (residual " + std::to_string(residual) + " after " +
              std::to_string(iterations) + " iterations)"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

  /// Same error with `context` prepended to the message.
  SolverError with_context(const std::string& context) const {
    return SolverError(Formatted{}, context + what(), residual_, iterations_);
  }

 private:
  struct Formatted {};
  SolverError(Formatted, const std::string& msg, double residual, int iterations)
      : Error(msg), residual_(residual), iterations_(iterations) {}

  double residual_;
  int iterations_;
};

/// Time step too large for the explicit transport part of a step.
class CflError : public Error {
 public:
  CflError(const std::string& what, double courant)
      : Error(what + " (Courant number " + std::to_string(courant) + ")"),
        courant_(courant) {}

  double courant() const { return courant_; }

  /// Same error with `context` prepended to the message.
  CflError with_context(const std::string& context) const {
    return CflError(Formatted{}, context + what(), courant_);
  }

 private:
  struct Formatted {};
  CflError(Formatted, const std::string& msg, double courant) : Error(msg), courant_(courant) {}

  double courant_;
};

/// Malformed configuration text. Line and column are 1-based; column 0 means
/// the error concerns the whole line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column = 0)
      : Error("line " + std::to_string(line) +
              (column > 0 ? ", column " + std::to_string(column) : "") + ": " + what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Semantically invalid configuration (bad value, missing key).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary snapshot.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctns
