#pragma once

#include <stdexcept>
#include <string>

namespace capelast {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The cutoff constraints cannot be met on the requested depth.
class InfeasibleCutoffError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// The graph map lost positivity of d3(phi): the chart has broken down.
class DegenerateMapError : public Error {
 public:
  DegenerateMapError(const std::string& what, double c0) : Error(what), c0_(c0) {}
  double c0() const noexcept { return c0_; }

 private:
  double c0_;
};

/// An iterative solve stopped before reaching its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Requested time step exceeds the explicit stability bound.
class CflError : public Error {
 public:
  CflError(const std::string& what, double suggested_dt) : Error(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// Not enough stored time levels for the requested time derivative.
class HistoryError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Malformed or incomplete configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace capelast
