#pragma once

// Error types thrown by the library.  Everything derives from sepdyn::Error
// so callers can catch one base; the more specific types carry the data a
// caller needs to react (pole location, best estimate so far, config line).

#include <complex>
#include <stdexcept>
#include <string>

namespace sepdyn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (z on the cut,
// alpha out of range, non-positive tolerance, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// An integral that does not exist for the requested form factor / exponent.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Operation not defined in the asymptotic regime of the supplied model.
class UnsupportedRegimeError : public Error {
 public:
  using Error::Error;
};

// Arguments that collapse a well-posed operation (e.g. coincident energies
// where a difference quotient is required).
class DegenerateArgumentsError : public Error {
 public:
  using Error::Error;
};

// Coupling constants that make a parametrization singular.
class SingularCouplingError : public Error {
 public:
  using Error::Error;
};

// An on-shell amplitude with an imaginary part where none is allowed.
class UnitarityViolationError : public Error {
 public:
  using Error::Error;
};

// Evaluation landed on (or numerically indistinguishable from) a pole.
class PoleError : public Error {
 public:
  PoleError(const std::string& msg, std::complex<double> z)
      : Error(msg), z_(z) {}
  std::complex<double> where() const { return z_; }

 private:
  std::complex<double> z_;
};

// Requested tolerance could not be met; carries the best estimate reached
// and the bound on its error so a caller may still decide to use it.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& msg, std::complex<double> best_estimate,
                double error_bound)
      : Error(msg), best_(best_estimate), bound_(error_bound) {}
  std::complex<double> best_estimate() const { return best_; }
  double error_bound() const { return bound_; }

 private:
  std::complex<double> best_;
  double bound_;
};

// Malformed configuration input; line <= 0 means "not line-specific".
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg, int line = 0)
      : Error(msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace sepdyn
