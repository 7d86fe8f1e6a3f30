#pragma once

#include <stdexcept>
#include <string>

namespace hopfdelay {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the requested operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The game has no interior (mixed) equilibrium: delta1 <= 0 or delta2 <= 0.
class NoInteriorEquilibrium : public DomainError {
 public:
  NoInteriorEquilibrium(double delta1, double delta2);

  double delta1() const { return delta1_; }
  double delta2() const { return delta2_; }

 private:
  double delta1_;
  double delta2_;
};

/// Newton root tracking did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The denominator Q of an amplitude formula vanishes relative to P.
class DegenerateQ : public Error {
 public:
  DegenerateQ(double p, double q);
};

/// Integration step is too coarse for the kernel's lag structure.
class ResolutionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The integrated state left [1e-12, 1 - 1e-12].
class BlowupError : public Error {
 public:
  BlowupError(double t, double s);
};

/// Trajectory window is too short to measure a cycle.
class TooShort : public Error {
 public:
  using Error::Error;
};

}  // namespace hopfdelay
