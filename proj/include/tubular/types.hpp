#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace tubular {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated an operation's precondition (non-unit normal, mismatched
// base points, a vector that is not tangent, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A point left the coordinate chart. For geodesic and Jacobi integration the
// arclength at which the exit was detected is carried along.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, double exit_parameter = 0.0)
      : Error(what), exit_parameter_(exit_parameter) {}
  double exit_parameter() const { return exit_parameter_; }

 private:
  double exit_parameter_;
};

// Singular or badly conditioned linear algebra.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Adaptive integration could not proceed (step-size underflow, step budget).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

// Gram-Schmidt against the reference basis could not complete a normal frame.
class DegenerateFrameError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace tubular
