#pragma once

#include "tubular/types.hpp"

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace tubular {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  // Relative to max(1, |t|).
  double min_step = 1e-14;
  long max_steps = 1'000'000;
};

// dy/dt = f(t, y); the right-hand side writes into a preallocated vector.
using OdeRhs = std::function<void(double t, const Vector& y, Vector& dydt)>;

// Accepted steps of an integration together with the derivative at each node.
// Evaluation between nodes uses cubic Hermite interpolation.
class DenseTrajectory {
 public:
  DenseTrajectory() = default;

  void append(double t, Vector y, Vector dy);

  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

  const std::vector<double>& times() const { return times_; }
  const Vector& state(std::size_t i) const { return states_[i]; }
  const Vector& derivative(std::size_t i) const { return derivatives_[i]; }

  // Interpolated state; throws PreconditionError outside [t_begin, t_end].
  Vector at(double t) const;

 private:
  std::vector<double> times_;
  std::vector<Vector> states_;
  std::vector<Vector> derivatives_;
};

// Dormand-Prince 5(4) with FSAL and standard step-size control. Only forward
// integration (t1 >= t0) is supported.
Vector integrate(const OdeRhs& rhs, double t0, const Vector& y0, double t1,
                 const OdeOptions& options = {});

// Same as integrate() but records every accepted step.
DenseTrajectory integrate_dense(const OdeRhs& rhs, double t0, const Vector& y0,
                                double t1, const OdeOptions& options = {});

// Integrates through the (nondecreasing) output times, stepping exactly onto
// each of them, and returns the state there.
std::vector<Vector> integrate_through(const OdeRhs& rhs, double t0,
                                      const Vector& y0,
                                      std::span<const double> outputs,
                                      const OdeOptions& options = {});

}  // namespace tubular
