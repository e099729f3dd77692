#include "tubular/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tubular {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

class Stepper {
 public:
  Stepper(const OdeRhs& rhs, double t0, const Vector& y0, const OdeOptions& opt)
      : rhs_(rhs), opt_(opt), t_(t0), y_(y0) {
    const auto n = y0.size();
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    k5_.resize(n);
    k6_.resize(n);
    k7_.resize(n);
    tmp_.resize(n);
    rhs_(t_, y_, k1_);
  }

  double t() const { return t_; }
  const Vector& y() const { return y_; }
  const Vector& dy() const { return k1_; }

  // Advances to exactly t_target, calling on_step(t, y, dy) after every
  // accepted step.
  template <class OnStep>
  void advance_to(double t_target, OnStep&& on_step) {
    if (t_target < t_) {
      throw PreconditionError("ode: backward integration is not supported");
    }
    if (t_target == t_) return;
    if (h_ <= 0.0) h_ = initial_step(t_target - t_);
    bool last_rejected = false;
    while (t_ < t_target) {
      if (++steps_ > opt_.max_steps) {
        throw IntegrationError("ode: step budget exhausted at t = " +
                               std::to_string(t_));
      }
      double h = std::min({h_, opt_.max_step, t_target - t_});
      const bool lands = (t_ + h >= t_target) || (t_target - (t_ + h)) <
                                                     1e-12 * std::max(1.0, std::abs(t_target));
      if (lands) h = t_target - t_;
      if (h < opt_.min_step * std::max(1.0, std::abs(t_))) {
        throw IntegrationError("ode: step size underflow at t = " +
                               std::to_string(t_));
      }
      const double err = attempt(h);
      if (!std::isfinite(err)) {
        h_ = 0.25 * h;
        last_rejected = true;
        continue;
      }
      if (err <= 1.0) {
        t_ = lands ? t_target : t_ + h;
        y_.swap(ynew_);
        k1_.swap(k7_);
        double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
        fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
        // Keep the controller's proposal when the step was shortened to land.
        if (!lands || h >= h_) h_ = h * fac;
        last_rejected = false;
        on_step(t_, y_, k1_);
      } else {
        h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
        last_rejected = true;
      }
    }
  }

 private:
  double initial_step(double span) {
    const Vector scale =
        (opt_.atol + opt_.rtol * y_.array().abs()).matrix();
    const double d0 = (y_.array() / scale.array()).matrix().norm() /
                      std::sqrt(static_cast<double>(y_.size()));
    const double d1 = (k1_.array() / scale.array()).matrix().norm() /
                      std::sqrt(static_cast<double>(y_.size()));
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    tmp_ = y_ + h0 * k1_;
    rhs_(t_ + h0, tmp_, k2_);
    const double d2 = ((k2_ - k1_).array() / scale.array()).matrix().norm() /
                      std::sqrt(static_cast<double>(y_.size())) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                    : std::pow(0.01 / dmax, 0.2);
    return std::min({100.0 * h0, h1, span});
  }

  double attempt(double h) {
    const double t = t_;
    tmp_ = y_ + h * a21 * k1_;
    rhs_(t + c2 * h, tmp_, k2_);
    tmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
    rhs_(t + c3 * h, tmp_, k3_);
    tmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    rhs_(t + c4 * h, tmp_, k4_);
    tmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(t + c5 * h, tmp_, k5_);
    tmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(t + h, tmp_, k6_);
    ynew_ = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    rhs_(t + h, ynew_, k7_);
    const Vector err =
        h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    if (!ynew_.allFinite()) return std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double scale =
          opt_.atol + opt_.rtol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
      const double v = err[i] / scale;
      sum += v * v;
    }
    return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(1, err.size())));
  }

  const OdeRhs& rhs_;
  OdeOptions opt_;
  double t_;
  double h_ = 0.0;
  long steps_ = 0;
  Vector y_, ynew_, tmp_;
  Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_;
};

}  // namespace

void DenseTrajectory::append(double t, Vector y, Vector dy) {
  times_.push_back(t);
  states_.push_back(std::move(y));
  derivatives_.push_back(std::move(dy));
}

Vector DenseTrajectory::at(double t) const {
  if (times_.empty()) throw PreconditionError("trajectory is empty");
  const double slack = 1e-12 * std::max(1.0, std::abs(t_end()));
  if (t < t_begin() - slack || t > t_end() + slack) {
    throw PreconditionError("trajectory: t = " + std::to_string(t) +
                            " outside [" + std::to_string(t_begin()) + ", " +
                            std::to_string(t_end()) + "]");
  }
  t = std::clamp(t, t_begin(), t_end());
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.end()) return states_.back();
  std::size_t i1 = static_cast<std::size_t>(it - times_.begin());
  if (i1 == 0) return states_.front();
  const std::size_t i0 = i1 - 1;
  const double h = times_[i1] - times_[i0];
  const double s = (t - times_[i0]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * states_[i0] + h10 * h * derivatives_[i0] + h01 * states_[i1] +
         h11 * h * derivatives_[i1];
}

Vector integrate(const OdeRhs& rhs, double t0, const Vector& y0, double t1,
                 const OdeOptions& options) {
  Stepper stepper(rhs, t0, y0, options);
  stepper.advance_to(t1, [](double, const Vector&, const Vector&) {});
  return stepper.y();
}

DenseTrajectory integrate_dense(const OdeRhs& rhs, double t0, const Vector& y0,
                                double t1, const OdeOptions& options) {
  Stepper stepper(rhs, t0, y0, options);
  DenseTrajectory traj;
  traj.append(t0, y0, stepper.dy());
  stepper.advance_to(t1, [&](double t, const Vector& y, const Vector& dy) {
    traj.append(t, y, dy);
  });
  return traj;
}

std::vector<Vector> integrate_through(const OdeRhs& rhs, double t0,
                                      const Vector& y0,
                                      std::span<const double> outputs,
                                      const OdeOptions& options) {
  Stepper stepper(rhs, t0, y0, options);
  std::vector<Vector> result;
  result.reserve(outputs.size());
  for (double t : outputs) {
    stepper.advance_to(t, [](double, const Vector&, const Vector&) {});
    result.push_back(stepper.y());
  }
  return result;
}

}  // namespace tubular
