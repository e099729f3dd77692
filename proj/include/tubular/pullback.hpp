#pragma once

#include "tubular/ambient.hpp"
#include "tubular/submanifold.hpp"
#include "tubular/tube.hpp"

#include <memory>
#include <span>
#include <vector>

namespace tubular {

// Everything needed to evaluate Jacobi fields along the normal geodesic
// xi(s) = exp(p, s n), 0 <= s <= r, of one tube point.
class PullbackContext {
 public:
  // Requires r > 0.
  PullbackContext(const Immersion& imm, const TubePoint& at, double tol);

  const TubePoint& at() const { return at_; }
  const FrameAtPoint& frame() const { return frame_; }
  const Matrix& shape() const { return shape_; }
  const Vector& normal() const { return normal_; }
  const GeodesicRecord& geodesic() const { return geodesic_; }
  const AmbientSpace& ambient() const { return *ambient_; }
  double tol() const { return tol_; }

  // Coordinates of a vector at f(q) in the parallel frame at s = 0.
  Vector to_parallel(const Vector& v) const;
  // Ambient components at xi(s) of the vector with parallel coordinates c.
  Vector from_parallel(const Vector& c, double s) const;
  // Parallel translation tau_s of a vector at f(q).
  Vector transport(const Vector& v, double s) const;

  // Matrix M(s) with M(a, b) = g(R(E_b, xi') xi', E_a) in the parallel frame.
  Matrix curvature_operator(double s) const;

 private:
  std::shared_ptr<const AmbientSpace> ambient_;
  TubePoint at_;
  FrameAtPoint frame_;
  Matrix shape_;
  Vector normal_;
  GeodesicRecord geodesic_;
  double tol_;
};

// Initial data of the Jacobi field Y(s) = exp_* U(s) attached to u:
// Y(0) = pi_* u, Y'(0) = K u / r - A_n pi_* u.
struct JacobiInitialData {
  Vector Y0;
  Vector Y0p;
  TangentSplit split;
};

JacobiInitialData jacobi_initial_data(const Immersion& imm, const PullbackContext& ctx,
                                      const TubeTangent& u);

// exp(p, r n): end point of the unit-speed geodesic with xi(0) = f(q),
// xi'(0) = n.
Vector exp_tube(const Immersion& imm, const TubePoint& at, double tol = 1e-10);

// Solves Y'' + R(Y, xi') xi' = 0 in the parallel frame and returns Y(s) in
// ambient components at xi(s).
Vector jacobi_field(const PullbackContext& ctx, const Vector& Y0, const Vector& Y0p,
                    double s);

// Y at each of the nondecreasing arclengths `s_values`, in ambient components.
std::vector<Vector> jacobi_field(const PullbackContext& ctx, const Vector& Y0,
                                 const Vector& Y0p, std::span<const double> s_values);

// exp^* g(u1, u2) = g(Y1(r), Y2(r)). Requires r > 0; at r = 0 the value is
// sasaki(u1, u2) by continuity.
double pullback_metric(const Immersion& imm, const TubeTangent& u1, const TubeTangent& u2,
                       double tol = 1e-10);
double pullback_metric(const Immersion& imm, const PullbackContext& ctx,
                       const TubeTangent& u1, const TubeTangent& u2);

// Independent route: central differences of exp along the curve germs of u1
// and u2, paired with g at the image point.
double pullback_metric_fd(const Immersion& imm, const TubeTangent& u1,
                          const TubeTangent& u2, double tol = 1e-10,
                          double h_step = 1e-4);

}  // namespace tubular
