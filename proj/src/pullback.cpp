#include "tubular/pullback.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tubular {

namespace {

GeodesicRecord normal_geodesic(const AmbientSpace& amb, const FrameAtPoint& frame,
                               const Vector& normal, double r, double tol) {
  if (!(r > 0.0))
    throw PreconditionError(
        "pullback: r must be positive; at r = 0 use the Sasaki metric (its limit)");
  return geodesic(amb, frame.point, normal, r, tol);
}

}  // namespace

PullbackContext::PullbackContext(const Immersion& imm, const TubePoint& at, double tol)
    : ambient_(imm.ambient_ptr()),
      at_((validate(imm, at), at)),
      frame_(frame_at(imm, at.q)),
      shape_(shape_operator(imm, frame_, at.n_coeffs)),
      normal_(frame_.normal_vector(at.n_coeffs)),
      geodesic_(normal_geodesic(*ambient_, frame_, normal_, at.r, tol)),
      tol_(tol) {}

Vector PullbackContext::to_parallel(const Vector& v) const {
  const Matrix e0 = geodesic_.sample(0).frame;
  return e0.transpose() * (frame_.metric * v);
}

Vector PullbackContext::from_parallel(const Vector& c, double s) const {
  return geodesic_.at(s).frame * c;
}

Vector PullbackContext::transport(const Vector& v, double s) const {
  return from_parallel(to_parallel(v), s);
}

Matrix PullbackContext::curvature_operator(double s) const {
  const GeodesicSample gs = geodesic_.at(s);
  const RiemannTensor riem = ambient_->riemann_at(gs.x);
  const int n = ambient_->dim();
  Matrix w(n, n);
  for (int b = 0; b < n; ++b) w.col(b) = riem.apply(gs.frame.col(b), gs.velocity, gs.velocity);
  return gs.frame.transpose() * ambient_->metric_at(gs.x) * w;
}

JacobiInitialData jacobi_initial_data(const Immersion& imm, const PullbackContext& ctx,
                                      const TubeTangent& u) {
  if (!same_point(u.at, ctx.at()))
    throw PreconditionError("pullback: tangent vector is based at a different tube point");
  JacobiInitialData d;
  d.split = decompose(imm, ctx.frame(), u);
  d.Y0 = d.split.pi_star;
  d.Y0p = d.split.K / ctx.at().r - apply_shape_operator(ctx.frame(), ctx.shape(), d.split.pi_star);
  return d;
}

Vector exp_tube(const Immersion& imm, const TubePoint& at, double tol) {
  validate(imm, at);
  const FrameAtPoint frame = frame_at(imm, at.q);
  if (at.r == 0.0) return frame.point;
  const GeodesicRecord rec =
      geodesic(imm.ambient(), frame.point, frame.normal_vector(at.n_coeffs), at.r, tol);
  return rec.sample(rec.size() - 1).x;
}

namespace {

// Integrates `fields` Jacobi fields at once; state = [y_1, y_1', y_2, y_2', ...]
// in parallel-frame coordinates.
std::vector<Vector> integrate_jacobi(const PullbackContext& ctx, const Vector& z0,
                                     std::span<const double> s_values) {
  const int n = ctx.ambient().dim();
  const int fields = static_cast<int>(z0.size() / (2 * n));
  for (double s : s_values) {
    if (s < 0.0 || s > ctx.geodesic().s_max() * (1.0 + 1e-14)) {
      std::ostringstream os;
      os << "jacobi_field: s = " << s << " outside [0, " << ctx.geodesic().s_max() << "]";
      throw PreconditionError(os.str());
    }
  }
  const OdeRhs rhs = [&ctx, n, fields](double s, const Vector& z, Vector& dz) {
    const Matrix m = ctx.curvature_operator(std::min(s, ctx.geodesic().s_max()));
    for (int f = 0; f < fields; ++f) {
      const auto base = 2 * n * f;
      dz.segment(base, n) = z.segment(base + n, n);
      dz.segment(base + n, n) = -m * z.segment(base, n);
    }
  };
  OdeOptions opt;
  opt.rtol = ctx.tol();
  opt.atol = ctx.tol() * 1e-2;
  std::vector<double> clamped(s_values.begin(), s_values.end());
  for (double& s : clamped) s = std::min(s, ctx.geodesic().s_max());
  return integrate_through(rhs, 0.0, z0, clamped, opt);
}

}  // namespace

std::vector<Vector> jacobi_field(const PullbackContext& ctx, const Vector& Y0,
                                 const Vector& Y0p, std::span<const double> s_values) {
  const int n = ctx.ambient().dim();
  if (Y0.size() != n || Y0p.size() != n)
    throw PreconditionError("jacobi_field: initial vectors have the wrong dimension");
  Vector z0(2 * n);
  z0.head(n) = ctx.to_parallel(Y0);
  z0.tail(n) = ctx.to_parallel(Y0p);
  const std::vector<Vector> states = integrate_jacobi(ctx, z0, s_values);
  std::vector<Vector> out;
  out.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    out.push_back(ctx.from_parallel(states[i].head(n), s_values[i]));
  return out;
}

Vector jacobi_field(const PullbackContext& ctx, const Vector& Y0, const Vector& Y0p,
                    double s) {
  const double sv[] = {s};
  return jacobi_field(ctx, Y0, Y0p, sv).front();
}

double pullback_metric(const Immersion& imm, const PullbackContext& ctx,
                       const TubeTangent& u1, const TubeTangent& u2) {
  const int n = ctx.ambient().dim();
  const JacobiInitialData d1 = jacobi_initial_data(imm, ctx, u1);
  const JacobiInitialData d2 = jacobi_initial_data(imm, ctx, u2);
  Vector z0(4 * n);
  z0.segment(0, n) = ctx.to_parallel(d1.Y0);
  z0.segment(n, n) = ctx.to_parallel(d1.Y0p);
  z0.segment(2 * n, n) = ctx.to_parallel(d2.Y0);
  z0.segment(3 * n, n) = ctx.to_parallel(d2.Y0p);
  const double r[] = {ctx.at().r};
  const Vector z = integrate_jacobi(ctx, z0, r).front();
  // The parallel frame is orthonormal, so g(Y1, Y2) is the Euclidean dot
  // product of the frame coordinates.
  return z.segment(0, n).dot(z.segment(2 * n, n));
}

double pullback_metric(const Immersion& imm, const TubeTangent& u1, const TubeTangent& u2,
                       double tol) {
  if (!same_point(u1.at, u2.at))
    throw PreconditionError("pullback: tangent vectors are based at different tube points");
  const PullbackContext ctx(imm, u1.at, tol);
  return pullback_metric(imm, ctx, u1, u2);
}

double pullback_metric_fd(const Immersion& imm, const TubeTangent& u1,
                          const TubeTangent& u2, double tol, double h_step) {
  if (!same_point(u1.at, u2.at))
    throw PreconditionError("pullback_fd: tangent vectors are based at different tube points");
  validate(imm, u1.at);
  if (!(u1.at.r > 0.0))
    throw PreconditionError(
        "pullback_fd: r must be positive; at r = 0 use the Sasaki metric (its limit)");
  if (!(h_step > 0.0)) throw PreconditionError("pullback_fd: h_step must be positive");

  const TubePoint& at = u1.at;
  const FrameAtPoint frame = frame_at(imm, at.q);
  const double ode_tol = std::min(tol, 1e-12);

  // exp along the germ t -> (q + t qdot, r n + t ndot) in pinned frames.
  auto exp_along = [&](const TubeTangent& u, double t) -> Vector {
    const FrameAtPoint f = frame_at(imm, at.q + t * u.qdot, frame.reference_columns);
    const Vector coeffs = at.r * at.n_coeffs + t * u.ndot;
    const double len = coeffs.norm();
    if (len == 0.0) return f.point;
    const Vector v = f.normal * (coeffs / len);
    const GeodesicRecord rec = geodesic(imm.ambient(), f.point, v, len, ode_tol);
    return rec.sample(rec.size() - 1).x;
  };
  auto push_forward = [&](const TubeTangent& u) -> Vector {
    return (exp_along(u, h_step) - exp_along(u, -h_step)) / (2.0 * h_step);
  };

  const Vector x = exp_tube(imm, at, ode_tol);
  const Vector y1 = push_forward(u1);
  const Vector y2 = push_forward(u2);
  return imm.ambient().inner(x, y1, y2);
}

}  // namespace tubular
