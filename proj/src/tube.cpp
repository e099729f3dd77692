#include "tubular/tube.hpp"

#include <cmath>
#include <sstream>

namespace tubular {

bool same_point(const TubePoint& a, const TubePoint& b) {
  return a.r == b.r && a.q.size() == b.q.size() && a.q == b.q &&
         a.n_coeffs.size() == b.n_coeffs.size() && a.n_coeffs == b.n_coeffs;
}

void validate(const Immersion& imm, const TubePoint& at) {
  if (at.q.size() != imm.n_params())
    throw PreconditionError("tube point: q has the wrong dimension");
  if (!(at.r >= 0.0) || !std::isfinite(at.r))
    throw PreconditionError("tube point: r must be finite and nonnegative");
  require_unit(at.n_coeffs, imm.codim(), 1e-12);
}

namespace {

void validate_tangent(const Immersion& imm, const TubeTangent& u) {
  validate(imm, u.at);
  if (u.qdot.size() != imm.n_params())
    throw PreconditionError("tube tangent: qdot has the wrong dimension");
  if (u.ndot.size() != imm.codim())
    throw PreconditionError("tube tangent: ndot has the wrong dimension");
}

}  // namespace

TangentSplit decompose(const Immersion& imm, const FrameAtPoint& frame,
                       const TubeTangent& u) {
  validate_tangent(imm, u);
  TangentSplit out;
  out.pi_star = frame.tangent * u.qdot;
  Vector coeffs = u.ndot;
  if (u.at.r != 0.0) {
    const Matrix omega = normal_connection_coeffs(imm, frame, u.qdot);
    coeffs += u.at.r * (omega * u.at.n_coeffs);
  }
  out.K = frame.normal * coeffs;
  return out;
}

TangentSplit decompose(const Immersion& imm, const TubeTangent& u) {
  return decompose(imm, frame_at(imm, u.at.q), u);
}

double sasaki(const Immersion& imm, const TubeTangent& u1, const TubeTangent& u2) {
  if (!same_point(u1.at, u2.at))
    throw PreconditionError("sasaki: tangent vectors are based at different tube points");
  const FrameAtPoint frame = frame_at(imm, u1.at.q);
  const TangentSplit a = decompose(imm, frame, u1);
  const TangentSplit b = decompose(imm, frame, u2);
  return frame.inner(a.K, b.K) + frame.inner(a.pi_star, b.pi_star);
}

TubeTangent horizontal_lift(const Immersion& imm, const TubePoint& at, const Vector& w) {
  validate(imm, at);
  const FrameAtPoint frame = frame_at(imm, at.q);
  if (w.size() != imm.ambient_dim())
    throw PreconditionError("horizontal lift: w has the wrong dimension");
  const Vector qdot = frame.tangent_coordinates(w);
  const Vector residual = w - frame.tangent * qdot;
  const double scale = std::max(1.0, std::sqrt(frame.inner(w, w)));
  if (std::sqrt(frame.inner(residual, residual)) > 1e-8 * scale) {
    std::ostringstream os;
    os << "horizontal lift: w is not tangent to M (normal residual "
       << std::sqrt(frame.inner(residual, residual)) << ")";
    throw PreconditionError(os.str());
  }
  TubeTangent u{at, qdot, Vector::Zero(imm.codim())};
  if (at.r != 0.0) u.ndot = -at.r * (normal_connection_coeffs(imm, frame, qdot) * at.n_coeffs);
  return u;
}

TubeTangent vertical_lift(const Immersion& imm, const TubePoint& at, const Vector& eta) {
  validate(imm, at);
  const FrameAtPoint frame = frame_at(imm, at.q);
  if (eta.size() != imm.ambient_dim())
    throw PreconditionError("vertical lift: eta has the wrong dimension");
  const Vector coeffs = frame.normal.transpose() * (frame.metric * eta);
  const Vector residual = eta - frame.normal * coeffs;
  const double scale = std::max(1.0, std::sqrt(frame.inner(eta, eta)));
  if (std::sqrt(frame.inner(residual, residual)) > 1e-8 * scale) {
    std::ostringstream os;
    os << "vertical lift: eta is not normal to M (tangential residual "
       << std::sqrt(frame.inner(residual, residual)) << ")";
    throw PreconditionError(os.str());
  }
  return TubeTangent{at, Vector::Zero(imm.n_params()), coeffs};
}

}  // namespace tubular
