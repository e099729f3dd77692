#pragma once

#include "tubular/submanifold.hpp"

namespace tubular {

// The point (p, r n) of the normal tube, with p = f(q) and n = sum of
// n_coeffs[a] * normal_a in the frame at q.
struct TubePoint {
  Vector q;
  double r = 0.0;
  Vector n_coeffs;
};

bool same_point(const TubePoint& a, const TubePoint& b);

// Tangent vector to the tube carried as the germ of the curve
// t -> (q + t qdot, v(t)), where ndot holds the t-derivative of the frame
// coefficients of v(t) = r n(t).
struct TubeTangent {
  TubePoint at;
  Vector qdot;
  Vector ndot;
};

// (pi_* u, K u): the projection to M and the connection-map image.
struct TangentSplit {
  Vector pi_star;
  Vector K;
};

// Throws PreconditionError unless the point matches the immersion and n is a
// unit normal.
void validate(const Immersion& imm, const TubePoint& at);

// K u = D^perp_{pdot} v (0).
TangentSplit decompose(const Immersion& imm, const TubeTangent& u);
TangentSplit decompose(const Immersion& imm, const FrameAtPoint& frame,
                       const TubeTangent& u);

// h(u1, u2) = g(K u1, K u2) + g(pi_* u1, pi_* u2).
double sasaki(const Immersion& imm, const TubeTangent& u1, const TubeTangent& u2);

// The unique u with pi_* u = w and K u = 0.
TubeTangent horizontal_lift(const Immersion& imm, const TubePoint& at, const Vector& w);

// The unique u with pi_* u = 0 and K u = eta.
TubeTangent vertical_lift(const Immersion& imm, const TubePoint& at, const Vector& eta);

}  // namespace tubular
