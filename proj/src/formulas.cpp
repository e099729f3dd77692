#include "tubular/formulas.hpp"

#include <cmath>
#include <sstream>

namespace tubular {

namespace {

// Quantities shared by the closed-form evaluators.
struct PairGeometry {
  FrameAtPoint frame;
  Matrix shape;
  Vector normal;
  TangentSplit s1, s2;
  Vector a1, a2;  // A_n pi_* u
  double h = 0.0;
  double r = 0.0;
};

PairGeometry pair_geometry(const Immersion& imm, const TubeTangent& u1,
                           const TubeTangent& u2) {
  if (!same_point(u1.at, u2.at))
    throw PreconditionError("tangent vectors are based at different tube points");
  validate(imm, u1.at);
  PairGeometry pg;
  pg.frame = frame_at(imm, u1.at.q);
  pg.shape = shape_operator(imm, pg.frame, u1.at.n_coeffs);
  pg.normal = pg.frame.normal_vector(u1.at.n_coeffs);
  pg.s1 = decompose(imm, pg.frame, u1);
  pg.s2 = decompose(imm, pg.frame, u2);
  pg.a1 = apply_shape_operator(pg.frame, pg.shape, pg.s1.pi_star);
  pg.a2 = apply_shape_operator(pg.frame, pg.shape, pg.s2.pi_star);
  pg.h = pg.frame.inner(pg.s1.K, pg.s2.K) + pg.frame.inner(pg.s1.pi_star, pg.s2.pi_star);
  pg.r = u1.at.r;
  return pg;
}

double space_form_curvature(const Immersion& imm, const char* who) {
  const AmbientSpace& amb = imm.ambient();
  if (amb.kind() != AmbientKind::space_form) {
    throw PreconditionError(std::string(who) + " requires a space-form ambient");
  }
  return *amb.constant_curvature();
}

}  // namespace

double thmA_expansion(const Immersion& imm, const TubeTangent& u1, const TubeTangent& u2) {
  const PairGeometry pg = pair_geometry(imm, u1, u2);
  const Vector& x = pg.frame.point;
  const Vector& n = pg.normal;
  const RiemannTensor riem = imm.ambient().riemann_at(x);
  auto R = [&](const Vector& a, const Vector& c) {
    // R(a, n, c, n)
    return pg.frame.inner(riem.apply(a, n, c), n);
  };
  const Vector& p1 = pg.s1.pi_star;
  const Vector& p2 = pg.s2.pi_star;
  const Vector& k1 = pg.s1.K;
  const Vector& k2 = pg.s2.K;
  const double quad = pg.frame.inner(pg.a1, pg.a2) + R(p1, p2) + (2.0 / 3.0) * R(p1, k2) +
                      (2.0 / 3.0) * R(p2, k1) + (1.0 / 3.0) * R(k1, k2);
  const double r = pg.r;
  return pg.h - 2.0 * pg.frame.inner(pg.a1, p2) * r + quad * r * r;
}

double thmB_exact(const Immersion& imm, const TubeTangent& u1, const TubeTangent& u2) {
  if (imm.ambient().kind() != AmbientKind::euclidean)
    throw PreconditionError("thmB_exact requires a Euclidean ambient");
  const PairGeometry pg = pair_geometry(imm, u1, u2);
  const double r = pg.r;
  return pg.h - 2.0 * pg.frame.inner(pg.a1, pg.s2.pi_star) * r +
         pg.frame.inner(pg.a1, pg.a2) * r * r;
}

std::string to_string(ThmCVariant v) {
  return v == ThmCVariant::printed ? "printed" : "corrected";
}

double thmC_exact(const Immersion& imm, const TubeTangent& u1, const TubeTangent& u2,
                  ThmCVariant variant) {
  const double k = space_form_curvature(imm, "thmC_exact");
  const PairGeometry pg = pair_geometry(imm, u1, u2);
  const double r = pg.r;
  const double sk = sin_k(k, r);
  const double ck = cos_k(k, r);
  const double ratio = r > 0.0 ? sk / r : 1.0;
  const double ratio2 = ratio * ratio;
  const double c_last =
      variant == ThmCVariant::printed ? (ratio - 1.0) * (ratio - 1.0) : 1.0 - ratio2;
  const auto& g = pg.frame;
  return ratio2 * pg.h - 2.0 * sk * ck * g.inner(pg.a1, pg.s2.pi_star) +
         sk * sk * g.inner(pg.a1, pg.a2) +
         (ck * ck - ratio2) * g.inner(pg.s1.pi_star, pg.s2.pi_star) +
         c_last * g.inner(pg.s1.K, pg.normal) * g.inner(pg.s2.K, pg.normal);
}

Vector spaceform_jacobi_closed(const Immersion& imm, const PullbackContext& ctx,
                               const TubeTangent& u, double s) {
  const double k = space_form_curvature(imm, "spaceform_jacobi_closed");
  if (!same_point(u.at, ctx.at()))
    throw PreconditionError("spaceform_jacobi_closed: tangent is based at another tube point");
  const double r = ctx.at().r;
  if (s < 0.0 || s > r * (1.0 + 1e-14))
    throw PreconditionError("spaceform_jacobi_closed: s must lie in [0, r]");
  const FrameAtPoint& f = ctx.frame();
  const TangentSplit split = decompose(imm, f, u);
  const Vector& n = ctx.normal();
  const double kn = f.inner(split.K, n);
  const Vector a_pi = apply_shape_operator(f, ctx.shape(), split.pi_star);
  const Vector rest = split.K / r - a_pi - (kn / r) * n;
  const GeodesicSample gs = ctx.geodesic().at(std::min(s, ctx.geodesic().s_max()));
  // The parallel frame's first column is xi'(0) = n, so gs.frame * e0 = xi'(s).
  const Vector e0 = ctx.to_parallel(split.pi_star);
  const Vector e1 = ctx.to_parallel(rest);
  return (s / r) * kn * gs.velocity + gs.frame * (cos_k(k, s) * e0 + sin_k(k, s) * e1);
}

Vector spaceform_jacobi_closed(const Immersion& imm, const TubeTangent& u, double s,
                               double tol) {
  const PullbackContext ctx(imm, u.at, tol);
  return spaceform_jacobi_closed(imm, ctx, u, s);
}

TangencyResult first_order_tangency(const Immersion& imm, const Vector& q,
                                    const Vector& n_coeffs,
                                    std::span<const Vector> probe_vectors, double delta,
                                    double tol) {
  require_unit(n_coeffs, imm.codim());
  if (!(delta > 0.0)) throw PreconditionError("first_order_tangency: delta must be positive");
  const auto m = static_cast<Eigen::Index>(probe_vectors.size());
  if (m == 0) throw PreconditionError("first_order_tangency: no probe vectors");

  const FrameAtPoint frame = frame_at(imm, q);
  const Matrix shape = shape_operator(imm, frame, n_coeffs);
  const TubePoint plus{q, delta, n_coeffs};
  const TubePoint minus{q, delta, Vector(-n_coeffs)};
  const PullbackContext ctx_plus(imm, plus, tol);
  const PullbackContext ctx_minus(imm, minus, tol);

  std::vector<TubeTangent> up, um;
  for (const Vector& w : probe_vectors) {
    up.push_back(horizontal_lift(imm, plus, w));
    um.push_back(horizontal_lift(imm, minus, w));
  }

  TangencyResult out;
  out.derivative.resize(m, m);
  out.ii.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    for (Eigen::Index j = i; j < m; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const double h = frame.inner(probe_vectors[iu], probe_vectors[ju]);
      const double fp = pullback_metric(imm, ctx_plus, up[iu], up[ju]) - h;
      const double fm = pullback_metric(imm, ctx_minus, um[iu], um[ju]) - h;
      const double d = (fp - fm) / (2.0 * delta);
      const double ii =
          frame.inner(apply_shape_operator(frame, shape, probe_vectors[iu]), probe_vectors[ju]);
      out.derivative(i, j) = out.derivative(j, i) = d;
      out.ii(i, j) = out.ii(j, i) = -2.0 * ii;
      out.max_defect = std::max(out.max_defect, std::abs(d + 2.0 * ii));
      out.max_abs_ii = std::max(out.max_abs_ii, std::abs(ii));
    }
  }
  return out;
}

SlopeFit convergence_order(std::span<const double> radii, std::span<const double> residuals) {
  if (radii.size() != residuals.size())
    throw PreconditionError("convergence_order: radii and residuals differ in length");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw PreconditionError("convergence_order: radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1]))
      throw PreconditionError("convergence_order: radii must be strictly decreasing");
    if (!(residuals[i] >= 0.0))
      throw PreconditionError("convergence_order: residuals must be nonnegative");
  }
  SlopeFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (residuals[i] == 0.0) {
      ++fit.dropped;
      continue;
    }
    const double x = std::log(radii[i]);
    const double y = std::log(residuals[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++fit.used;
  }
  if (fit.used < 3) {
    std::ostringstream os;
    os << "convergence_order: " << fit.used << " usable points, need at least 3";
    throw InsufficientDataError(os.str());
  }
  const double n = static_cast<double>(fit.used);
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

std::string to_string(ExpansionModel m) {
  switch (m) {
    case ExpansionModel::thmA: return "thmA";
    case ExpansionModel::thmB: return "thmB";
    case ExpansionModel::thmC_printed: return "thmC_printed";
    case ExpansionModel::thmC_corrected: return "thmC_corrected";
    case ExpansionModel::sasaki_only: return "sasaki_only";
  }
  return "?";
}

ExpansionModel parse_expansion_model(const std::string& name) {
  for (ExpansionModel m : {ExpansionModel::thmA, ExpansionModel::thmB, ExpansionModel::thmC_printed,
                           ExpansionModel::thmC_corrected, ExpansionModel::sasaki_only})
    if (to_string(m) == name) return m;
  throw PreconditionError("unknown expansion model '" + name + "'");
}

double model_value(const Immersion& imm, const TubeTangent& u1, const TubeTangent& u2,
                   ExpansionModel model) {
  switch (model) {
    case ExpansionModel::thmA: return thmA_expansion(imm, u1, u2);
    case ExpansionModel::thmB: return thmB_exact(imm, u1, u2);
    case ExpansionModel::thmC_printed: return thmC_exact(imm, u1, u2, ThmCVariant::printed);
    case ExpansionModel::thmC_corrected: return thmC_exact(imm, u1, u2, ThmCVariant::corrected);
    case ExpansionModel::sasaki_only: return sasaki(imm, u1, u2);
  }
  return 0.0;
}

ExpansionReport expansion_study(const Immersion& imm, std::span<const double> radii,
                                ExpansionModel model, const TangentPairFactory& make_pair,
                                double tol) {
  ExpansionReport report;
  report.model = model;
  report.radii.assign(radii.begin(), radii.end());
  for (double r : radii) {
    const auto [u1, u2] = make_pair(r);
    const double exact = pullback_metric(imm, u1, u2, tol);
    report.residuals.push_back(std::abs(exact - model_value(imm, u1, u2, model)));
  }
  try {
    report.fit = convergence_order(report.radii, report.residuals);
    report.fitted = true;
  } catch (const InsufficientDataError&) {
    report.fitted = false;
  }
  return report;
}

}  // namespace tubular
