#pragma once

#include "tubular/pullback.hpp"
#include "tubular/tube.hpp"

#include <functional>
#include <span>
#include <utility>
#include <string>
#include <vector>

namespace tubular {

// Order-r^2 expansion of exp^* g about the zero section:
//   h - 2 II_n(pi u1, pi u2) r
//     + { g(A pi u1, A pi u2) + R(pi u1, n, pi u2, n) + 2/3 R(pi u1, n, K u2, n)
//         + 2/3 R(pi u2, n, K u1, n) + 1/3 R(K u1, n, K u2, n) } r^2
// with R evaluated at f(q).
double thmA_expansion(const Immersion& imm, const TubeTangent& u1, const TubeTangent& u2);

// Exact value in a Euclidean ambient:
//   h - 2 g(A pi u1, pi u2) r + g(A pi u1, A pi u2) r^2.
double thmB_exact(const Immersion& imm, const TubeTangent& u1, const TubeTangent& u2);

enum class ThmCVariant { printed, corrected };

std::string to_string(ThmCVariant v);

// Exact value in a space form of curvature k:
//   (S^2/r^2) h - 2 S C g(A pi u1, pi u2) + S^2 g(A pi u1, A pi u2)
//   + (C^2 - S^2/r^2) g(pi u1, pi u2) + c_last g(K u1, n) g(K u2, n)
// with S = sin_k(r), C = cos_k(r). The printed coefficient is
// c_last = (S/r - 1)^2; recomputing g(Y1(r), Y2(r)) from the closed-form
// Jacobi fields gives c_last = 1 - S^2/r^2. At r = 0 both reduce to h.
double thmC_exact(const Immersion& imm, const TubeTangent& u1, const TubeTangent& u2,
                  ThmCVariant variant);

// Closed-form Jacobi field in a space form:
//   Y(s) = (s/r) g(Ku, n) xi'(s) + cos_k(s) tau_s(pi u)
//          + sin_k(s) tau_s(Ku/r - A pi u - g(Ku/r, n) n)
// using the context's parallel frame for tau_s.
Vector spaceform_jacobi_closed(const Immersion& imm, const PullbackContext& ctx,
                               const TubeTangent& u, double s);
Vector spaceform_jacobi_closed(const Immersion& imm, const TubeTangent& u, double s,
                               double tol = 1e-10);

struct TangencyResult {
  Matrix derivative;  // d/dr at 0 of (exp^* g - h) on the horizontal probes
  Matrix ii;          // -2 II_n on the probes
  double max_defect = 0.0;
  double max_abs_ii = 0.0;  // max |II_n| entry on the probes
};

// Symmetric difference through the antipodal normal: exp(p, d (-n)) is the
// radius -d point of the n ray, so horizontal lifts at (d, n) and (d, -n)
// give a central difference at r = 0.
TangencyResult first_order_tangency(const Immersion& imm, const Vector& q,
                                    const Vector& n_coeffs,
                                    std::span<const Vector> probe_vectors,
                                    double delta = 1e-4, double tol = 1e-10);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t used = 0;
  std::size_t dropped = 0;  // zero residuals left out of the fit
};

// Least-squares slope of log(residual) against log(radius). Radii must be
// positive and strictly decreasing; zero residuals are dropped.
SlopeFit convergence_order(std::span<const double> radii, std::span<const double> residuals);

enum class ExpansionModel { thmA, thmB, thmC_printed, thmC_corrected, sasaki_only };

std::string to_string(ExpansionModel m);
ExpansionModel parse_expansion_model(const std::string& name);

double model_value(const Immersion& imm, const TubeTangent& u1, const TubeTangent& u2,
                   ExpansionModel model);

struct ExpansionReport {
  ExpansionModel model = ExpansionModel::thmA;
  std::vector<double> radii;
  std::vector<double> residuals;
  SlopeFit fit;
  bool fitted = false;
};

// Builds the tangent pair at each radius with `make_pair(r)` and records
// |pullback_metric - model| along with the fitted slope (when >= 3 residuals
// are nonzero).
using TangentPairFactory = std::function<std::pair<TubeTangent, TubeTangent>(double r)>;
ExpansionReport expansion_study(const Immersion& imm, std::span<const double> radii,
                                ExpansionModel model, const TangentPairFactory& make_pair,
                                double tol = 1e-10);

}  // namespace tubular
