#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tubular/catalog.hpp"
#include "tubular/formulas.hpp"

#include <cmath>
#include <random>

using namespace tubular;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector gaussian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> d;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

Vector outward(const Immersion& imm, const Vector& q) {
  const FrameAtPoint f = frame_at(imm, q);
  return vec({f.normal.col(0).dot(f.point) >= 0 ? 1.0 : -1.0});
}

TubeTangent unit_horizontal(const Immersion& imm, const TubePoint& at) {
  const FrameAtPoint f = frame_at(imm, at.q);
  return horizontal_lift(imm, at, f.tangent.col(0) / std::sqrt(f.induced_metric(0, 0)));
}

TubeTangent radial(const Immersion& imm, const TubePoint& at) {
  return vertical_lift(imm, at, frame_at(imm, at.q).normal_vector(at.n_coeffs));
}

TubePoint random_point(std::mt19937_64& rng, const Immersion& imm, const Vector& q, double r) {
  const Vector c = gaussian(rng, imm.codim());
  return TubePoint{q, r, c / c.norm()};
}

std::shared_ptr<const AmbientSpace> space_form(int dim, double k) {
  return std::make_shared<AmbientSpace>(AmbientSpace::space_form(dim, k));
}

}  // namespace

TEST_CASE("thmA_expansion") {
  SUBCASE("euclidean: equals the exact formula") {
    std::mt19937_64 rng(109);
    for (const char* name : {"circle", "torus", "helix"}) {
      const Immersion imm = make_builtin(name);
      for (double r : {0.0, 0.2, 0.5}) {
        const TubePoint at = random_point(rng, imm, builtin_info(name).base_points.back(), r);
        const TubeTangent u{at, gaussian(rng, imm.n_params()), gaussian(rng, imm.codim())};
        const TubeTangent v{at, gaussian(rng, imm.n_params()), gaussian(rng, imm.codim())};
        CHECK(std::abs(thmA_expansion(imm, u, v) - thmB_exact(imm, u, v)) < 1e-12);
      }
    }
  }
  SUBCASE("r = 0 is the Sasaki metric") {
    std::mt19937_64 rng(113);
    const Immersion lc = make_builtin("latitude-circle");
    const TubePoint at{vec({1.0}), 0.0, vec({1.0})};
    const TubeTangent u{at, gaussian(rng, 1), gaussian(rng, 1)};
    const TubeTangent v{at, gaussian(rng, 1), gaussian(rng, 1)};
    CHECK(std::abs(thmA_expansion(lc, u, v) - sasaki(lc, u, v)) < 1e-14);
  }
  SUBCASE("equator in S^2(1): 1 - r^2 against cos^2 r") {
    const Immersion e = make_builtin("equator");
    const TubeTangent u = unit_horizontal(e, {vec({0.0}), 0.1, vec({1.0})});
    const double a = thmA_expansion(e, u, u);
    CHECK(a == doctest::Approx(0.99).epsilon(1e-12));
    // cos^2(0.1) = 1 - r^2 + r^4 / 3 - ...
    CHECK(std::abs(a - 0.9900332889206209) == doctest::Approx(1e-4 / 3).epsilon(0.01));
  }
}

TEST_CASE("thmB_exact") {
  SUBCASE("circle(1), outward, r = 0.3") {
    const Immersion c = make_builtin("circle");
    const TubeTangent u = unit_horizontal(c, {vec({0.0}), 0.3, outward(c, vec({0.0}))});
    CHECK(thmB_exact(c, u, u) == doctest::Approx(1.69).epsilon(1e-14));
  }
  SUBCASE("vertical tangents reduce to sasaki") {
    std::mt19937_64 rng(127);
    const Immersion h = make_builtin("helix");
    const TubePoint at = random_point(rng, h, vec({0.3}), 0.4);
    const FrameAtPoint f = frame_at(h, at.q);
    const TubeTangent u = vertical_lift(h, at, f.normal * gaussian(rng, 2));
    CHECK(thmB_exact(h, u, u) == doctest::Approx(sasaki(h, u, u)).epsilon(1e-14));
  }
  SUBCASE("line: any tangent, any radius") {
    std::mt19937_64 rng(131);
    const Immersion l = make_builtin("line");
    for (double r : {0.1, 2.0, 10.0}) {
      const TubePoint at = random_point(rng, l, vec({1.0}), r);
      const TubeTangent u{at, gaussian(rng, 1), gaussian(rng, 2)};
      const TubeTangent v{at, gaussian(rng, 1), gaussian(rng, 2)};
      CHECK(std::abs(thmB_exact(l, u, v) - sasaki(l, u, v)) < 1e-12);
    }
  }
  SUBCASE("curved ambient is refused") {
    const Immersion e = make_builtin("equator");
    const TubeTangent u = unit_horizontal(e, {vec({0.0}), 0.3, vec({1.0})});
    CHECK_THROWS_AS(thmB_exact(e, u, u), PreconditionError);
  }
}

TEST_CASE("thmC_exact") {
  SUBCASE("k = 0 reduces to the euclidean formula") {
    std::mt19937_64 rng(137);
    const Immersion h = make_builtin("helix", {}, space_form(3, 0.0));
    const Immersion he = make_builtin("helix");
    for (double r : {0.1, 0.4}) {
      const TubePoint at = random_point(rng, h, vec({0.5}), r);
      const TubeTangent u{at, gaussian(rng, 1), gaussian(rng, 2)};
      const TubeTangent v{at, gaussian(rng, 1), gaussian(rng, 2)};
      for (auto variant : {ThmCVariant::printed, ThmCVariant::corrected})
        CHECK(std::abs(thmC_exact(h, u, v, variant) - thmB_exact(he, u, v)) < 1e-12);
    }
  }
  SUBCASE("radial vertical at k = 1, r = 0.2") {
    const Immersion e = make_builtin("equator");
    const TubePoint at{vec({0.0}), 0.2, vec({1.0})};
    const TubeTangent u = radial(e, at);
    CHECK(thmC_exact(e, u, u, ThmCVariant::corrected) == doctest::Approx(1.0).epsilon(1e-14));
    // sin^2(0.2)/0.04 + (sin(0.2)/0.2 - 1)^2, evaluated separately
    CHECK(thmC_exact(e, u, u, ThmCVariant::printed) == doctest::Approx(0.9867818419772606).epsilon(1e-13));
    // the ODE arbitrates
    CHECK(std::abs(pullback_metric(e, u, u) - 1.0) < 1e-9);
  }
  SUBCASE("equator in S^2(1), horizontal unit, r = 0.4") {
    const Immersion e = make_builtin("equator");
    const TubeTangent u = unit_horizontal(e, {vec({0.0}), 0.4, vec({1.0})});
    for (auto variant : {ThmCVariant::printed, ThmCVariant::corrected})
      CHECK(thmC_exact(e, u, u, variant) == doctest::Approx(0.8483533546735827).epsilon(1e-12));
  }
  SUBCASE("r = 0 is the Sasaki metric") {
    std::mt19937_64 rng(139);
    const Immersion lc = make_builtin("latitude-circle");
    const TubePoint at{vec({0.0}), 0.0, vec({-1.0})};
    const TubeTangent u{at, gaussian(rng, 1), gaussian(rng, 1)};
    CHECK(thmC_exact(lc, u, u, ThmCVariant::corrected) == doctest::Approx(sasaki(lc, u, u)).epsilon(1e-14));
  }
  SUBCASE("custom ambient is refused") {
    auto amb = std::make_shared<AmbientSpace>(
        AmbientSpace::custom(2, [](const Vector&) { return Matrix(Matrix::Identity(2, 2)); }));
    const Immersion c = make_builtin("circle", {}, amb);
    const TubeTangent u = unit_horizontal(c, {vec({0.0}), 0.3, vec({1.0})});
    CHECK_THROWS_AS(thmC_exact(c, u, u, ThmCVariant::corrected), PreconditionError);
  }
}

TEST_CASE("spaceform_jacobi_closed") {
  SUBCASE("s = 0 gives pi_* u") {
    std::mt19937_64 rng(149);
    const Immersion lc = make_builtin("latitude-circle");
    const TubeTangent u{{vec({1.0}), 0.3, vec({1.0})}, gaussian(rng, 1), gaussian(rng, 1)};
    CHECK((spaceform_jacobi_closed(lc, u, 0.0) - decompose(lc, u).pi_star).norm() < 1e-12);
  }
  SUBCASE("radial vertical at s = r is the geodesic velocity") {
    const Immersion g = make_builtin("geodesic-line");
    const TubePoint at{vec({0.4}), 0.5, vec({1.0})};
    const PullbackContext ctx(g, at, 1e-10);
    const Vector y = spaceform_jacobi_closed(g, ctx, radial(g, at), 0.5);
    const GeodesicSample gs = ctx.geodesic().at(0.5);
    CHECK((y - gs.velocity).norm() < 1e-9);
    CHECK(ctx.ambient().norm(gs.x, y) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("equator, horizontal unit: |Y(s)| = cos s and matches the ODE") {
    const Immersion e = make_builtin("equator");
    const TubePoint at{vec({0.3}), 1.0, vec({1.0})};
    const PullbackContext ctx(e, at, 1e-10);
    const TubeTangent u = unit_horizontal(e, at);
    const JacobiInitialData init = jacobi_initial_data(e, ctx, u);
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double s = i / 20.0;
      const Vector yc = spaceform_jacobi_closed(e, ctx, u, s);
      const Vector yo = jacobi_field(ctx, init.Y0, init.Y0p, s);
      worst = std::max(worst, (yc - yo).norm());
      CHECK(ctx.ambient().norm(ctx.geodesic().at(s).x, yc) == doctest::Approx(std::cos(s)).epsilon(1e-9));
    }
    CHECK(worst < 1e-8);
  }
  SUBCASE("general tangents against the ODE") {
    std::mt19937_64 rng(151);
    for (double k : {1.0, -1.0}) {
      const Immersion h = make_builtin("helix", {{"a", 0.5}, {"b", 0.2}}, space_form(3, k));
      const TubePoint at = random_point(rng, h, vec({0.7}), 0.5);
      const PullbackContext ctx(h, at, 1e-10);
      const TubeTangent u{at, gaussian(rng, 1), gaussian(rng, 2)};
      const JacobiInitialData init = jacobi_initial_data(h, ctx, u);
      for (double s : {0.1, 0.3, 0.5})
        CHECK((spaceform_jacobi_closed(h, ctx, u, s) - jacobi_field(ctx, init.Y0, init.Y0p, s)).norm() < 1e-8);
    }
  }
}

TEST_CASE("first_order_tangency") {
  SUBCASE("line") {
    const Immersion l = make_builtin("line");
    const Vector probes[] = {vec({1, 0, 0})};
    const TangencyResult t = first_order_tangency(l, vec({0.5}), vec({0.6, 0.8}), probes);
    CHECK(t.derivative.norm() < 1e-6);
    CHECK(t.ii.norm() == 0.0);
    CHECK(t.max_defect <= 1e-6);
  }
  SUBCASE("circle(1), outward") {
    const Immersion c = make_builtin("circle");
    const Vector probes[] = {vec({0, 1})};
    const TangencyResult t = first_order_tangency(c, vec({0.0}), outward(c, vec({0.0})), probes);
    CHECK(t.derivative(0, 0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(t.ii(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t.max_defect <= 1e-6);
  }
  SUBCASE("equator in S^2(1)") {
    const Immersion e = make_builtin("equator");
    const FrameAtPoint f = frame_at(e, vec({0.3}));
    const Vector probes[] = {f.tangent.col(0)};
    const TangencyResult t = first_order_tangency(e, vec({0.3}), vec({1.0}), probes);
    CHECK(t.derivative.norm() < 1e-6);
    CHECK(t.ii.norm() < 1e-8);
    CHECK(t.max_defect <= 1e-6);
  }
  SUBCASE("torus, two probes") {
    const Immersion t = make_builtin("torus");
    const Vector q = vec({0.3, 0.7});
    const FrameAtPoint f = frame_at(t, q);
    const Vector probes[] = {f.tangent.col(0), f.tangent.col(1)};
    const TangencyResult res = first_order_tangency(t, q, vec({1.0}), probes);
    CHECK(res.max_defect <= 1e-6);
    CHECK(res.max_abs_ii > 0.1);
  }
  SUBCASE("errors") {
    const Immersion c = make_builtin("circle");
    const Vector probes[] = {vec({0, 1})};
    CHECK_THROWS_AS(first_order_tangency(c, vec({0.0}), vec({0.9}), probes), PreconditionError);
    CHECK_THROWS_AS(first_order_tangency(c, vec({0.0}), vec({1.0}), {}), PreconditionError);
    CHECK_THROWS_AS(first_order_tangency(c, vec({0.0}), vec({1.0}), probes, 0.0), PreconditionError);
  }
}

TEST_CASE("convergence_order") {
  const double radii[] = {0.2, 0.1, 0.05, 0.025};
  SUBCASE("pure powers") {
    double cubic[4], square[4];
    for (int i = 0; i < 4; ++i) {
      cubic[i] = 7.0 * std::pow(radii[i], 3);
      square[i] = 0.3 * radii[i] * radii[i];
    }
    CHECK(convergence_order(radii, cubic).slope == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(convergence_order(radii, square).slope == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("r^3 (1 + r)") {
    double res[4];
    for (int i = 0; i < 4; ++i) res[i] = 2.0 * std::pow(radii[i], 3) * (1 + radii[i]);
    const SlopeFit fit = convergence_order(radii, res);
    // independent least-squares fit of the same points
    CHECK(fit.slope == doctest::Approx(3.0749345684167766).epsilon(1e-12));
    CHECK(fit.slope >= 2.9);
    CHECK(fit.slope <= 3.15);
    CHECK(fit.used == 4);
  }
  SUBCASE("zeros are dropped") {
    const double res[] = {8e-3, 0.0, 1.25e-4, 1.5625e-5};
    const SlopeFit fit = convergence_order(radii, res);
    CHECK(fit.dropped == 1);
    CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("errors") {
    const double few[] = {1e-3, 0.0, 0.0, 1e-6};
    CHECK_THROWS_AS(convergence_order(radii, few), InsufficientDataError);
    const double two_r[] = {0.2, 0.1};
    const double two_e[] = {1e-3, 1e-4};
    CHECK_THROWS_AS(convergence_order(two_r, two_e), InsufficientDataError);
    const double increasing[] = {0.1, 0.2, 0.3};
    const double ok[] = {1, 2, 3};
    CHECK_THROWS_AS(convergence_order(increasing, ok), PreconditionError);
    const double negative[] = {1, -2, 3};
    const double decreasing[] = {0.3, 0.2, 0.1};
    CHECK_THROWS_AS(convergence_order(decreasing, negative), PreconditionError);
    const double longer[] = {1, 2, 3, 4};
    CHECK_THROWS_AS(convergence_order(decreasing, longer), PreconditionError);
  }
}

TEST_CASE("euclidean exactness over the catalog") {
  std::mt19937_64 rng(157);
  std::uniform_real_distribution<double> ur(0.02, 0.3);
  for (const char* name : {"circle", "sphere", "torus", "helix", "line", "plane"}) {
    const Immersion imm = make_builtin(name);
    const auto& bases = builtin_info(name).base_points;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const TubePoint at = random_point(rng, imm, bases[static_cast<std::size_t>(i) % bases.size()], ur(rng));
      const TubeTangent u{at, gaussian(rng, imm.n_params()), gaussian(rng, imm.codim())};
      const TubeTangent v{at, gaussian(rng, imm.n_params()), gaussian(rng, imm.codim())};
      worst = std::max(worst, std::abs(pullback_metric(imm, u, v) - thmB_exact(imm, u, v)));
    }
    CAPTURE(name);
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("space-form exactness of the corrected variant") {
  std::mt19937_64 rng(163);
  std::uniform_real_distribution<double> ur(0.05, 0.5);
  std::vector<std::pair<std::string, Immersion>> cases;
  cases.emplace_back("equator", make_builtin("equator"));
  cases.emplace_back("latitude-circle", make_builtin("latitude-circle"));
  cases.emplace_back("geodesic-line", make_builtin("geodesic-line"));
  cases.emplace_back("latitude-circle phi=0.3", make_builtin("latitude-circle", {{"phi", 0.3}}));
  for (double k : {1.0, -1.0})
    cases.emplace_back("helix k=" + std::to_string(k),
                       make_builtin("helix", {{"a", 0.5}, {"b", 0.2}}, space_form(3, k)));
  for (const auto& [label, imm] : cases) {
    double worst = 0.0, worst_printed_radial = 0.0;
    for (int i = 0; i < 20; ++i) {
      const TubePoint at = random_point(rng, imm, vec({0.1 * i}), ur(rng));
      const TubeTangent u{at, gaussian(rng, imm.n_params()), gaussian(rng, imm.codim())};
      const TubeTangent v{at, gaussian(rng, imm.n_params()), gaussian(rng, imm.codim())};
      worst = std::max(worst, std::abs(pullback_metric(imm, u, v) - thmC_exact(imm, u, v, ThmCVariant::corrected)));
      const TubeTangent w = radial(imm, at);
      worst_printed_radial =
          std::max(worst_printed_radial, std::abs(pullback_metric(imm, w, w) - thmC_exact(imm, w, w, ThmCVariant::printed)));
    }
    CAPTURE(label);
    CHECK(worst <= 1e-7);
    // the printed coefficient misses the Gauss lemma by far more than the tolerance
    CHECK(worst_printed_radial > 1e-4);
  }
}

TEST_CASE("expansion is the Taylor polynomial of the exact space-form value") {
  std::mt19937_64 rng(167);
  const double radii[] = {0.2, 0.1, 0.05, 0.025};
  std::vector<Immersion> cases = {make_builtin("latitude-circle"), make_builtin("geodesic-line"),
                                  make_builtin("helix", {{"a", 0.5}, {"b", 0.2}}, space_form(3, -1.0))};
  for (const Immersion& imm : cases) {
    const Vector c = gaussian(rng, imm.codim());
    const Vector qd = gaussian(rng, imm.n_params()), nd1 = gaussian(rng, imm.codim());
    const Vector qd2 = gaussian(rng, imm.n_params()), nd2 = gaussian(rng, imm.codim());
    double res[4];
    for (int i = 0; i < 4; ++i) {
      const TubePoint at{vec({0.4}), radii[i], c / c.norm()};
      const TubeTangent u{at, qd, nd1}, v{at, qd2, nd2};
      res[i] = std::abs(thmC_exact(imm, u, v, ThmCVariant::corrected) - thmA_expansion(imm, u, v));
    }
    CHECK(convergence_order(radii, res).slope >= 2.8);
  }
}

TEST_CASE("symmetry of every evaluator") {
  std::mt19937_64 rng(173);
  const Immersion lc = make_builtin("latitude-circle");
  const Immersion t = make_builtin("torus");
  for (int i = 0; i < 10; ++i) {
    const TubePoint a = random_point(rng, lc, vec({0.3 * i}), 0.05 * i);
    const TubeTangent u{a, gaussian(rng, 1), gaussian(rng, 1)}, v{a, gaussian(rng, 1), gaussian(rng, 1)};
    CHECK(std::abs(thmA_expansion(lc, u, v) - thmA_expansion(lc, v, u)) < 1e-10);
    for (auto variant : {ThmCVariant::printed, ThmCVariant::corrected})
      CHECK(std::abs(thmC_exact(lc, u, v, variant) - thmC_exact(lc, v, u, variant)) < 1e-10);
    const TubePoint b = random_point(rng, t, vec({0.3 * i, 1.0}), 0.05 * i);
    const TubeTangent x{b, gaussian(rng, 2), gaussian(rng, 1)}, y{b, gaussian(rng, 2), gaussian(rng, 1)};
    CHECK(std::abs(thmB_exact(t, x, y) - thmB_exact(t, y, x)) < 1e-10);
    CHECK(std::abs(thmA_expansion(t, x, y) - thmA_expansion(t, y, x)) < 1e-10);
  }
}

TEST_CASE("expansion models") {
  for (auto m : {ExpansionModel::thmA, ExpansionModel::thmB, ExpansionModel::thmC_printed,
                 ExpansionModel::thmC_corrected, ExpansionModel::sasaki_only})
    CHECK(parse_expansion_model(to_string(m)) == m);
  CHECK_THROWS_AS(parse_expansion_model("thmD"), PreconditionError);

  const Immersion lc = make_builtin("latitude-circle");
  const double radii[] = {0.2, 0.1, 0.05, 0.025};
  const TangentPairFactory pair = [&](double r) {
    const TubeTangent u = unit_horizontal(lc, {vec({0.0}), r, vec({1.0})});
    return std::make_pair(u, u);
  };
  const ExpansionReport sas = expansion_study(lc, radii, ExpansionModel::sasaki_only, pair);
  REQUIRE(sas.fitted);
  CHECK(sas.fit.slope == doctest::Approx(1.0).epsilon(0.05));
  const ExpansionReport cor = expansion_study(lc, radii, ExpansionModel::thmC_corrected, pair);
  for (double r : cor.residuals) CHECK(r <= 1e-7);
}
