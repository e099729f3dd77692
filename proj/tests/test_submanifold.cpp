#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tubular/catalog.hpp"
#include "tubular/submanifold.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace tubular;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector unit_coeffs(std::mt19937_64& rng, int p) {
  std::normal_distribution<double> d;
  Vector c(p);
  for (int i = 0; i < p; ++i) c[i] = d(rng);
  return c / c.norm();
}

void check_frame(const FrameAtPoint& f, double tol = 1e-10) {
  const Matrix gnn = f.normal.transpose() * f.metric * f.normal;
  CHECK((gnn - Matrix::Identity(f.codim(), f.codim())).norm() < tol);
  CHECK((f.normal.transpose() * f.metric * f.tangent).norm() < tol);
}

// Shape operator straight from its definition: extend n by constant
// coefficients in the (pinned) normal frame, differentiate along each
// coordinate curve, add the connection term and take minus the tangential part.
Matrix shape_by_definition(const Immersion& imm, const Vector& q, const Vector& c) {
  const FrameAtPoint f0 = frame_at(imm, q);
  const int n = imm.n_params();
  const Vector nvec = f0.normal_vector(c);
  const Christoffel gam = imm.ambient().christoffel_at(f0.point);
  Matrix A(n, n);
  const double h = 1e-5;
  for (int j = 0; j < n; ++j) {
    const Vector e = Vector::Unit(n, j);
    const Vector np = frame_at(imm, q + h * e, f0.reference_columns).normal_vector(c);
    const Vector nm = frame_at(imm, q - h * e, f0.reference_columns).normal_vector(c);
    const Vector Dn = (np - nm) / (2 * h) + gam.contract(f0.tangent.col(j), nvec);
    A.col(j) = -f0.tangent_coordinates(Dn);
  }
  return A;
}

Vector cross(const Vector& a, const Vector& b) {
  const Eigen::Vector3d c = Eigen::Vector3d(a).cross(Eigen::Vector3d(b));
  return Vector(c);
}

}  // namespace

TEST_CASE("frame_at") {
  SUBCASE("unit circle at q = 0") {
    const Immersion c = make_builtin("circle");
    const FrameAtPoint f = frame_at(c, vec({0.0}));
    CHECK((f.point - vec({1, 0})).norm() < 1e-15);
    CHECK((f.tangent.col(0) - vec({0, 1})).norm() < 1e-15);
    CHECK(std::abs(std::abs(f.normal(0, 0)) - 1.0) < 1e-15);
    CHECK(std::abs(f.normal(1, 0)) < 1e-15);
    check_frame(f);
  }
  SUBCASE("x-axis line spans e2, e3") {
    const Immersion l = make_builtin("line");
    for (double q : {-3.0, 0.0, 2.5}) {
      const FrameAtPoint f = frame_at(l, vec({q}));
      CHECK(f.normal.row(0).norm() < 1e-15);
      CHECK(std::abs(std::abs(f.normal.bottomRows(2).determinant()) - 1.0) < 1e-15);
    }
  }
  SUBCASE("helix at q = 0") {
    const Immersion h = make_builtin("helix");
    const FrameAtPoint f = frame_at(h, vec({0.0}));
    CHECK((f.tangent.col(0) - vec({0, 1, 0.5})).norm() < 1e-15);
    const Vector t = vec({0, 1, 0.5});
    for (int a = 0; a < 2; ++a) {
      CHECK(std::abs(f.normal.col(a).dot(t)) < 1e-12);
      CHECK(std::abs(f.normal.col(a).norm() - 1.0) < 1e-12);
    }
    CHECK(std::abs(f.normal.col(0).dot(f.normal.col(1))) < 1e-12);
  }
  SUBCASE("every builtin at its base points") {
    for (const auto& info : catalog()) {
      const Immersion imm = make_builtin(info.name);
      for (const Vector& q : info.base_points) check_frame(frame_at(imm, q));
    }
  }
  SUBCASE("degenerate reference basis") {
    // Reference basis whose only non-tangent direction is excluded.
    const Immersion l = make_builtin("line");
    Matrix ref = Matrix::Identity(3, 3);
    ref.col(1) = ref.col(0);
    CHECK_THROWS_AS(l.with_reference_basis(ref), PreconditionError);
    const int pinned[] = {0, 1};
    CHECK_THROWS_AS(frame_at(l, vec({0.0}), pinned), DegenerateFrameError);
  }
  SUBCASE("non-immersion is rejected") {
    auto amb = std::make_shared<AmbientSpace>(AmbientSpace::euclidean(2));
    CHECK_THROWS_AS(Immersion(amb, 1, [](const Vector& q) { return Vector(vec({q[0] * q[0], 0.0})); }),
                    PreconditionError);
    CHECK_THROWS_AS(Immersion(amb, 2, [](const Vector& q) { return q; }), PreconditionError);
  }
}

TEST_CASE("shape_operator examples") {
  SUBCASE("line is zero in every normal direction") {
    const Immersion l = make_builtin("line");
    for (double a : {0.0, 0.7, 2.0}) {
      const Matrix A = shape_operator(l, vec({1.3}), vec({std::cos(a), std::sin(a)}));
      CHECK(A.norm() < 1e-12);
    }
  }
  SUBCASE("unit circle with outward normal is -1") {
    const Immersion c = make_builtin("circle");
    for (double q : {0.0, 1.0, 4.0}) {
      const FrameAtPoint f = frame_at(c, vec({q}));
      // coefficient that makes n point away from the origin
      const double sign = f.normal.col(0).dot(f.point) > 0 ? 1.0 : -1.0;
      const Matrix A = shape_operator(c, vec({q}), vec({sign}));
      CHECK(A(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    }
  }
  SUBCASE("sphere of radius rho is -(1/rho) I") {
    for (double rho : {1.0, 2.5}) {
      const Immersion s = make_builtin("sphere", {{"rho", rho}});
      const Vector q = vec({1.0, 0.5});
      const FrameAtPoint f = frame_at(s, q);
      const double sign = f.normal.col(0).dot(f.point) > 0 ? 1.0 : -1.0;
      const Matrix A = shape_operator(s, q, vec({sign}));
      CHECK((A + Matrix::Identity(2, 2) / rho).norm() < 1e-12);
    }
  }
  SUBCASE("non-unit normal is rejected") {
    const Immersion c = make_builtin("circle");
    CHECK_THROWS_AS(shape_operator(c, vec({0.0}), vec({0.5})), PreconditionError);
  }
}

TEST_CASE("shape operator agrees with its definition") {
  std::mt19937_64 rng(41);
  for (const char* name : {"sphere", "torus", "helix", "latitude-circle", "equator"}) {
    const Immersion imm = make_builtin(name);
    for (const Vector& q : builtin_info(name).base_points) {
      const Vector c = unit_coeffs(rng, imm.codim());
      const Matrix A = shape_operator(imm, q, c);
      CHECK((A - shape_by_definition(imm, q, c)).norm() < 1e-8);
    }
  }
}

TEST_CASE("second_fundamental_form") {
  SUBCASE("line") {
    const Immersion l = make_builtin("line");
    CHECK(std::abs(second_fundamental_form(l, vec({0.0}), vec({1, 0}), vec({1, 0, 0}), vec({1, 0, 0}))) < 1e-15);
  }
  SUBCASE("unit circle outward, unit tangent") {
    const Immersion c = make_builtin("circle");
    const FrameAtPoint f = frame_at(c, vec({0.0}));
    const double sign = f.normal(0, 0) > 0 ? 1.0 : -1.0;
    CHECK(second_fundamental_form(c, vec({0.0}), vec({sign}), vec({0, 1}), vec({0, 1})) ==
          doctest::Approx(-1.0).epsilon(1e-12));
  }
  SUBCASE("equator of the unit sphere is totally geodesic") {
    const Immersion e = make_builtin("equator");
    for (double q : {0.0, 0.3, 1.0}) {
      const FrameAtPoint f = frame_at(e, vec({q}));
      const Vector X = f.tangent.col(0);
      CHECK(std::abs(second_fundamental_form(e, vec({q}), vec({1.0}), X, X)) < 1e-10);
    }
  }
  SUBCASE("latitude circle at 45 degrees has |II(unit, unit)| = 1") {
    // A circle at distance d from the pole of S^2 has geodesic curvature cot d.
    const Immersion lc = make_builtin("latitude-circle");
    const FrameAtPoint f = frame_at(lc, vec({0.0}));
    const Vector X = f.tangent.col(0) / std::sqrt(f.induced_metric(0, 0));
    // normal pointing away from the chart origin (the pole)
    const double sign = f.normal.col(0).dot(f.point) > 0 ? 1.0 : -1.0;
    CHECK(second_fundamental_form(lc, vec({0.0}), vec({sign}), X, X) == doctest::Approx(-1.0).epsilon(1e-10));
    const Immersion lc30 = make_builtin("latitude-circle", {{"phi", std::numbers::pi / 6}});
    const FrameAtPoint g = frame_at(lc30, vec({0.0}));
    const Vector Y = g.tangent.col(0) / std::sqrt(g.induced_metric(0, 0));
    const double s2 = g.normal.col(0).dot(g.point) > 0 ? 1.0 : -1.0;
    // distance pi/3 from the pole
    CHECK(second_fundamental_form(lc30, vec({0.0}), vec({s2}), Y, Y) ==
          doctest::Approx(-1.0 / std::tan(std::numbers::pi / 3)).epsilon(1e-10));
  }
}

TEST_CASE("self-adjointness of II") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> d;
  for (const auto& info : catalog()) {
    const Immersion imm = make_builtin(info.name);
    for (const Vector& q : info.base_points) {
      const FrameAtPoint f = frame_at(imm, q);
      const Vector c = unit_coeffs(rng, imm.codim());
      Vector a(imm.n_params()), b(imm.n_params());
      for (int i = 0; i < imm.n_params(); ++i) {
        a[i] = d(rng);
        b[i] = d(rng);
      }
      const Vector X = f.tangent * a, Y = f.tangent * b;
      CHECK(std::abs(second_fundamental_form(imm, q, c, X, Y) - second_fundamental_form(imm, q, c, Y, X)) <
            1e-8);
    }
  }
}

TEST_CASE("shape operator does not depend on the reference seed") {
  std::mt19937_64 rng(47);
  for (const char* name : {"helix", "torus", "plane", "sphere"}) {
    const Immersion imm = make_builtin(name);
    const int N = imm.ambient_dim();
    Matrix raw(N, N);
    std::normal_distribution<double> d;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) raw(i, j) = d(rng);
    const Matrix Q = Eigen::HouseholderQR<Matrix>(raw).householderQ();
    const Immersion rotated = imm.with_reference_basis(Q);
    for (const Vector& q : builtin_info(name).base_points) {
      const FrameAtPoint f1 = frame_at(imm, q);
      const FrameAtPoint f2 = frame_at(rotated, q);
      const Vector c1 = unit_coeffs(rng, imm.codim());
      const Vector n = f1.normal_vector(c1);
      const Vector c2 = f2.normal.transpose() * f2.metric * n;
      CHECK((shape_operator(imm, q, c1) - shape_operator(rotated, q, c2)).norm() < 1e-8);
    }
  }
}

TEST_CASE("totally geodesic detection") {
  std::mt19937_64 rng(53);
  for (const auto& info : catalog()) {
    const Immersion imm = make_builtin(info.name);
    double worst = 0.0;
    for (const Vector& q : info.base_points)
      for (int trial = 0; trial < 5; ++trial)
        worst = std::max(worst, shape_operator(imm, q, unit_coeffs(rng, imm.codim())).norm());
    CAPTURE(info.name);
    if (info.totally_geodesic)
      CHECK(worst <= 1e-7);
    else
      CHECK(worst > 1e-3);
  }
}

TEST_CASE("normal_connection_coeffs") {
  SUBCASE("hypersurfaces give a zero 1x1 matrix") {
    for (const char* name : {"circle", "sphere", "torus", "equator", "latitude-circle"}) {
      const Immersion imm = make_builtin(name);
      const Vector q = builtin_info(name).base_points.back();
      const Matrix w = normal_connection_coeffs(imm, q, Vector::Ones(imm.n_params()));
      CHECK(w.rows() == 1);
      CHECK(std::abs(w(0, 0)) < 1e-9);
    }
  }
  SUBCASE("flat plane in R^4") {
    const Immersion p = make_builtin("plane");
    CHECK(normal_connection_coeffs(p, vec({0.5, -1.0}), vec({0.3, 0.8})).norm() < 1e-12);
  }
  SUBCASE("helix against its Frenet apparatus") {
    // Frenet data of (a cos q, a sin q, b q): speed c, torsion b / c^2.
    const double a = 1.0, b = 0.5;
    const double c = std::sqrt(a * a + b * b);
    const double tau = b / (c * c);
    const Immersion h = make_builtin("helix");
    auto frenet = [&](double q) {
      const Vector T = vec({-a * std::sin(q), a * std::cos(q), b}) / c;
      const Vector N = vec({-std::cos(q), -std::sin(q), 0.0});
      return std::pair<Vector, Vector>(T, N);
    };
    for (double q : {0.0, 0.4, 1.3, 3.0}) {
      const FrameAtPoint f = frame_at(h, vec({q}));
      // rotation angle of normal_0 within the (N, B) plane, pinned frames
      auto angle = [&](double qq) {
        const auto [T, N] = frenet(qq);
        const Vector B = cross(T, N);
        const Vector n0 = frame_at(h, vec({qq}), f.reference_columns).normal.col(0);
        return std::atan2(n0.dot(B), n0.dot(N));
      };
      const double dq = 1e-5;
      const double dtheta = std::remainder(angle(q + dq) - angle(q - dq), 2 * std::numbers::pi) / (2 * dq);
      const auto [T, N] = frenet(q);
      const double orient = cross(f.normal.col(0), f.normal.col(1)).dot(T);
      const Matrix w = normal_connection_coeffs(h, vec({q}), vec({1.0}));
      CHECK(std::abs(w(1, 0) - orient * (dtheta + c * tau)) < 1e-7);
      CHECK(std::abs(w(0, 1) + w(1, 0)) < 1e-7);
      CHECK(std::abs(w(0, 0)) < 1e-7);
    }
  }
  SUBCASE("antisymmetry in a curved ambient") {
    auto amb = std::make_shared<AmbientSpace>(AmbientSpace::space_form(3, 1.0));
    const Immersion h = make_builtin("helix", {{"a", 0.5}, {"b", 0.2}}, amb);
    for (double q : {0.0, 1.3}) {
      const Matrix w = normal_connection_coeffs(h, vec({q}), vec({0.7}));
      CHECK((w + w.transpose()).norm() < 1e-7);
    }
  }
}
