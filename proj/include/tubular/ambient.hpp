#pragma once

#include "tubular/ode.hpp"
#include "tubular/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace tubular {

// Connection coefficients Gamma^i_jk, stored densely.
class Christoffel {
 public:
  explicit Christoffel(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

  int dim() const { return dim_; }
  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

  // (Gamma(u, v))^i = Gamma^i_jk u^j v^k
  Vector contract(const Vector& u, const Vector& v) const;

 private:
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>((i * dim_ + j) * dim_ + k);
  }
  int dim_;
  std::vector<double> data_;
};

// Curvature components R^i_jkl with R(d_k, d_l) d_j = R^i_jkl d_i and
// R(X, Y) = D_X D_Y - D_Y D_X - D_[X,Y].
class RiemannTensor {
 public:
  explicit RiemannTensor(int dim)
      : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim * dim), 0.0) {}

  int dim() const { return dim_; }
  double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }

  // R_op(u, v) w
  Vector apply(const Vector& u, const Vector& v, const Vector& w) const;

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return static_cast<std::size_t>(((i * dim_ + j) * dim_ + k) * dim_ + l);
  }
  int dim_;
  std::vector<double> data_;
};

enum class AmbientKind { euclidean, space_form, custom };

enum class DerivMode { analytic, finite_difference };

// A Riemannian manifold described in one coordinate chart.
//
// Space forms of curvature k use the conformal chart g = lambda^2 * I with
// lambda(x) = 1 / (1 + (k/4)|x|^2): the Poincare ball for k < 0 and the
// stereographic chart (capped at |x| <= chart_bound) for k > 0.
//
// Curvature convention: riemann_op(u, v, w) = R(u, v) w so that Jacobi fields
// satisfy Y'' + R(Y, xi') xi' = 0, and riemann4(a, b, c, d) = g(R(a, b) c, d).
// With these, R(X, n, Z, n) = -k (g(X, Z) - g(X, n) g(Z, n)) on a space form.
class AmbientSpace {
 public:
  using MetricFn = std::function<Matrix(const Vector&)>;
  using DomainFn = std::function<bool(const Vector&)>;

  static AmbientSpace euclidean(int dim);
  // chart_bound <= 0 selects the default cap 4/sqrt(k) for k > 0.
  static AmbientSpace space_form(int dim, double k, double chart_bound = 0.0);
  // Custom metrics are always differentiated by finite differences.
  static AmbientSpace custom(int dim, MetricFn metric, DomainFn domain = {});

  // Copy that differentiates the metric numerically. `step` is the relative
  // step for metric derivatives, `curvature_step` the relative step of the
  // outer difference of Christoffel symbols.
  AmbientSpace with_finite_differences(double step = 1e-5,
                                       double curvature_step = 1e-3) const;

  int dim() const { return dim_; }
  AmbientKind kind() const { return kind_; }
  DerivMode deriv_mode() const { return mode_; }
  // Sectional curvature for space forms (0 for euclidean), empty for custom.
  std::optional<double> constant_curvature() const;
  double fd_step() const { return fd_step_; }
  double curvature_step() const { return curvature_step_; }

  bool in_domain(const Vector& x) const;
  void require_domain(const Vector& x) const;

  Matrix metric_at(const Vector& x) const;
  double inner(const Vector& x, const Vector& a, const Vector& b) const;
  double norm(const Vector& x, const Vector& a) const;

  Christoffel christoffel_at(const Vector& x) const;
  // dGamma[m](i, j, k) = d_m Gamma^i_jk
  std::vector<Christoffel> christoffel_derivative_at(const Vector& x) const;
  RiemannTensor riemann_at(const Vector& x) const;

  Vector riemann_op(const Vector& x, const Vector& u, const Vector& v,
                    const Vector& w) const;
  double riemann4(const Vector& x, const Vector& a, const Vector& b,
                  const Vector& c, const Vector& d) const;

 private:
  AmbientSpace() = default;

  void require_dim(const Vector& v, const char* what) const;
  Matrix metric_inverse(const Matrix& g, const Vector& x) const;
  Christoffel christoffel_numeric(const Vector& x) const;

  int dim_ = 0;
  AmbientKind kind_ = AmbientKind::euclidean;
  DerivMode mode_ = DerivMode::analytic;
  double k_ = 0.0;
  double chart_bound_ = 0.0;
  double fd_step_ = 1e-5;
  double curvature_step_ = 1e-3;
  MetricFn metric_fn_;
  DomainFn domain_fn_;
};

// sin_k(s) = sin(sqrt(k) s)/sqrt(k), s, sinh(sqrt(-k) s)/sqrt(-k) for k > 0,
// k = 0, k < 0; cos_k is its derivative. Series near |k| s^2 = 0.
double sin_k(double k, double s);
double cos_k(double k, double s);

struct GeodesicSample {
  double s = 0.0;
  Vector x;
  Vector velocity;
  // Columns form a g-orthonormal frame parallel along the geodesic; column 0
  // is the transported unit initial direction.
  Matrix frame;
};

// Geodesic with a parallel orthonormal frame, densely interpolable on
// [0, s_max].
class GeodesicRecord {
 public:
  GeodesicRecord(int dim, DenseTrajectory trajectory, double tol);

  int dim() const { return dim_; }
  double s_max() const { return trajectory_.t_end(); }
  double tol() const { return tol_; }
  std::size_t size() const { return trajectory_.size(); }

  GeodesicSample sample(std::size_t i) const;
  GeodesicSample at(double s) const;

 private:
  GeodesicSample unpack(double s, const Vector& state) const;

  int dim_;
  DenseTrajectory trajectory_;
  double tol_;
};

// Integrates x'' + Gamma(x', x') = 0 from (x0, v0) to s_max, transporting the
// frame obtained by Gram-Schmidt of (v0, e_1, ..., e_N). `tol` is the relative
// tolerance; the absolute tolerance is tol / 100.
GeodesicRecord geodesic(const AmbientSpace& space, const Vector& x0,
                        const Vector& v0, double s_max, double tol = 1e-10);

// Largest step that keeps cubic Hermite interpolation of the record below
// 10 * tol for unit-scale solutions.
double geodesic_max_step(double s_max, double tol);

// g-orthonormal basis whose first vector is first / |first|; the remaining
// columns come from the coordinate basis.
Matrix orthonormal_frame(const Matrix& g, const Vector& first);

}  // namespace tubular
