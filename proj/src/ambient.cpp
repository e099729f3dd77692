#include "tubular/ambient.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace tubular {

Vector Christoffel::contract(const Vector& u, const Vector& v) const {
  Vector out = Vector::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < dim_; ++j) {
      if (u[j] == 0.0) continue;
      for (int k = 0; k < dim_; ++k) acc += (*this)(i, j, k) * u[j] * v[k];
    }
    out[i] = acc;
  }
  return out;
}

Vector RiemannTensor::apply(const Vector& u, const Vector& v, const Vector& w) const {
  Vector out = Vector::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        for (int l = 0; l < dim_; ++l) acc += (*this)(i, j, k, l) * w[j] * u[k] * v[l];
    out[i] = acc;
  }
  return out;
}

AmbientSpace AmbientSpace::euclidean(int dim) {
  if (dim < 1) throw PreconditionError("ambient dimension must be positive");
  AmbientSpace s;
  s.dim_ = dim;
  s.kind_ = AmbientKind::euclidean;
  return s;
}

AmbientSpace AmbientSpace::space_form(int dim, double k, double chart_bound) {
  if (dim < 2) throw PreconditionError("space form needs dimension >= 2");
  AmbientSpace s;
  s.dim_ = dim;
  s.kind_ = AmbientKind::space_form;
  s.k_ = k;
  if (k > 0.0) {
    s.chart_bound_ = chart_bound > 0.0 ? chart_bound : 4.0 / std::sqrt(k);
  } else {
    s.chart_bound_ = chart_bound;
  }
  return s;
}

AmbientSpace AmbientSpace::custom(int dim, MetricFn metric, DomainFn domain) {
  if (dim < 1) throw PreconditionError("ambient dimension must be positive");
  if (!metric) throw PreconditionError("custom ambient needs a metric function");
  AmbientSpace s;
  s.dim_ = dim;
  s.kind_ = AmbientKind::custom;
  s.mode_ = DerivMode::finite_difference;
  s.metric_fn_ = std::move(metric);
  s.domain_fn_ = std::move(domain);
  return s;
}

AmbientSpace AmbientSpace::with_finite_differences(double step,
                                                   double curvature_step) const {
  if (!(step > 0.0) || !(curvature_step > 0.0))
    throw PreconditionError("finite-difference steps must be positive");
  AmbientSpace s = *this;
  s.mode_ = DerivMode::finite_difference;
  s.fd_step_ = step;
  s.curvature_step_ = curvature_step;
  return s;
}

std::optional<double> AmbientSpace::constant_curvature() const {
  switch (kind_) {
    case AmbientKind::euclidean: return 0.0;
    case AmbientKind::space_form: return k_;
    case AmbientKind::custom: return std::nullopt;
  }
  return std::nullopt;
}

bool AmbientSpace::in_domain(const Vector& x) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  switch (kind_) {
    case AmbientKind::euclidean: return true;
    case AmbientKind::space_form: {
      const double r2 = x.squaredNorm();
      if (k_ < 0.0) return 1.0 + 0.25 * k_ * r2 > 0.0;
      if (k_ > 0.0) return r2 <= chart_bound_ * chart_bound_;
      return true;
    }
    case AmbientKind::custom: return !domain_fn_ || domain_fn_(x);
  }
  return false;
}

void AmbientSpace::require_dim(const Vector& v, const char* what) const {
  if (v.size() != dim_) {
    std::ostringstream os;
    os << what << " has " << v.size() << " components, ambient dimension is " << dim_;
    throw PreconditionError(os.str());
  }
}

void AmbientSpace::require_domain(const Vector& x) const {
  require_dim(x, "point");
  if (!in_domain(x)) {
    std::ostringstream os;
    os << "point (" << x.transpose() << ") is outside the chart domain";
    throw DomainError(os.str());
  }
}

Matrix AmbientSpace::metric_at(const Vector& x) const {
  require_domain(x);
  switch (kind_) {
    case AmbientKind::euclidean: return Matrix::Identity(dim_, dim_);
    case AmbientKind::space_form: {
      const double lambda = 1.0 / (1.0 + 0.25 * k_ * x.squaredNorm());
      return lambda * lambda * Matrix::Identity(dim_, dim_);
    }
    case AmbientKind::custom: {
      Matrix g = metric_fn_(x);
      if (g.rows() != dim_ || g.cols() != dim_)
        throw NumericalError("custom metric returned a matrix of the wrong shape");
      return g;
    }
  }
  return {};
}

double AmbientSpace::inner(const Vector& x, const Vector& a, const Vector& b) const {
  return a.dot(metric_at(x) * b);
}

double AmbientSpace::norm(const Vector& x, const Vector& a) const {
  return std::sqrt(inner(x, a, a));
}

Matrix AmbientSpace::metric_inverse(const Matrix& g, const Vector& x) const {
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    std::ostringstream os;
    os << "metric at (" << x.transpose() << ") is not positive definite; eigenvalues ["
       << eig.eigenvalues().transpose() << "]";
    throw NumericalError(os.str());
  }
  Matrix inv = llt.solve(Matrix::Identity(dim_, dim_));
  const double cond_est = g.diagonal().maxCoeff() * inv.diagonal().maxCoeff();
  if (!std::isfinite(cond_est) || cond_est > 1e14) {
    std::ostringstream os;
    os << "metric at (" << x.transpose() << ") is singular to working precision (condition ~ "
       << cond_est << ")";
    throw NumericalError(os.str());
  }
  return inv;
}

Christoffel AmbientSpace::christoffel_numeric(const Vector& x) const {
  const Matrix g = metric_at(x);
  const Matrix ginv = metric_inverse(g, x);
  const double h = fd_step_ * std::max(1.0, x.norm());
  std::vector<Matrix> dg(static_cast<std::size_t>(dim_));
  for (int m = 0; m < dim_; ++m) {
    Vector xp = x, xm = x;
    xp[m] += h;
    xm[m] -= h;
    dg[static_cast<std::size_t>(m)] = (metric_at(xp) - metric_at(xm)) / (2.0 * h);
  }
  // Gamma_ljk = 1/2 (d_j g_lk + d_k g_lj - d_l g_jk)
  Christoffel lower(dim_);
  for (int l = 0; l < dim_; ++l)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        lower(l, j, k) = 0.5 * (dg[static_cast<std::size_t>(j)](l, k) +
                                dg[static_cast<std::size_t>(k)](l, j) -
                                dg[static_cast<std::size_t>(l)](j, k));
  Christoffel gamma(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = j; k < dim_; ++k) {
        double acc = 0.0;
        for (int l = 0; l < dim_; ++l) acc += ginv(i, l) * lower(l, j, k);
        gamma(i, j, k) = acc;
        gamma(i, k, j) = acc;
      }
  return gamma;
}

namespace {

// Gradient and Hessian of log(lambda) for the conformal space-form chart.
void conformal_log_derivatives(double k, const Vector& x, Vector& dphi, Matrix& ddphi) {
  const double lambda = 1.0 / (1.0 + 0.25 * k * x.squaredNorm());
  dphi = -0.5 * k * lambda * x;
  ddphi = 0.25 * k * k * lambda * lambda * (x * x.transpose()) -
          0.5 * k * lambda * Matrix::Identity(x.size(), x.size());
}

}  // namespace

Christoffel AmbientSpace::christoffel_at(const Vector& x) const {
  require_domain(x);
  if (mode_ == DerivMode::finite_difference) return christoffel_numeric(x);
  Christoffel gamma(dim_);
  if (kind_ == AmbientKind::euclidean) return gamma;
  // kind_ == space_form
  Vector dphi;
  Matrix ddphi;
  conformal_log_derivatives(k_, x, dphi, ddphi);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) {
        double v = 0.0;
        if (i == j) v += dphi[k];
        if (i == k) v += dphi[j];
        if (j == k) v -= dphi[i];
        gamma(i, j, k) = v;
      }
  return gamma;
}

std::vector<Christoffel> AmbientSpace::christoffel_derivative_at(const Vector& x) const {
  require_domain(x);
  std::vector<Christoffel> out(static_cast<std::size_t>(dim_), Christoffel(dim_));
  if (mode_ == DerivMode::finite_difference) {
    const double h = curvature_step_ * std::max(1.0, x.norm());
    for (int m = 0; m < dim_; ++m) {
      Vector xp = x, xm = x;
      xp[m] += h;
      xm[m] -= h;
      const Christoffel gp = christoffel_numeric(xp);
      const Christoffel gm = christoffel_numeric(xm);
      auto& d = out[static_cast<std::size_t>(m)];
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
          for (int k = 0; k < dim_; ++k) d(i, j, k) = (gp(i, j, k) - gm(i, j, k)) / (2.0 * h);
    }
    return out;
  }
  if (kind_ == AmbientKind::euclidean) return out;
  Vector dphi;
  Matrix ddphi;
  conformal_log_derivatives(k_, x, dphi, ddphi);
  for (int m = 0; m < dim_; ++m) {
    auto& d = out[static_cast<std::size_t>(m)];
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) {
          double v = 0.0;
          if (i == j) v += ddphi(k, m);
          if (i == k) v += ddphi(j, m);
          if (j == k) v -= ddphi(i, m);
          d(i, j, k) = v;
        }
  }
  return out;
}

RiemannTensor AmbientSpace::riemann_at(const Vector& x) const {
  const Christoffel gamma = christoffel_at(x);
  const std::vector<Christoffel> dgamma = christoffel_derivative_at(x);
  RiemannTensor r(dim_);
  const auto d = [&](int m) -> const Christoffel& { return dgamma[static_cast<std::size_t>(m)]; };
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        for (int l = k + 1; l < dim_; ++l) {
          double v = d(k)(i, l, j) - d(l)(i, k, j);
          for (int m = 0; m < dim_; ++m) v += gamma(i, k, m) * gamma(m, l, j) - gamma(i, l, m) * gamma(m, k, j);
          r(i, j, k, l) = v;
          r(i, j, l, k) = -v;
        }
  return r;
}

Vector AmbientSpace::riemann_op(const Vector& x, const Vector& u, const Vector& v,
                                const Vector& w) const {
  require_dim(u, "u");
  require_dim(v, "v");
  require_dim(w, "w");
  return riemann_at(x).apply(u, v, w);
}

double AmbientSpace::riemann4(const Vector& x, const Vector& a, const Vector& b,
                              const Vector& c, const Vector& d) const {
  require_dim(d, "d");
  return inner(x, riemann_op(x, a, b, c), d);
}

double sin_k(double k, double s) {
  if (std::abs(k) * s * s < 1e-8) {
    const double s2 = s * s;
    return s * (1.0 - k * s2 / 6.0 + k * k * s2 * s2 / 120.0 - k * k * k * s2 * s2 * s2 / 5040.0);
  }
  if (k > 0.0) {
    const double rk = std::sqrt(k);
    return std::sin(rk * s) / rk;
  }
  const double rk = std::sqrt(-k);
  return std::sinh(rk * s) / rk;
}

double cos_k(double k, double s) {
  if (std::abs(k) * s * s < 1e-8) {
    const double s2 = s * s;
    return 1.0 - k * s2 / 2.0 + k * k * s2 * s2 / 24.0 - k * k * k * s2 * s2 * s2 / 720.0;
  }
  if (k > 0.0) return std::cos(std::sqrt(k) * s);
  return std::cosh(std::sqrt(-k) * s);
}

Matrix orthonormal_frame(const Matrix& g, const Vector& first) {
  const auto n = g.rows();
  Matrix frame(n, n);
  const double first_norm = std::sqrt(first.dot(g * first));
  if (!(first_norm > 0.0)) throw PreconditionError("frame: first vector is zero");
  frame.col(0) = first / first_norm;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index c = 1; c < n; ++c) {
    // Pick the coordinate vector with the largest residual.
    double best = -1.0;
    Eigen::Index best_i = -1;
    Vector best_v;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      Vector v = Vector::Unit(n, i);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index b = 0; b < c; ++b) v -= frame.col(b).dot(g * v) * frame.col(b);
      const double norm = std::sqrt(v.dot(g * v)) / std::sqrt(g(i, i));
      if (norm > best) {
        best = norm;
        best_i = i;
        best_v = v;
      }
    }
    used[static_cast<std::size_t>(best_i)] = true;
    frame.col(c) = best_v / std::sqrt(best_v.dot(g * best_v));
  }
  return frame;
}

GeodesicRecord::GeodesicRecord(int dim, DenseTrajectory trajectory, double tol)
    : dim_(dim), trajectory_(std::move(trajectory)), tol_(tol) {}

GeodesicSample GeodesicRecord::unpack(double s, const Vector& state) const {
  GeodesicSample out;
  out.s = s;
  out.x = state.head(dim_);
  out.velocity = state.segment(dim_, dim_);
  out.frame = Eigen::Map<const Matrix>(state.data() + 2 * dim_, dim_, dim_);
  return out;
}

GeodesicSample GeodesicRecord::sample(std::size_t i) const {
  return unpack(trajectory_.times()[i], trajectory_.state(i));
}

GeodesicSample GeodesicRecord::at(double s) const { return unpack(s, trajectory_.at(s)); }

double geodesic_max_step(double s_max, double tol) {
  // Cubic Hermite error ~ h^4 |y''''| / 384.
  const double h_interp = 0.5 * std::pow(384.0 * 10.0 * tol, 0.25);
  return std::min(s_max / 16.0, h_interp);
}

GeodesicRecord geodesic(const AmbientSpace& space, const Vector& x0, const Vector& v0,
                        double s_max, double tol) {
  const int n = space.dim();
  if (v0.size() != n) throw PreconditionError("geodesic: velocity has wrong dimension");
  if (!(s_max > 0.0)) throw PreconditionError("geodesic: s_max must be positive");
  if (!(tol > 0.0)) throw PreconditionError("geodesic: tol must be positive");
  if (v0.norm() == 0.0) throw PreconditionError("geodesic: initial velocity is zero");
  space.require_domain(x0);

  const Matrix frame0 = orthonormal_frame(space.metric_at(x0), v0);
  Vector y0(2 * n + n * n);
  y0.head(n) = x0;
  y0.segment(n, n) = v0;
  y0.tail(n * n) = Eigen::Map<const Vector>(frame0.data(), n * n);

  const OdeRhs rhs = [&space, n](double s, const Vector& y, Vector& dy) {
    const Vector x = y.head(n);
    if (!space.in_domain(x)) {
      std::ostringstream os;
      os << "geodesic left the chart domain at s = " << s;
      throw DomainError(os.str(), s);
    }
    const Christoffel gamma = space.christoffel_at(x);
    const Vector v = y.segment(n, n);
    dy.head(n) = v;
    dy.segment(n, n) = -gamma.contract(v, v);
    for (int c = 0; c < n; ++c) {
      const Vector e = y.segment(2 * n + c * n, n);
      dy.segment(2 * n + c * n, n) = -gamma.contract(v, e);
    }
  };

  OdeOptions opt;
  opt.rtol = tol;
  opt.atol = tol * 1e-2;
  opt.max_step = geodesic_max_step(s_max, tol);
  return GeodesicRecord(n, integrate_dense(rhs, 0.0, y0, s_max, opt), tol);
}

}  // namespace tubular
