#include "tubular/submanifold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tubular {

Immersion::Immersion(std::shared_ptr<const AmbientSpace> ambient, int n_params,
                     MapFn map, JacobianFn jacobian, HessianFn hessian,
                     std::vector<Vector> probe_points, double fd_step)
    : ambient_(std::move(ambient)),
      n_params_(n_params),
      map_(std::move(map)),
      jacobian_(std::move(jacobian)),
      hessian_(std::move(hessian)),
      fd_step_(fd_step) {
  if (!ambient_) throw PreconditionError("immersion: missing ambient space");
  if (!map_) throw PreconditionError("immersion: missing map function");
  if (n_params_ < 1) throw PreconditionError("immersion: need at least one parameter");
  if (codim() < 1) {
    std::ostringstream os;
    os << "immersion: codimension must be >= 1 (ambient " << ambient_->dim()
       << ", parameters " << n_params_ << ")";
    throw PreconditionError(os.str());
  }
  if (!(fd_step_ > 0.0)) throw PreconditionError("immersion: fd_step must be positive");
  reference_basis_ = Matrix::Identity(ambient_->dim(), ambient_->dim());
  if (probe_points.empty()) probe_points.push_back(Vector::Zero(n_params_));
  for (const Vector& q : probe_points) {
    const Vector x = point(q);
    if (x.size() != ambient_->dim())
      throw PreconditionError("immersion: map returns the wrong number of coordinates");
    const Matrix j = this->jacobian(q);
    Eigen::JacobiSVD<Matrix> svd(j);
    const auto& sv = svd.singularValues();
    if (sv.size() < n_params_ || sv[n_params_ - 1] <= 1e-10 * std::max(1.0, sv[0])) {
      std::ostringstream os;
      os << "immersion: Jacobian is rank deficient at q = (" << q.transpose() << ")";
      throw PreconditionError(os.str());
    }
  }
}

void Immersion::require_params(const Vector& q) const {
  if (q.size() != n_params_) {
    std::ostringstream os;
    os << "immersion: expected " << n_params_ << " parameters, got " << q.size();
    throw PreconditionError(os.str());
  }
}

Vector Immersion::point(const Vector& q) const {
  require_params(q);
  return map_(q);
}

Matrix Immersion::jacobian(const Vector& q) const {
  require_params(q);
  if (jacobian_) return jacobian_(q);
  const int n = ambient_->dim();
  Matrix j(n, n_params_);
  const double h = fd_step_ * std::max(1.0, q.norm());
  for (int i = 0; i < n_params_; ++i) {
    Vector qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    j.col(i) = (map_(qp) - map_(qm)) / (2.0 * h);
  }
  return j;
}

Matrix Immersion::hessian(const Vector& q) const {
  require_params(q);
  if (hessian_) return hessian_(q);
  const int n = ambient_->dim();
  const int m = n_params_;
  Matrix out(n, m * m);
  if (jacobian_) {
    const double h = fd_step_ * std::max(1.0, q.norm());
    for (int i = 0; i < m; ++i) {
      Vector qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      const Matrix dj = (jacobian_(qp) - jacobian_(qm)) / (2.0 * h);
      for (int j = 0; j < m; ++j) out.col(i * m + j) = dj.col(j);
    }
  } else {
    // Second differences of the map; the step balances h^2 truncation
    // against eps / h^2 round-off.
    const double h = 10.0 * fd_step_ * std::max(1.0, q.norm());
    const Vector f0 = map_(q);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        Vector col;
        if (i == j) {
          Vector qp = q, qm = q;
          qp[i] += h;
          qm[i] -= h;
          col = (map_(qp) - 2.0 * f0 + map_(qm)) / (h * h);
        } else {
          Vector qpp = q, qpm = q, qmp = q, qmm = q;
          qpp[i] += h; qpp[j] += h;
          qpm[i] += h; qpm[j] -= h;
          qmp[i] -= h; qmp[j] += h;
          qmm[i] -= h; qmm[j] -= h;
          col = (map_(qpp) - map_(qpm) - map_(qmp) + map_(qmm)) / (4.0 * h * h);
        }
        out.col(i * m + j) = col;
        out.col(j * m + i) = col;
      }
    }
  }
  return out;
}

Immersion Immersion::with_reference_basis(Matrix basis) const {
  const int n = ambient_->dim();
  if (basis.rows() != n || basis.cols() != n)
    throw PreconditionError("reference basis must be a square matrix of ambient size");
  if (std::abs(basis.determinant()) < 1e-12)
    throw PreconditionError("reference basis is singular");
  Immersion out = *this;
  out.reference_basis_ = std::move(basis);
  return out;
}

Vector FrameAtPoint::normal_vector(const Vector& coeffs) const {
  if (coeffs.size() != normal.cols())
    throw PreconditionError("normal coefficients do not match the codimension");
  return normal * coeffs;
}

Vector FrameAtPoint::tangent_coordinates(const Vector& X) const {
  return induced_metric.ldlt().solve(tangent.transpose() * (metric * X));
}

Vector FrameAtPoint::tangential_part(const Vector& X) const {
  return tangent * tangent_coordinates(X);
}

Vector FrameAtPoint::normal_part(const Vector& X) const {
  return normal * (normal.transpose() * (metric * X));
}

namespace {

FrameAtPoint build_frame(const Immersion& imm, const Vector& q,
                         std::span<const int> pinned) {
  const AmbientSpace& amb = imm.ambient();
  FrameAtPoint f;
  f.q = q;
  f.point = imm.point(q);
  f.metric = amb.metric_at(f.point);
  f.tangent = imm.jacobian(q);
  f.induced_metric = f.tangent.transpose() * f.metric * f.tangent;
  const Matrix& g = f.metric;
  const int n = amb.dim();
  const int m = imm.n_params();
  const int p = n - m;

  // Orthonormal basis of the tangent space (for projection only).
  std::vector<Vector> basis;
  basis.reserve(static_cast<std::size_t>(n));
  auto project_out = [&](Vector v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& b : basis) v -= b.dot(g * v) * b;
    return v;
  };
  for (int i = 0; i < m; ++i) {
    const Vector t = f.tangent.col(i);
    const Vector v = project_out(t);
    const double nv = std::sqrt(v.dot(g * v));
    if (!(nv > 1e-10 * std::sqrt(t.dot(g * t))))
      throw DegenerateFrameError("frame: tangent vectors are linearly dependent");
    basis.push_back(v / nv);
  }

  const Matrix& ref = imm.reference_basis();
  f.normal.resize(n, p);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (int a = 0; a < p; ++a) {
    int chosen = -1;
    Vector chosen_v;
    double best = -1.0;
    if (!pinned.empty()) {
      chosen = pinned[static_cast<std::size_t>(a)];
      chosen_v = project_out(ref.col(chosen));
      const Vector e = ref.col(chosen);
      best = std::sqrt(chosen_v.dot(g * chosen_v)) / std::sqrt(e.dot(g * e));
    } else {
      for (int c = 0; c < n; ++c) {
        if (used[static_cast<std::size_t>(c)]) continue;
        const Vector e = ref.col(c);
        const Vector v = project_out(e);
        const double rel = std::sqrt(v.dot(g * v)) / std::sqrt(e.dot(g * e));
        if (rel > best + 1e-12) {
          best = rel;
          chosen = c;
          chosen_v = v;
        }
      }
    }
    if (chosen < 0 || !(best > 1e-8)) {
      std::ostringstream os;
      os << "frame: reference basis does not complete a normal frame at q = ("
         << q.transpose() << "); re-seed the reference basis";
      throw DegenerateFrameError(os.str());
    }
    used[static_cast<std::size_t>(chosen)] = true;
    const Vector nvec = chosen_v / std::sqrt(chosen_v.dot(g * chosen_v));
    f.normal.col(a) = nvec;
    basis.push_back(nvec);
    f.reference_columns.push_back(chosen);
  }
  return f;
}

}  // namespace

FrameAtPoint frame_at(const Immersion& imm, const Vector& q) {
  return build_frame(imm, q, {});
}

FrameAtPoint frame_at(const Immersion& imm, const Vector& q,
                      std::span<const int> reference_columns) {
  if (static_cast<int>(reference_columns.size()) != imm.codim())
    throw PreconditionError("frame: pinned reference columns must match the codimension");
  return build_frame(imm, q, reference_columns);
}

void require_unit(const Vector& n_coeffs, int codim, double tol) {
  if (n_coeffs.size() != codim) {
    std::ostringstream os;
    os << "normal coefficients have " << n_coeffs.size() << " entries, codimension is "
       << codim;
    throw PreconditionError(os.str());
  }
  if (std::abs(n_coeffs.norm() - 1.0) > tol) {
    std::ostringstream os;
    os << "normal coefficients must have unit length (|n| = " << n_coeffs.norm() << ")";
    throw PreconditionError(os.str());
  }
}

Matrix shape_operator(const Immersion& imm, const FrameAtPoint& frame,
                      const Vector& n_coeffs) {
  require_unit(n_coeffs, frame.codim());
  const int m = frame.n_params();
  const Vector nvec = frame.normal_vector(n_coeffs);
  const Vector gn = frame.metric * nvec;
  const Matrix hess = imm.hessian(frame.q);
  const Christoffel gamma = imm.ambient().christoffel_at(frame.point);
  Matrix h(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      // D_{d_i} d_j = d_i d_j f + Gamma(d_i f, d_j f)
      const Vector dd = hess.col(i * m + j) +
                        gamma.contract(frame.tangent.col(i), frame.tangent.col(j));
      h(i, j) = gn.dot(dd);
      h(j, i) = h(i, j);
    }
  return frame.induced_metric.ldlt().solve(h);
}

Matrix shape_operator(const Immersion& imm, const Vector& q, const Vector& n_coeffs) {
  return shape_operator(imm, frame_at(imm, q), n_coeffs);
}

Vector apply_shape_operator(const FrameAtPoint& frame, const Matrix& shape,
                            const Vector& X) {
  return frame.tangent * (shape * frame.tangent_coordinates(X));
}

double second_fundamental_form(const Immersion& imm, const Vector& q,
                               const Vector& n_coeffs, const Vector& X,
                               const Vector& Y) {
  const FrameAtPoint frame = frame_at(imm, q);
  const Matrix a = shape_operator(imm, frame, n_coeffs);
  return frame.inner(apply_shape_operator(frame, a, X), Y);
}

Matrix normal_connection_coeffs(const Immersion& imm, const FrameAtPoint& frame,
                                const Vector& qdot) {
  if (qdot.size() != imm.n_params())
    throw PreconditionError("normal connection: qdot has the wrong dimension");
  const int p = frame.codim();
  Matrix omega = Matrix::Zero(p, p);
  const double speed = qdot.norm();
  if (speed == 0.0) return omega;
  const double h = imm.fd_step() * std::max(1.0, frame.q.norm()) / speed;
  const FrameAtPoint fp = frame_at(imm, frame.q + h * qdot, frame.reference_columns);
  const FrameAtPoint fm = frame_at(imm, frame.q - h * qdot, frame.reference_columns);
  const Vector pdot = frame.tangent * qdot;
  const Christoffel gamma = imm.ambient().christoffel_at(frame.point);
  for (int b = 0; b < p; ++b) {
    const Vector dn = (fp.normal.col(b) - fm.normal.col(b)) / (2.0 * h) +
                      gamma.contract(pdot, frame.normal.col(b));
    const Vector gdn = frame.metric * dn;
    for (int a = 0; a < p; ++a) omega(a, b) = frame.normal.col(a).dot(gdn);
  }
  return omega;
}

Matrix normal_connection_coeffs(const Immersion& imm, const Vector& q,
                                const Vector& qdot) {
  return normal_connection_coeffs(imm, frame_at(imm, q), qdot);
}

}  // namespace tubular
