#pragma once

#include "tubular/ambient.hpp"
#include "tubular/types.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace tubular {

// A parametric immersion q -> f(q) of an n-dimensional submanifold into the
// ambient chart.
class Immersion {
 public:
  using MapFn = std::function<Vector(const Vector&)>;
  // N x n matrix of first derivatives.
  using JacobianFn = std::function<Matrix(const Vector&)>;
  // N x (n*n) matrix; column i*n + j holds d_i d_j f.
  using HessianFn = std::function<Matrix(const Vector&)>;

  // Missing derivative functions are replaced by central differences with
  // relative step `fd_step`. The immersion condition is checked at every
  // probe point (the origin of parameter space when none are given).
  Immersion(std::shared_ptr<const AmbientSpace> ambient, int n_params, MapFn map,
            JacobianFn jacobian = {}, HessianFn hessian = {},
            std::vector<Vector> probe_points = {}, double fd_step = 1e-5);

  const AmbientSpace& ambient() const { return *ambient_; }
  const std::shared_ptr<const AmbientSpace>& ambient_ptr() const { return ambient_; }
  int n_params() const { return n_params_; }
  int ambient_dim() const { return ambient_->dim(); }
  int codim() const { return ambient_->dim() - n_params_; }
  DerivMode jac_mode() const {
    return jacobian_ ? DerivMode::analytic : DerivMode::finite_difference;
  }
  double fd_step() const { return fd_step_; }

  Vector point(const Vector& q) const;
  Matrix jacobian(const Vector& q) const;
  Matrix hessian(const Vector& q) const;

  // Columns seed Gram-Schmidt of the normal frame. Defaults to the identity.
  const Matrix& reference_basis() const { return reference_basis_; }
  Immersion with_reference_basis(Matrix basis) const;

 private:
  void require_params(const Vector& q) const;

  std::shared_ptr<const AmbientSpace> ambient_;
  int n_params_;
  MapFn map_;
  JacobianFn jacobian_;
  HessianFn hessian_;
  double fd_step_;
  Matrix reference_basis_;
};

struct FrameAtPoint {
  Vector q;
  Vector point;
  Matrix metric;          // g at f(q)
  Matrix tangent;         // N x n, Jacobian columns
  Matrix normal;          // N x p, g-orthonormal, g-orthogonal to tangent
  Matrix induced_metric;  // first fundamental form T^T g T
  // Reference-basis column that seeded each normal vector.
  std::vector<int> reference_columns;

  int n_params() const { return static_cast<int>(tangent.cols()); }
  int codim() const { return static_cast<int>(normal.cols()); }

  Vector normal_vector(const Vector& coeffs) const;
  // Coordinates a with tangent * a equal to the tangential projection of X.
  Vector tangent_coordinates(const Vector& X) const;
  Vector tangential_part(const Vector& X) const;
  Vector normal_part(const Vector& X) const;
  double inner(const Vector& a, const Vector& b) const { return a.dot(metric * b); }
};

FrameAtPoint frame_at(const Immersion& imm, const Vector& q);
// Uses the given reference columns (in order) instead of pivoting, so frames
// along a short probe curve stay on one smooth branch.
FrameAtPoint frame_at(const Immersion& imm, const Vector& q,
                      std::span<const int> reference_columns);

// Matrix of A_n in the tangent frame: A_n d_j = sum_i A(i, j) d_i, where
// A_n X = -(D_X n)^T. Computed from the Weingarten identity
// g(A_n d_i, d_j) = g(n, D_{d_i} d_j).
Matrix shape_operator(const Immersion& imm, const Vector& q, const Vector& n_coeffs);
Matrix shape_operator(const Immersion& imm, const FrameAtPoint& frame,
                      const Vector& n_coeffs);

// A_n X for an ambient tangent vector X.
Vector apply_shape_operator(const FrameAtPoint& frame, const Matrix& shape,
                            const Vector& X);

// II_n(X, Y) = g(A_n X, Y).
double second_fundamental_form(const Immersion& imm, const Vector& q,
                               const Vector& n_coeffs, const Vector& X,
                               const Vector& Y);

// omega(a, b) = g(D^perp_{pdot} normal_b, normal_a) along q + t * qdot.
Matrix normal_connection_coeffs(const Immersion& imm, const Vector& q,
                                const Vector& qdot);
Matrix normal_connection_coeffs(const Immersion& imm, const FrameAtPoint& frame,
                                const Vector& qdot);

void require_unit(const Vector& n_coeffs, int codim, double tol = 1e-10);

}  // namespace tubular
