#pragma once

#include <optional>
#include <vector>

#include "mangrad/linalg.hpp"
#include "mangrad/manifold.hpp"

namespace mangrad {

using linalg::HermitianMatrix;

/// A smooth cost on one manifold, with its Riemannian gradient and a global
/// curvature bound ell along unit-speed geodesics.
class CostFunction {
 public:
  virtual ~CostFunction() = default;

  virtual ManifoldKind manifold() const = 0;
  virtual double value(const ManifoldPoint& x) const = 0;
  virtual TangentVector riemannian_grad(const ManifoldPoint& x) const = 0;
  virtual double smoothness_ell() const = 0;

  /// Second derivative of t -> f(exp_x(t*direction)) at t = 0, when x is
  /// critical and an analytic form exists.
  virtual std::optional<double> hessian_form(const ManifoldPoint& /*x*/,
                                             const TangentVector& /*direction*/) const {
    return std::nullopt;
  }
};

/// f(x) = sum_i c_i x_i^2 on Euclidean(n) or restricted to Sphere(n).
class DiagonalQuadratic : public CostFunction {
 public:
  DiagonalQuadratic(RealVector coefficients, ManifoldKind kind);

  const RealVector& coefficients() const { return coefficients_; }

  ManifoldKind manifold() const override { return kind_; }
  double value(const ManifoldPoint& x) const override;
  TangentVector riemannian_grad(const ManifoldPoint& x) const override;
  /// 2 max|c_i| on R^n; 2 (max c - min c) on the sphere.
  double smoothness_ell() const override;
  std::optional<double> hessian_form(const ManifoldPoint& x,
                                     const TangentVector& direction) const override;

 private:
  RealVector coefficients_;
  ManifoldKind kind_;
};

/// f = sum a_i x_i^2 - sum b_j y_j^2 with coordinates (x_1..x_p, y_1..y_q,
/// z_1..z_{n-p-q}).
class QuadraticSaddle : public DiagonalQuadratic {
 public:
  QuadraticSaddle(RealVector a, RealVector b, std::size_t n,
                  ManifoldKind::Type type = ManifoldKind::Type::Euclidean);

  const RealVector& a() const { return a_; }
  const RealVector& b() const { return b_; }

 private:
  RealVector a_;
  RealVector b_;
};

struct ValueGrad {
  double value;
  RealVector grad;
};

/// Value and Euclidean gradient 2(a x, -b y, 0).
ValueGrad saddle_value_grad(const QuadraticSaddle& c, const RealVector& x);

/// theta = arctan(sum b y^2 / sum a x^2) in [0, pi/2]; nullopt when both
/// blocks vanish (theta is undefined there).
std::optional<double> saddle_angle(const QuadraticSaddle& c, const RealVector& x);

/// J(U) = tr(A U rho U^dagger) on SU(n). A is held diagonal with
/// non-increasing eigenvalues; the eigenbasis change of a user-supplied A is
/// absorbed into rho and kept in basis().
class GroundStateCost : public CostFunction {
 public:
  GroundStateCost(const HermitianMatrix& a, const HermitianMatrix& rho);
  /// Diagonal A and rho from spectra (A is sorted non-increasing).
  static GroundStateCost from_spectra(const RealVector& a_eigenvalues,
                                      const RealVector& rho_eigenvalues);

  std::size_t n() const { return a_eigs_.size(); }
  const RealVector& a_eigenvalues() const { return a_eigs_; }
  const RealVector& rho_eigenvalues() const { return rho_eigs_; }
  const ComplexMatrix& a() const { return a_; }
  const ComplexMatrix& rho() const { return rho_; }
  /// Columns: eigenvectors of the original A, in the order of a_eigenvalues().
  const ComplexMatrix& basis() const { return basis_; }

  ManifoldKind manifold() const override;
  double value(const ManifoldPoint& u) const override;
  /// Left-trivialized gradient [A, U rho U^dagger].
  TangentVector riemannian_grad(const ManifoldPoint& u) const override;
  /// 4 ||A||_F ||rho||_F.
  double smoothness_ell() const override;
  std::optional<double> hessian_form(const ManifoldPoint& u,
                                     const TangentVector& direction) const override;

  /// d^2/dt^2 J(exp(-itH) U) at t = 0 for critical U, from the spectral
  /// formula -sum_{i>j} 2 (a_i - a_j)(w_i - w_j) |<i|H|j>|^2 in a joint
  /// eigenbasis of A and W = U rho U^dagger (w_i are W's eigenvalues there).
  /// Throws UsageError (reporting the commutator norm) if U is not critical.
  double hessian_form_critical(const ManifoldPoint& u, const HermitianMatrix& h) const;

  /// ||[A, U rho U^dagger]||_F
  double commutator_norm(const ManifoldPoint& u) const;

 private:
  RealVector a_eigs_;
  RealVector rho_eigs_;
  ComplexMatrix a_;
  ComplexMatrix rho_;
  ComplexMatrix basis_;
};

/// Minimum of sum_i a_i p_{pi(i)} over permutations (brute force, n <= 8).
double global_min_value(const GroundStateCost& c);

/// All permutation values sum_i a_i p_{pi(i)}, sorted and deduplicated
/// to 1e-12 (n <= 8).
std::vector<double> critical_values(const GroundStateCost& c);

}  // namespace mangrad
