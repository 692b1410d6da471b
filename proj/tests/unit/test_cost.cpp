#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mangrad/cost.hpp"
#include "mangrad/errors.hpp"
#include "mangrad/sampler.hpp"

using namespace mangrad;
using linalg::Complex;

namespace {

const Complex I{0.0, 1.0};

// Independent oracle: J(U) = Re tr(A U rho U^dagger) straight from matrices.
double direct_j(const ComplexMatrix& a, const ComplexMatrix& rho, const ComplexMatrix& u) {
  return (a * u * rho * u.adjoint()).trace().real();
}

// d/dt J(exp(t W) U) at 0 by a central difference.
double fd_directional(const CostFunction& c, const ManifoldPoint& x, const TangentVector& v,
                      double h = 1e-5) {
  return (c.value(exp_map(x, v * h)) - c.value(exp_map(x, v * (-h)))) / (2.0 * h);
}

ManifoldPoint su(const ComplexMatrix& m) { return ManifoldPoint::special_unitary(m); }

}  // namespace

TEST(Cost, SaddleValueGrad) {
  const QuadraticSaddle c({1.0}, {1.0}, 2);
  auto vg = saddle_value_grad(c, {1.0, 0.0});
  EXPECT_DOUBLE_EQ(vg.value, 1.0);
  EXPECT_EQ(vg.grad, (RealVector{2.0, 0.0}));
  vg = saddle_value_grad(c, {0.0, 0.0});
  EXPECT_EQ(vg.value, 0.0);
  EXPECT_EQ(vg.grad, (RealVector{0.0, 0.0}));
  for (double t : {-3.0, 0.5, 7.0}) EXPECT_EQ(saddle_value_grad(c, {t, t}).value, 0.0);
}

TEST(Cost, SaddleAngle) {
  const QuadraticSaddle c({1.0}, {1.0}, 2);
  EXPECT_DOUBLE_EQ(*saddle_angle(c, {1.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(*saddle_angle(c, {0.0, 1.0}), std::numbers::pi / 2.0);
  EXPECT_DOUBLE_EQ(*saddle_angle(c, {1.0, 1.0}), std::numbers::pi / 4.0);
  EXPECT_FALSE(saddle_angle(c, {0.0, 0.0}).has_value());
}

TEST(Cost, QuadraticGradientMatchesFiniteDifference) {
  RngStream rng(1, 0);
  for (auto kind : {ManifoldKind::euclidean(4), ManifoldKind::sphere(4)}) {
    const DiagonalQuadratic c({1.0, -2.0, 0.5, 3.0}, kind);
    for (int k = 0; k < 20; ++k) {
      const auto x = random_point(kind, rng);
      const auto v = haar_unit_tangent(x, rng);
      EXPECT_NEAR(inner(x, c.riemannian_grad(x), v), fd_directional(c, x, v), 1e-7);
    }
  }
}

TEST(Cost, GroundStateValues) {
  const auto c = GroundStateCost::from_spectra({1.0, -1.0}, {1.0, 0.0});
  EXPECT_DOUBLE_EQ(c.value(su(ComplexMatrix::identity(2))), 1.0);
  EXPECT_NEAR(c.value(su(linalg::pauli_x() * (-I))), -1.0, 1e-15);
  const auto mixed = GroundStateCost::from_spectra({2.0, 1.0, -0.5}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  RngStream rng(2, 0);
  const auto u = random_point(ManifoldKind::special_unitary(3), rng);
  EXPECT_NEAR(mixed.value(u), 2.5 / 3.0, 1e-14);
}

TEST(Cost, GroundStateGradientExamples) {
  const auto c = GroundStateCost::from_spectra({1.0, -1.0}, {1.0, 0.0});
  EXPECT_LE(c.riemannian_grad(su(ComplexMatrix::identity(2))).omega().frobenius_norm(), 1e-15);

  const auto rho = linalg::HermitianMatrix::checked((ComplexMatrix::identity(2) + linalg::pauli_x()) *
                                                    Complex(0.5));
  const GroundStateCost cx(linalg::HermitianMatrix::checked(linalg::pauli_z()), rho);
  const auto g = cx.riemannian_grad(su(ComplexMatrix::identity(2))).omega();
  EXPECT_LE((g - linalg::pauli_y() * I).frobenius_norm(), 1e-15);

  const auto flat = GroundStateCost::from_spectra({1.0, -1.0}, {0.5, 0.5});
  RngStream rng(3, 0);
  EXPECT_LE(flat.riemannian_grad(random_point(ManifoldKind::special_unitary(2), rng))
                .omega().frobenius_norm(), 1e-15);
}

TEST(Cost, GroundStateGradientMatchesFiniteDifference) {
  RngStream rng(4, 0);
  const auto c = GroundStateCost::from_spectra({3.0, 1.0, -1.0, -3.0}, {0.4, 0.3, 0.2, 0.1});
  for (int k = 0; k < 20; ++k) {
    const auto u = random_point(ManifoldKind::special_unitary(4), rng);
    EXPECT_NEAR(c.value(u), direct_j(c.a(), c.rho(), u.unitary()), 1e-12);
    const auto v = haar_unit_tangent(u, rng);
    EXPECT_NEAR(inner(u, c.riemannian_grad(u), v), fd_directional(c, u, v), 1e-7);
  }
}

TEST(Cost, GroundStateNonDiagonalInputs) {
  // A user-supplied non-diagonal A is rotated into its eigenbasis.
  const auto a = linalg::HermitianMatrix::checked(linalg::pauli_x() + linalg::pauli_z() * Complex(0.5));
  const auto rho = linalg::HermitianMatrix::checked(
      ComplexMatrix::from_rows({{0.7, Complex(0.1, 0.2)}, {Complex(0.1, -0.2), 0.3}}));
  const GroundStateCost c(a, rho);
  RngStream rng(5, 0);
  for (int k = 0; k < 5; ++k) {
    const auto u = random_point(ManifoldKind::special_unitary(2), rng);
    const ComplexMatrix moved = c.basis() * u.unitary() * c.basis().adjoint();
    // The cost evaluated in the original frame agrees after the basis change.
    EXPECT_NEAR(c.value(u), direct_j(a.matrix(), rho.matrix(), moved),
                1e-12);
    const auto v = haar_unit_tangent(u, rng);
    EXPECT_NEAR(inner(u, c.riemannian_grad(u), v), fd_directional(c, u, v), 1e-7);
  }
}

TEST(Cost, GroundStateEll) {
  const auto c = GroundStateCost::from_spectra({1.0, -1.0}, {1.0, 0.0});
  EXPECT_NEAR(c.smoothness_ell(), 4.0 * std::sqrt(2.0), 1e-14);
  EXPECT_EQ(GroundStateCost::from_spectra({0.0, 0.0}, {1.0, 0.0}).smoothness_ell(), 0.0);
  EXPECT_NEAR(GroundStateCost::from_spectra({3.0, -3.0}, {1.0, 0.0}).smoothness_ell(),
              3.0 * c.smoothness_ell(), 1e-13);
}

TEST(Cost, GroundStateEllBoundsSecondDerivative) {
  RngStream rng(6, 0);
  const auto c = GroundStateCost::from_spectra({3.0, 1.0, -1.0, -3.0}, {0.4, 0.3, 0.2, 0.1});
  for (int k = 0; k < 50; ++k) {
    const auto u = random_point(ManifoldKind::special_unitary(4), rng);
    const auto v = haar_unit_tangent(u, rng);
    const double h = 1e-4;
    const double d2 = (c.value(exp_map(u, v * h)) - 2.0 * c.value(u) + c.value(exp_map(u, v * (-h)))) /
                      (h * h);
    EXPECT_LE(std::abs(d2), c.smoothness_ell());
  }
}

TEST(Cost, HessianFormAtIdentity) {
  // J(exp(-it sigma_x)) = cos 2t for A = diag(1,-1), rho = diag(1,0): second derivative -4.
  const auto c = GroundStateCost::from_spectra({1.0, -1.0}, {1.0, 0.0});
  const auto id = su(ComplexMatrix::identity(2));
  const double h = c.hessian_form_critical(id, linalg::HermitianMatrix::checked(linalg::pauli_x()));
  EXPECT_NEAR(h, -4.0, 1e-12);
  EXPECT_NEAR(std::abs(h), 4.0, 1e-12);
  EXPECT_NEAR(c.hessian_form_critical(id, linalg::HermitianMatrix::checked(linalg::pauli_z())), 0.0,
              1e-15);
}

TEST(Cost, HessianFormAtSwappedPairing) {
  const auto c = GroundStateCost::from_spectra({1.0, -1.0}, {1.0, 0.0});
  const auto swap = su(linalg::pauli_x() * (-I));
  EXPECT_NEAR(c.hessian_form_critical(swap, linalg::HermitianMatrix::checked(linalg::pauli_x())), 4.0,
              1e-12);
}

TEST(Cost, HessianFormRequiresCriticalPoint) {
  const auto c = GroundStateCost::from_spectra({1.0, -1.0}, {1.0, 0.0});
  RngStream rng(7, 0);
  const auto u = random_point(ManifoldKind::special_unitary(2), rng);
  EXPECT_THROW(c.hessian_form_critical(u, linalg::HermitianMatrix::checked(linalg::pauli_x())),
               UsageError);
  EXPECT_FALSE(c.hessian_form(u, TangentVector::generator(linalg::pauli_x() * I)).has_value());
}

TEST(Cost, GlobalMinAndCriticalValues) {
  EXPECT_DOUBLE_EQ(global_min_value(GroundStateCost::from_spectra({1.0, -1.0}, {1.0, 0.0})), -1.0);
  EXPECT_NEAR(global_min_value(GroundStateCost::from_spectra({2.0, 1.0, 0.0}, {0.5, 0.3, 0.2})), 0.7,
              1e-15);
  const auto mixed = GroundStateCost::from_spectra({2.0, 1.0, 0.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  EXPECT_EQ(critical_values(mixed).size(), 1u);
  EXPECT_NEAR(global_min_value(mixed), 1.0, 1e-15);
  // 4 distinct a's and rho's give up to 24 permutation values.
  const auto c4 = GroundStateCost::from_spectra({3.0, 1.0, -1.0, -3.0}, {0.4, 0.3, 0.2, 0.1});
  const auto v = critical_values(c4);
  EXPECT_NEAR(v.front(), global_min_value(c4), 1e-15);
  EXPECT_NEAR(v.front(), 3 * 0.1 + 1 * 0.2 - 1 * 0.3 - 3 * 0.4, 1e-14);
  EXPECT_NEAR(v.back(), 3 * 0.4 + 1 * 0.3 - 1 * 0.2 - 3 * 0.1, 1e-14);
}
