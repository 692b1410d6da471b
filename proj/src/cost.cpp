#include "mangrad/cost.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mangrad/errors.hpp"

namespace mangrad {

using linalg::Complex;

DiagonalQuadratic::DiagonalQuadratic(RealVector coefficients, ManifoldKind kind)
    : coefficients_(std::move(coefficients)), kind_(kind) {
  if (kind.type() == ManifoldKind::Type::SpecialUnitary)
    throw UsageError("DiagonalQuadratic lives on Euclidean or Sphere manifolds");
  if (coefficients_.size() != kind.n())
    throw UsageError("DiagonalQuadratic: coefficient count must equal n");
  for (double c : coefficients_)
    if (!std::isfinite(c)) throw UsageError("DiagonalQuadratic: non-finite coefficient");
}

double DiagonalQuadratic::value(const ManifoldPoint& x) const {
  const auto& p = x.coords();
  double f = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) f += coefficients_[i] * p[i] * p[i];
  return f;
}

TangentVector DiagonalQuadratic::riemannian_grad(const ManifoldPoint& x) const {
  const auto& p = x.coords();
  RealVector g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) g[i] = 2.0 * coefficients_[i] * p[i];
  if (kind_.type() == ManifoldKind::Type::Sphere) return project_to_tangent(x, g);
  return TangentVector::real(std::move(g));
}

double DiagonalQuadratic::smoothness_ell() const {
  if (kind_.type() == ManifoldKind::Type::Sphere) {
    const auto [lo, hi] = std::minmax_element(coefficients_.begin(), coefficients_.end());
    return 2.0 * (*hi - *lo);
  }
  double m = 0.0;
  for (double c : coefficients_) m = std::max(m, std::abs(c));
  return 2.0 * m;
}

std::optional<double> DiagonalQuadratic::hessian_form(const ManifoldPoint& x,
                                                      const TangentVector& direction) const {
  const auto& v = direction.vec();
  double q = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    q += coefficients_[i] * v[i] * v[i];
    vv += v[i] * v[i];
  }
  if (kind_.type() == ManifoldKind::Type::Sphere) return 2.0 * (q - value(x) * vv);
  return 2.0 * q;
}

namespace {

RealVector concat_saddle(const RealVector& a, const RealVector& b, std::size_t n) {
  if (a.empty() || b.empty()) throw UsageError("QuadraticSaddle: need p, q >= 1");
  if (a.size() + b.size() > n) throw UsageError("QuadraticSaddle: need n >= p + q");
  for (double v : a)
    if (!(v > 0.0)) throw UsageError("QuadraticSaddle: a_i must be positive");
  for (double v : b)
    if (!(v > 0.0)) throw UsageError("QuadraticSaddle: b_j must be positive");
  RealVector c(n, 0.0);
  std::copy(a.begin(), a.end(), c.begin());
  for (std::size_t j = 0; j < b.size(); ++j) c[a.size() + j] = -b[j];
  return c;
}

ManifoldKind saddle_kind(ManifoldKind::Type type, std::size_t n) {
  if (type == ManifoldKind::Type::Sphere) return ManifoldKind::sphere(n);
  if (type == ManifoldKind::Type::Euclidean) return ManifoldKind::euclidean(n);
  throw UsageError("QuadraticSaddle lives on Euclidean or Sphere manifolds");
}

}  // namespace

QuadraticSaddle::QuadraticSaddle(RealVector a, RealVector b, std::size_t n,
                                 ManifoldKind::Type type)
    : DiagonalQuadratic(concat_saddle(a, b, n), saddle_kind(type, n)),
      a_(std::move(a)),
      b_(std::move(b)) {}

ValueGrad saddle_value_grad(const QuadraticSaddle& c, const RealVector& x) {
  const auto& coef = c.coefficients();
  if (x.size() != coef.size()) throw UsageError("saddle_value_grad: size mismatch");
  ValueGrad out{0.0, RealVector(x.size())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.value += coef[i] * x[i] * x[i];
    out.grad[i] = 2.0 * coef[i] * x[i];
  }
  return out;
}

std::optional<double> saddle_angle(const QuadraticSaddle& c, const RealVector& x) {
  const std::size_t p = c.a().size(), q = c.b().size();
  if (x.size() < p + q) throw UsageError("saddle_angle: size mismatch");
  double stable = 0.0, unstable = 0.0;
  for (std::size_t i = 0; i < p; ++i) stable += c.a()[i] * x[i] * x[i];
  for (std::size_t j = 0; j < q; ++j) unstable += c.b()[j] * x[p + j] * x[p + j];
  if (stable == 0.0 && unstable == 0.0) return std::nullopt;
  return std::atan2(unstable, stable);
}

namespace {

void validate_density(const ComplexMatrix& rho) {
  const auto eig = linalg::hermitian_eig(HermitianMatrix::symmetrized(rho));
  if (eig.values.front() < -1e-10) {
    std::ostringstream msg;
    msg << "GroundStateCost: rho has negative eigenvalue " << eig.values.front();
    throw UsageError(msg.str());
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "GroundStateCost: tr(rho) = " << tr << ", expected 1";
    throw UsageError(msg.str());
  }
}

}  // namespace

GroundStateCost::GroundStateCost(const HermitianMatrix& a, const HermitianMatrix& rho) {
  const std::size_t n = a.dim();
  if (n < 2) throw UsageError("GroundStateCost: dimension must be >= 2");
  if (rho.dim() != n) throw UsageError("GroundStateCost: A and rho dimensions differ");
  validate_density(rho.matrix());

  const auto eig = linalg::hermitian_eig(a);
  basis_ = ComplexMatrix(n);
  a_eigs_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = n - 1 - k;  // ascending -> non-increasing
    a_eigs_[k] = eig.values[src];
    for (std::size_t i = 0; i < n; ++i) basis_(i, k) = eig.vectors(i, src);
  }
  a_ = ComplexMatrix::diagonal(a_eigs_);
  rho_ = HermitianMatrix::symmetrized(basis_.adjoint() * rho.matrix() * basis_).matrix();
  rho_eigs_ = linalg::hermitian_eig(HermitianMatrix::symmetrized(rho_)).values;
}

GroundStateCost GroundStateCost::from_spectra(const RealVector& a_eigenvalues,
                                              const RealVector& rho_eigenvalues) {
  if (a_eigenvalues.size() != rho_eigenvalues.size())
    throw UsageError("GroundStateCost: spectra have different lengths");
  RealVector a_sorted = a_eigenvalues;
  std::sort(a_sorted.begin(), a_sorted.end(), std::greater<>());
  return GroundStateCost(HermitianMatrix::symmetrized(ComplexMatrix::diagonal(a_sorted)),
                         HermitianMatrix::symmetrized(ComplexMatrix::diagonal(rho_eigenvalues)));
}

ManifoldKind GroundStateCost::manifold() const { return ManifoldKind::special_unitary(n()); }

double GroundStateCost::value(const ManifoldPoint& u) const {
  const auto& m = u.unitary();
  const ComplexMatrix w = m * rho_ * m.adjoint();
  double j = 0.0;
  for (std::size_t i = 0; i < n(); ++i) j += a_eigs_[i] * w(i, i).real();
  return j;
}

TangentVector GroundStateCost::riemannian_grad(const ManifoldPoint& u) const {
  const auto& m = u.unitary();
  const ComplexMatrix w = m * rho_ * m.adjoint();
  // [A, W]_{ij} = (a_i - a_j) W_ij for diagonal A.
  ComplexMatrix g(n());
  for (std::size_t i = 0; i < n(); ++i)
    for (std::size_t j = 0; j < n(); ++j) g(i, j) = (a_eigs_[i] - a_eigs_[j]) * w(i, j);
  return TangentVector::generator(linalg::SkewHermitianTraceless::projected(g).matrix());
}

double GroundStateCost::smoothness_ell() const {
  return 4.0 * a_.frobenius_norm() * rho_.frobenius_norm();
}

std::optional<double> GroundStateCost::hessian_form(const ManifoldPoint& u,
                                                    const TangentVector& direction) const {
  if (commutator_norm(u) > 1e-8 * a_.frobenius_norm()) return std::nullopt;
  // omega = -iH  =>  H = i omega
  return hessian_form_critical(
      u, HermitianMatrix::symmetrized(direction.omega() * Complex{0.0, 1.0}));
}

double GroundStateCost::commutator_norm(const ManifoldPoint& u) const {
  return riemannian_grad(u).omega().frobenius_norm();
}

double GroundStateCost::hessian_form_critical(const ManifoldPoint& u,
                                              const HermitianMatrix& h) const {
  const double comm = commutator_norm(u);
  const double scale = a_.frobenius_norm();
  if (comm > 1e-8 * scale) {
    std::ostringstream msg;
    msg << "hessian_form_critical: U is not critical, ||[A, U rho U^dagger]||_F = "
        << comm;
    throw UsageError(msg.str());
  }
  const std::size_t dimension = n();
  const auto& m = u.unitary();
  const ComplexMatrix w = m * rho_ * m.adjoint();

  // W commutes with diagonal A, so it is block diagonal over the degenerate
  // eigenspaces of A. Diagonalize each block to get a joint eigenbasis Q.
  ComplexMatrix q(dimension);
  const double degeneracy_tol = 1e-12 * std::max(1.0, scale);
  std::size_t start = 0;
  while (start < dimension) {
    std::size_t stop = start + 1;
    while (stop < dimension && std::abs(a_eigs_[stop] - a_eigs_[start]) <= degeneracy_tol)
      ++stop;
    const std::size_t block = stop - start;
    ComplexMatrix wb(block);
    for (std::size_t i = 0; i < block; ++i)
      for (std::size_t j = 0; j < block; ++j) wb(i, j) = w(start + i, start + j);
    const auto eig = linalg::hermitian_eig(HermitianMatrix::symmetrized(wb));
    for (std::size_t i = 0; i < block; ++i)
      for (std::size_t j = 0; j < block; ++j) q(start + i, start + j) = eig.vectors(i, j);
    start = stop;
  }
  const ComplexMatrix hq = q.adjoint() * h.matrix() * q;
  const ComplexMatrix wq = q.adjoint() * w * q;
  double form = 0.0;
  for (std::size_t i = 0; i < dimension; ++i)
    for (std::size_t j = 0; j < i; ++j)
      form -= 2.0 * (a_eigs_[i] - a_eigs_[j]) * (wq(i, i).real() - wq(j, j).real()) *
              std::norm(hq(i, j));
  return form;
}

namespace {

template <typename Visit>
void for_each_permutation_value(const GroundStateCost& c, Visit&& visit) {
  const std::size_t n = c.n();
  if (n > 8) throw CapabilityError("permutation enumeration supports n <= 8");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += c.a_eigenvalues()[i] * c.rho_eigenvalues()[perm[i]];
    visit(s);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace

double global_min_value(const GroundStateCost& c) {
  double best = std::numeric_limits<double>::infinity();
  for_each_permutation_value(c, [&](double v) { best = std::min(best, v); });
  return best;
}

std::vector<double> critical_values(const GroundStateCost& c) {
  std::vector<double> values;
  for_each_permutation_value(c, [&](double v) { values.push_back(v); });
  std::sort(values.begin(), values.end());
  std::vector<double> unique;
  for (double v : values)
    if (unique.empty() || v - unique.back() > 1e-12) unique.push_back(v);
  return unique;
}

}  // namespace mangrad
