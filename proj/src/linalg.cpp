#include "mangrad/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mangrad/errors.hpp"

namespace mangrad::linalg {

namespace {

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b,
                      const char* what) {
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << a.dim() << " vs " << b.dim()
        << ")";
    throw UsageError(msg.str());
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim)
    : dim_(dim), data_(dim * dim, Complex{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), data_(std::move(entries)) {
  if (dim == 0) throw UsageError("ComplexMatrix: dimension must be positive");
  if (data_.size() != dim * dim) {
    std::ostringstream msg;
    msg << "ComplexMatrix: expected " << dim * dim << " entries, got "
        << data_.size();
    throw UsageError(msg.str());
  }
  if (!is_finite()) throw UsageError("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(
    std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t n = rows.size();
  std::vector<Complex> entries;
  entries.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw UsageError("from_rows: matrix must be square");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return ComplexMatrix(n, std::move(entries));
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out = *this;
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

bool ComplexMatrix::is_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_dim(*this, other, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_dim(*this, other, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& z : data_) z *= scale;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "operator*");
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Complex frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "frobenius_inner");
  Complex s = 0.0;
  auto ea = a.entries();
  auto eb = b.entries();
  for (std::size_t k = 0; k < ea.size(); ++k) s += std::conj(ea[k]) * eb[k];
  return s;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  ComplexMatrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j) {
      const Complex aij = a(i, j);
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l)
          out(i * nb + k, j * nb + l) = aij * b(k, l);
    }
  return out;
}

Complex determinant(const ComplexMatrix& a) {
  const std::size_t n = a.dim();
  ComplexMatrix lu = a;
  Complex det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(pivot, col))) pivot = r;
    if (lu(pivot, col) == Complex{}) return 0.0;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(pivot, j), lu(col, j));
      det = -det;
    }
    det *= lu(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const Complex factor = lu(r, col) / lu(col, col);
      for (std::size_t j = col; j < n; ++j) lu(r, j) -= factor * lu(col, j);
    }
  }
  return det;
}

double unitarity_defect(const ComplexMatrix& u) {
  return (u.adjoint() * u - ComplexMatrix::identity(u.dim())).frobenius_norm();
}

double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).frobenius_norm();
}

HermitianMatrix HermitianMatrix::checked(ComplexMatrix m,
                                         const Tolerances& tol) {
  const double defect = hermiticity_defect(m);
  if (defect > tol.symmetry * m.frobenius_norm()) {
    std::ostringstream msg;
    msg << "HermitianMatrix: ||M - M^dagger||_F = " << defect
        << " exceeds tolerance";
    throw UsageError(msg.str());
  }
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::symmetrized(const ComplexMatrix& m) {
  ComplexMatrix h = (m + m.adjoint()) * Complex{0.5, 0.0};
  for (std::size_t i = 0; i < h.dim(); ++i) h(i, i) = h(i, i).real();
  return HermitianMatrix(std::move(h));
}

SkewHermitianTraceless SkewHermitianTraceless::checked(ComplexMatrix m,
                                                       const Tolerances& tol) {
  const double scale = m.frobenius_norm();
  const double skew_defect = (m + m.adjoint()).frobenius_norm();
  const double trace_defect = std::abs(m.trace());
  if (skew_defect > tol.symmetry * scale || trace_defect > tol.symmetry * scale) {
    std::ostringstream msg;
    msg << "SkewHermitianTraceless: ||M + M^dagger||_F = " << skew_defect
        << ", |tr M| = " << trace_defect << " exceed tolerance";
    throw UsageError(msg.str());
  }
  return SkewHermitianTraceless(std::move(m));
}

SkewHermitianTraceless SkewHermitianTraceless::projected(const ComplexMatrix& m) {
  ComplexMatrix s = (m - m.adjoint()) * Complex{0.5, 0.0};
  const std::size_t n = s.dim();
  const Complex mean = s.trace() / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) s(i, i) = Complex{0.0, (s(i, i) - mean).imag()};
  return SkewHermitianTraceless(std::move(s));
}

EigenDecomposition hermitian_eig(const HermitianMatrix& h, int max_sweeps) {
  const std::size_t n = h.dim();
  ComplexMatrix a = h.matrix();
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = a.frobenius_norm();

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        if (p != q) s += std::norm(a(p, q));
    return std::sqrt(s);
  };

  int sweep = 0;
  for (;; ++sweep) {
    const double off = off_norm();
    if (off == 0.0 || off <= 1e-15 * scale) break;
    if (sweep >= max_sweeps) {
      std::ostringstream msg;
      msg << "hermitian_eig: no convergence after " << max_sweeps
          << " sweeps, off-diagonal residual " << off;
      throw NumericError(msg.str());
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Negligible against both diagonal entries: drop it.
        if (sweep > 3 && std::abs(app) + 100.0 * r == std::abs(app) &&
            std::abs(aqq) + 100.0 * r == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const Complex phase = a(p, q) / r;
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // G = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
        const Complex gpp = c, gpq = s;
        const Complex gqp = -s * std::conj(phase), gqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const Complex x = a(k, p), y = a(k, q);
          a(k, p) = x * gpp + y * gqp;
          a(k, q) = x * gpq + y * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex x = a(p, k), y = a(q, k);
          a(p, k) = std::conj(gpp) * x + std::conj(gqp) * y;
          a(q, k) = std::conj(gpq) * x + std::conj(gqq) * y;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex x = v(k, p), y = v(k, q);
          v(k, p) = x * gpp + y * gqp;
          v(k, q) = x * gpq + y * gqq;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = app - t * r;
        a(q, q) = aqq + t * r;
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n);
  out.sweeps = sweep;
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

ComplexMatrix exp_skew(const SkewHermitianTraceless& omega) {
  const std::size_t n = omega.dim();
  const ComplexMatrix& w = omega.matrix();
  if (!w.is_finite() || w.frobenius_norm() > 1e12)
    throw NumericError("exp_skew: generator norm too large");
  // omega = -iH  =>  exp(omega) = V diag(e^{-i lambda}) V^dagger
  const auto eig = hermitian_eig(HermitianMatrix::symmetrized(w * Complex{0.0, 1.0}));
  ComplexMatrix scaled = eig.vectors;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex phase = std::polar(1.0, -eig.values[k]);
    for (std::size_t i = 0; i < n; ++i) scaled(i, k) *= phase;
  }
  return scaled * eig.vectors.adjoint();
}

std::vector<ComplexMatrix> traceless_hermitian_basis(std::size_t n) {
  std::vector<ComplexMatrix> basis;
  basis.reserve(n * n - 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      ComplexMatrix sym(n);
      sym(j, k) = sym(k, j) = inv_sqrt2;
      basis.push_back(std::move(sym));
      ComplexMatrix anti(n);
      anti(j, k) = Complex{0.0, -inv_sqrt2};
      anti(k, j) = Complex{0.0, inv_sqrt2};
      basis.push_back(std::move(anti));
    }
  for (std::size_t l = 1; l < n; ++l) {
    ComplexMatrix d(n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (std::size_t m = 0; m < l; ++m) d(m, m) = norm;
    d(l, l) = -static_cast<double>(l) * norm;
    basis.push_back(std::move(d));
  }
  return basis;
}

std::size_t rank_from_gram(const HermitianMatrix& gram, double rel_threshold) {
  const auto eig = hermitian_eig(gram);
  double sigma_max = 0.0;
  for (double lambda : eig.values)
    sigma_max = std::max(sigma_max, std::sqrt(std::max(lambda, 0.0)));
  if (sigma_max == 0.0) return 0;
  std::size_t rank = 0;
  for (double lambda : eig.values)
    if (std::sqrt(std::max(lambda, 0.0)) > rel_threshold * sigma_max) ++rank;
  return rank;
}

ComplexMatrix pauli_x() { return ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}); }

ComplexMatrix pauli_y() {
  return ComplexMatrix::from_rows({{0.0, Complex{0.0, -1.0}}, {Complex{0.0, 1.0}, 0.0}});
}

ComplexMatrix pauli_z() { return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}}); }

}  // namespace mangrad::linalg
