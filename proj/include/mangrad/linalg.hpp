#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mangrad::linalg {

using Complex = std::complex<double>;

/// Central tolerance constants. Every validating constructor takes one of
/// these so callers (and the CLI config) can override them.
struct Tolerances {
  double reconstruction = 1e-10;
  double symmetry = 1e-12;
  double unitarity = 1e-10;
};

/// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);
  /// Throws UsageError unless entries.size() == dim*dim and all are finite.
  ComplexMatrix(std::size_t dim, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> values);
  static ComplexMatrix from_rows(
      std::initializer_list<std::initializer_list<Complex>> rows);

  std::size_t dim() const { return dim_; }
  Complex& operator()(std::size_t row, std::size_t col) {
    return data_[row * dim_ + col];
  }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return data_[row * dim_ + col];
  }
  std::span<const Complex> entries() const { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix conjugate() const;
  ComplexMatrix transpose() const;
  Complex trace() const;
  double frobenius_norm() const;
  bool is_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    return a += b;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    return a -= b;
  }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a,
                                 const ComplexMatrix& b);
  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

/// tr(a^dagger b).
Complex frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
/// LU with partial pivoting.
Complex determinant(const ComplexMatrix& a);

/// ||U^dagger U - I||_F
double unitarity_defect(const ComplexMatrix& u);
/// ||M - M^dagger||_F
double hermiticity_defect(const ComplexMatrix& m);

class HermitianMatrix {
 public:
  /// Validates ||M - M^dagger||_F <= tol.symmetry * ||M||_F.
  static HermitianMatrix checked(ComplexMatrix m, const Tolerances& tol = {});
  /// (M + M^dagger)/2; exact Hermitian by construction.
  static HermitianMatrix symmetrized(const ComplexMatrix& m);

  const ComplexMatrix& matrix() const { return m_; }
  std::size_t dim() const { return m_.dim(); }

 private:
  explicit HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

/// Element of su(n): skew-Hermitian and traceless.
class SkewHermitianTraceless {
 public:
  static SkewHermitianTraceless checked(ComplexMatrix m,
                                        const Tolerances& tol = {});
  /// (M - M^dagger)/2 with the trace part removed.
  static SkewHermitianTraceless projected(const ComplexMatrix& m);

  const ComplexMatrix& matrix() const { return m_; }
  std::size_t dim() const { return m_.dim(); }

 private:
  explicit SkewHermitianTraceless(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns are eigenvectors
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver. Throws NumericError (with the remaining
/// off-diagonal norm) if max_sweeps is exhausted.
EigenDecomposition hermitian_eig(const HermitianMatrix& h, int max_sweeps = 100);

/// exp(omega) via the eigendecomposition of i*omega.
ComplexMatrix exp_skew(const SkewHermitianTraceless& omega);

/// Orthonormal (Frobenius) basis of the traceless Hermitian n x n matrices;
/// n^2 - 1 elements (generalized Gell-Mann matrices scaled by 1/sqrt 2).
std::vector<ComplexMatrix> traceless_hermitian_basis(std::size_t n);

/// Number of singular values above rel_threshold * sigma_max of a matrix K,
/// given its Gram matrix K^dagger K.
std::size_t rank_from_gram(const HermitianMatrix& gram, double rel_threshold);

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

}  // namespace mangrad::linalg
