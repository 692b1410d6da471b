#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "mangrad/linalg.hpp"
#include "mangrad/rng.hpp"

namespace mangrad {

using RealVector = std::vector<double>;
using linalg::ComplexMatrix;

/// Euclidean(n) = R^n, Sphere(n) = unit sphere in R^n, SpecialUnitary(n) =
/// SU(n) with the bi-invariant metric Re tr(A^dagger B).
class ManifoldKind {
 public:
  enum class Type { Euclidean, Sphere, SpecialUnitary };

  static ManifoldKind euclidean(std::size_t n);
  static ManifoldKind sphere(std::size_t n);
  static ManifoldKind special_unitary(std::size_t n);

  Type type() const { return type_; }
  std::size_t n() const { return n_; }
  std::string name() const;

  friend bool operator==(const ManifoldKind&, const ManifoldKind&) = default;

 private:
  ManifoldKind(Type type, std::size_t n) : type_(type), n_(n) {}
  Type type_;
  std::size_t n_;
};

/// Intrinsic dimension N.
std::size_t dim(const ManifoldKind& kind);

/// Injectivity radius used in the step-size bound eta <= min(1/ell, inj).
/// Euclidean: infinity. Sphere: pi (antipodal cut locus). SU(n): pi, a
/// conservative value; under Re tr(A^dagger B) the geodesic
/// t -> exp(t*diag(i,-i)/sqrt2) first reaches -I at t = pi*sqrt2.
double injectivity_radius(const ManifoldKind& kind);

struct PointTolerance {
  double norm = 1e-10;
  double unitarity = 1e-10;
  double determinant = 1e-10;
};

class ManifoldPoint {
 public:
  static ManifoldPoint euclidean(RealVector coords);
  static ManifoldPoint sphere(RealVector coords, const PointTolerance& tol = {});
  static ManifoldPoint special_unitary(ComplexMatrix u,
                                       const PointTolerance& tol = {});
  /// Skips validation; used for freshly computed points that the caller
  /// checks (and re-projects) explicitly.
  static ManifoldPoint unchecked(ManifoldKind kind,
                                 std::variant<RealVector, ComplexMatrix> data);

  const ManifoldKind& kind() const { return kind_; }
  const RealVector& coords() const;
  const ComplexMatrix& unitary() const;

 private:
  ManifoldPoint(ManifoldKind kind, std::variant<RealVector, ComplexMatrix> data)
      : kind_(kind), data_(std::move(data)) {}
  ManifoldKind kind_;
  std::variant<RealVector, ComplexMatrix> data_;
};

/// Tangent vector. Euclidean/Sphere store the ambient vector; SU(n) stores
/// the left-trivialized generator omega (the tangent vector is omega * U).
/// The base point is passed alongside, not stored.
class TangentVector {
 public:
  TangentVector() = default;
  static TangentVector real(RealVector v);
  static TangentVector generator(ComplexMatrix omega);

  bool is_real() const { return std::holds_alternative<RealVector>(data_); }
  const RealVector& vec() const;
  const ComplexMatrix& omega() const;

  TangentVector& operator*=(double s);
  TangentVector& operator+=(const TangentVector& other);
  TangentVector& operator-=(const TangentVector& other);
  friend TangentVector operator*(TangentVector v, double s) { return v *= s; }
  friend TangentVector operator*(double s, TangentVector v) { return v *= s; }
  friend TangentVector operator+(TangentVector a, const TangentVector& b) {
    return a += b;
  }
  friend TangentVector operator-(TangentVector a, const TangentVector& b) {
    return a -= b;
  }

 private:
  explicit TangentVector(std::variant<RealVector, ComplexMatrix> d)
      : data_(std::move(d)) {}
  std::variant<RealVector, ComplexMatrix> data_;
};

/// Raw ambient vector for project_to_tangent: R^n for Euclidean/Sphere, an
/// n x n matrix V ~ omega * U for SU(n).
using AmbientVector = std::variant<RealVector, ComplexMatrix>;

TangentVector zero_tangent(const ManifoldPoint& x);
double inner(const ManifoldPoint& x, const TangentVector& a,
             const TangentVector& b);
double norm(const ManifoldPoint& x, const TangentVector& v);
ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& xi);
TangentVector haar_unit_tangent(const ManifoldPoint& x, RngStream& rng);
TangentVector project_to_tangent(const ManifoldPoint& x, const AmbientVector& v);

/// Orthonormal basis of T_x M, deterministic in x.
std::vector<TangentVector> tangent_basis(const ManifoldPoint& x);
/// Coordinates of v in tangent_basis(x).
RealVector tangent_coordinates(const ManifoldPoint& x, const TangentVector& v);

/// Largest violation of the point invariants (norm, unitarity, det).
double point_defect(const ManifoldPoint& x);
/// Closest valid point (normalization, or polar factor with det fixed to 1).
ManifoldPoint reproject(const ManifoldPoint& x);
/// Largest violation of the tangency invariant relative to ||v||.
double tangent_defect(const ManifoldPoint& x, const TangentVector& v);

}  // namespace mangrad
