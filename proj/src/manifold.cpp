#include "mangrad/manifold.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mangrad/errors.hpp"

namespace mangrad {

using linalg::Complex;

namespace {

double dot(const RealVector& a, const RealVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double euclidean_norm(const RealVector& a) { return std::sqrt(dot(a, a)); }

void require_real_size(const ManifoldPoint& x, const TangentVector& v) {
  if (!v.is_real() || v.vec().size() != x.kind().n()) {
    throw UsageError("tangent vector does not belong to " + x.kind().name());
  }
}

void require_generator_size(const ManifoldPoint& x, const TangentVector& v) {
  if (v.is_real() || v.omega().dim() != x.kind().n()) {
    throw UsageError("tangent vector does not belong to " + x.kind().name());
  }
}

void require_matching(const ManifoldPoint& x, const TangentVector& v) {
  if (x.kind().type() == ManifoldKind::Type::SpecialUnitary)
    require_generator_size(x, v);
  else
    require_real_size(x, v);
}

// Gaussian traceless Hermitian matrix: sum_k z_k B_k over the orthonormal
// basis of linalg::traceless_hermitian_basis, written out entrywise.
ComplexMatrix gaussian_traceless_hermitian(std::size_t n, RngStream& rng) {
  ComplexMatrix h(n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      const double re = rng.normal() * inv_sqrt2;
      const double im = rng.normal() * inv_sqrt2;
      h(j, k) = Complex{re, -im};
      h(k, j) = Complex{re, im};
    }
  for (std::size_t l = 1; l < n; ++l) {
    const double z = rng.normal() / std::sqrt(static_cast<double>(l * (l + 1)));
    for (std::size_t m = 0; m < l; ++m) h(m, m) += z;
    h(l, l) -= static_cast<double>(l) * z;
  }
  return h;
}

}  // namespace

ManifoldKind ManifoldKind::euclidean(std::size_t n) {
  if (n < 1) throw UsageError("Euclidean(n) requires n >= 1");
  return {Type::Euclidean, n};
}

ManifoldKind ManifoldKind::sphere(std::size_t n) {
  if (n < 2) throw UsageError("Sphere(n) requires n >= 2");
  return {Type::Sphere, n};
}

ManifoldKind ManifoldKind::special_unitary(std::size_t n) {
  if (n < 2) throw UsageError("SpecialUnitary(n) requires n >= 2");
  return {Type::SpecialUnitary, n};
}

std::string ManifoldKind::name() const {
  switch (type_) {
    case Type::Euclidean: return "Euclidean(" + std::to_string(n_) + ")";
    case Type::Sphere: return "Sphere(" + std::to_string(n_) + ")";
    case Type::SpecialUnitary: return "SpecialUnitary(" + std::to_string(n_) + ")";
  }
  return "?";
}

std::size_t dim(const ManifoldKind& kind) {
  switch (kind.type()) {
    case ManifoldKind::Type::Euclidean: return kind.n();
    case ManifoldKind::Type::Sphere: return kind.n() - 1;
    case ManifoldKind::Type::SpecialUnitary: return kind.n() * kind.n() - 1;
  }
  return 0;
}

double injectivity_radius(const ManifoldKind& kind) {
  if (kind.type() == ManifoldKind::Type::Euclidean)
    return std::numeric_limits<double>::infinity();
  return std::numbers::pi;
}

ManifoldPoint ManifoldPoint::euclidean(RealVector coords) {
  for (double c : coords)
    if (!std::isfinite(c)) throw UsageError("Euclidean point: non-finite coordinate");
  const auto kind = ManifoldKind::euclidean(coords.size());
  return {kind, std::move(coords)};
}

ManifoldPoint ManifoldPoint::sphere(RealVector coords, const PointTolerance& tol) {
  const auto kind = ManifoldKind::sphere(coords.size());
  const double r = euclidean_norm(coords);
  if (!(std::abs(r - 1.0) <= tol.norm)) {
    std::ostringstream msg;
    msg << "Sphere point: norm " << r << " is not 1";
    throw UsageError(msg.str());
  }
  return {kind, std::move(coords)};
}

ManifoldPoint ManifoldPoint::special_unitary(ComplexMatrix u,
                                             const PointTolerance& tol) {
  const auto kind = ManifoldKind::special_unitary(u.dim());
  const double udef = linalg::unitarity_defect(u);
  const double ddef = std::abs(linalg::determinant(u) - 1.0);
  if (!(udef <= tol.unitarity) || !(ddef <= tol.determinant)) {
    std::ostringstream msg;
    msg << "SpecialUnitary point: unitarity defect " << udef
        << ", |det - 1| = " << ddef;
    throw UsageError(msg.str());
  }
  return {kind, std::move(u)};
}

ManifoldPoint ManifoldPoint::unchecked(ManifoldKind kind,
                                       std::variant<RealVector, ComplexMatrix> data) {
  return {kind, std::move(data)};
}

const RealVector& ManifoldPoint::coords() const {
  if (const auto* v = std::get_if<RealVector>(&data_)) return *v;
  throw UsageError("coords(): point on " + kind_.name() + " is a matrix");
}

const ComplexMatrix& ManifoldPoint::unitary() const {
  if (const auto* m = std::get_if<ComplexMatrix>(&data_)) return *m;
  throw UsageError("unitary(): point on " + kind_.name() + " is a vector");
}

TangentVector TangentVector::real(RealVector v) { return TangentVector(std::move(v)); }

TangentVector TangentVector::generator(ComplexMatrix omega) {
  return TangentVector(std::move(omega));
}

const RealVector& TangentVector::vec() const {
  if (const auto* v = std::get_if<RealVector>(&data_)) return *v;
  throw UsageError("vec(): tangent vector is a generator matrix");
}

const ComplexMatrix& TangentVector::omega() const {
  if (const auto* m = std::get_if<ComplexMatrix>(&data_)) return *m;
  throw UsageError("omega(): tangent vector is a real vector");
}

TangentVector& TangentVector::operator*=(double s) {
  if (auto* v = std::get_if<RealVector>(&data_)) {
    for (double& c : *v) c *= s;
  } else {
    std::get<ComplexMatrix>(data_) *= s;
  }
  return *this;
}

TangentVector& TangentVector::operator+=(const TangentVector& other) {
  if (auto* v = std::get_if<RealVector>(&data_)) {
    const auto& w = other.vec();
    if (w.size() != v->size()) throw UsageError("tangent sum: size mismatch");
    for (std::size_t i = 0; i < v->size(); ++i) (*v)[i] += w[i];
  } else {
    std::get<ComplexMatrix>(data_) += other.omega();
  }
  return *this;
}

TangentVector& TangentVector::operator-=(const TangentVector& other) {
  if (auto* v = std::get_if<RealVector>(&data_)) {
    const auto& w = other.vec();
    if (w.size() != v->size()) throw UsageError("tangent difference: size mismatch");
    for (std::size_t i = 0; i < v->size(); ++i) (*v)[i] -= w[i];
  } else {
    std::get<ComplexMatrix>(data_) -= other.omega();
  }
  return *this;
}

TangentVector zero_tangent(const ManifoldPoint& x) {
  if (x.kind().type() == ManifoldKind::Type::SpecialUnitary)
    return TangentVector::generator(ComplexMatrix(x.kind().n()));
  return TangentVector::real(RealVector(x.kind().n(), 0.0));
}

double inner(const ManifoldPoint& x, const TangentVector& a, const TangentVector& b) {
  require_matching(x, a);
  require_matching(x, b);
  if (x.kind().type() == ManifoldKind::Type::SpecialUnitary)
    return linalg::frobenius_inner(a.omega(), b.omega()).real();
  return dot(a.vec(), b.vec());
}

double norm(const ManifoldPoint& x, const TangentVector& v) {
  return std::sqrt(std::max(inner(x, v, v), 0.0));
}

ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& xi) {
  require_matching(x, xi);
  switch (x.kind().type()) {
    case ManifoldKind::Type::Euclidean: {
      RealVector out = x.coords();
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += xi.vec()[i];
      return ManifoldPoint::unchecked(x.kind(), std::move(out));
    }
    case ManifoldKind::Type::Sphere: {
      const double speed = euclidean_norm(xi.vec());
      if (speed == 0.0) return x;
      const double c = std::cos(speed), s = std::sin(speed) / speed;
      RealVector out = x.coords();
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * out[i] + s * xi.vec()[i];
      return ManifoldPoint::unchecked(x.kind(), std::move(out));
    }
    case ManifoldKind::Type::SpecialUnitary: {
      const auto step =
          linalg::exp_skew(linalg::SkewHermitianTraceless::projected(xi.omega()));
      return ManifoldPoint::unchecked(x.kind(), step * x.unitary());
    }
  }
  throw UsageError("exp_map: unknown manifold");
}

TangentVector haar_unit_tangent(const ManifoldPoint& x, RngStream& rng) {
  const std::size_t n = x.kind().n();
  for (;;) {
    switch (x.kind().type()) {
      case ManifoldKind::Type::Euclidean: {
        RealVector z(n);
        for (double& c : z) c = rng.normal();
        const double r = euclidean_norm(z);
        if (r == 0.0) continue;
        for (double& c : z) c /= r;
        return TangentVector::real(std::move(z));
      }
      case ManifoldKind::Type::Sphere: {
        // Projecting an ambient Gaussian onto x^perp gives an isotropic
        // Gaussian on the tangent space.
        RealVector z(n);
        for (double& c : z) c = rng.normal();
        const double radial = dot(z, x.coords());
        for (std::size_t i = 0; i < n; ++i) z[i] -= radial * x.coords()[i];
        const double r = euclidean_norm(z);
        if (r == 0.0) continue;
        for (double& c : z) c /= r;
        return TangentVector::real(std::move(z));
      }
      case ManifoldKind::Type::SpecialUnitary: {
        ComplexMatrix h = gaussian_traceless_hermitian(n, rng);
        const double r = h.frobenius_norm();
        if (r == 0.0) continue;
        return TangentVector::generator(h * Complex{0.0, -1.0 / r});
      }
    }
  }
}

TangentVector project_to_tangent(const ManifoldPoint& x, const AmbientVector& v) {
  switch (x.kind().type()) {
    case ManifoldKind::Type::Euclidean: {
      const auto& raw = std::get<RealVector>(v);
      if (raw.size() != x.kind().n()) throw UsageError("project_to_tangent: size mismatch");
      return TangentVector::real(raw);
    }
    case ManifoldKind::Type::Sphere: {
      RealVector out = std::get<RealVector>(v);
      if (out.size() != x.kind().n()) throw UsageError("project_to_tangent: size mismatch");
      const double radial = dot(out, x.coords());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] -= radial * x.coords()[i];
      return TangentVector::real(std::move(out));
    }
    case ManifoldKind::Type::SpecialUnitary: {
      const auto& raw = std::get<ComplexMatrix>(v);
      if (raw.dim() != x.kind().n()) throw UsageError("project_to_tangent: size mismatch");
      const ComplexMatrix m = raw * x.unitary().adjoint();
      return TangentVector::generator(linalg::SkewHermitianTraceless::projected(m).matrix());
    }
  }
  throw UsageError("project_to_tangent: unknown manifold");
}

std::vector<TangentVector> tangent_basis(const ManifoldPoint& x) {
  const std::size_t n = x.kind().n();
  std::vector<TangentVector> basis;
  switch (x.kind().type()) {
    case ManifoldKind::Type::Euclidean:
      for (std::size_t i = 0; i < n; ++i) {
        RealVector e(n, 0.0);
        e[i] = 1.0;
        basis.push_back(TangentVector::real(std::move(e)));
      }
      break;
    case ManifoldKind::Type::Sphere: {
      // Gram-Schmidt on the axes, skipping the one most aligned with x.
      const auto& p = x.coords();
      std::size_t skip = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (std::abs(p[i]) > std::abs(p[skip])) skip = i;
      std::vector<RealVector> done{p};
      for (std::size_t i = 0; i < n; ++i) {
        if (i == skip) continue;
        RealVector e(n, 0.0);
        e[i] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
          for (const auto& b : done) {
            const double c = dot(e, b);
            for (std::size_t k = 0; k < n; ++k) e[k] -= c * b[k];
          }
        const double r = euclidean_norm(e);
        for (double& c : e) c /= r;
        done.push_back(e);
        basis.push_back(TangentVector::real(std::move(e)));
      }
      break;
    }
    case ManifoldKind::Type::SpecialUnitary:
      for (auto& h : linalg::traceless_hermitian_basis(n))
        basis.push_back(TangentVector::generator(h * Complex{0.0, -1.0}));
      break;
  }
  return basis;
}

RealVector tangent_coordinates(const ManifoldPoint& x, const TangentVector& v) {
  const auto basis = tangent_basis(x);
  RealVector out;
  out.reserve(basis.size());
  for (const auto& b : basis) out.push_back(inner(x, b, v));
  return out;
}

double point_defect(const ManifoldPoint& x) {
  switch (x.kind().type()) {
    case ManifoldKind::Type::Euclidean: {
      for (double c : x.coords())
        if (!std::isfinite(c)) return std::numeric_limits<double>::infinity();
      return 0.0;
    }
    case ManifoldKind::Type::Sphere:
      return std::abs(euclidean_norm(x.coords()) - 1.0);
    case ManifoldKind::Type::SpecialUnitary: {
      const auto& u = x.unitary();
      if (!u.is_finite()) return std::numeric_limits<double>::infinity();
      return std::max(linalg::unitarity_defect(u),
                      std::abs(linalg::determinant(u) - 1.0));
    }
  }
  return 0.0;
}

ManifoldPoint reproject(const ManifoldPoint& x) {
  switch (x.kind().type()) {
    case ManifoldKind::Type::Euclidean:
      return x;
    case ManifoldKind::Type::Sphere: {
      RealVector p = x.coords();
      const double r = euclidean_norm(p);
      if (r == 0.0 || !std::isfinite(r)) throw NumericError("reproject: degenerate sphere point");
      for (double& c : p) c /= r;
      return ManifoldPoint::unchecked(x.kind(), std::move(p));
    }
    case ManifoldKind::Type::SpecialUnitary: {
      const auto& u = x.unitary();
      if (!u.is_finite()) throw NumericError("reproject: non-finite unitary");
      // Polar factor U (U^dagger U)^{-1/2}.
      const auto eig = linalg::hermitian_eig(linalg::HermitianMatrix::symmetrized(u.adjoint() * u));
      const std::size_t n = u.dim();
      ComplexMatrix scaled = eig.vectors;
      for (std::size_t k = 0; k < n; ++k) {
        if (eig.values[k] <= 0.0) throw NumericError("reproject: singular matrix");
        const double f = 1.0 / std::sqrt(eig.values[k]);
        for (std::size_t i = 0; i < n; ++i) scaled(i, k) *= f;
      }
      ComplexMatrix w = u * (scaled * eig.vectors.adjoint());
      const Complex det = linalg::determinant(w);
      w *= std::pow(det, -1.0 / static_cast<double>(n));
      return ManifoldPoint::unchecked(x.kind(), std::move(w));
    }
  }
  return x;
}

double tangent_defect(const ManifoldPoint& x, const TangentVector& v) {
  require_matching(x, v);
  switch (x.kind().type()) {
    case ManifoldKind::Type::Euclidean:
      return 0.0;
    case ManifoldKind::Type::Sphere: {
      const double r = euclidean_norm(v.vec());
      return r == 0.0 ? 0.0 : std::abs(dot(v.vec(), x.coords())) / r;
    }
    case ManifoldKind::Type::SpecialUnitary: {
      const auto& w = v.omega();
      const double r = w.frobenius_norm();
      if (r == 0.0) return 0.0;
      return std::max((w + w.adjoint()).frobenius_norm(), std::abs(w.trace())) / r;
    }
  }
  return 0.0;
}

}  // namespace mangrad
