#include "mangrad/sampler.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mangrad/errors.hpp"

namespace mangrad {

using linalg::Complex;

DesignConjugatesLaw::DesignConjugatesLaw(designs::FiniteUnitarySet unitaries,
                                         const HermitianMatrix& seed)
    : unitaries_(std::move(unitaries)), seed_(seed) {
  const std::size_t n = unitaries_.n();
  if (n < 2) throw UsageError("DesignConjugatesLaw: need n >= 2");
  if (seed.dim() != n) throw UsageError("DesignConjugatesLaw: seed dimension mismatch");
  const double scale = seed.matrix().frobenius_norm();
  if (scale == 0.0) throw UsageError("DesignConjugatesLaw: seed must be nonzero");
  if (std::abs(seed.matrix().trace()) > 1e-12 * scale)
    throw UsageError("DesignConjugatesLaw: seed must be traceless");
  for (const auto& u : unitaries_.elements()) {
    ComplexMatrix omega = u * seed.matrix() * u.adjoint() * Complex{0.0, 1.0};
    omega *= 1.0 / omega.frobenius_norm();
    generators_.push_back(
        TangentVector::generator(linalg::SkewHermitianTraceless::projected(omega).matrix()));
  }
}

namespace {

std::vector<double> discrete_weights(const ManifoldPoint& x, const DiscreteLaw& law) {
  const std::size_t m = law.fields.size();
  if (m == 0) throw LawError("discrete law has no fields");
  if (!law.weights) return std::vector<double>(m, 1.0 / static_cast<double>(m));
  std::vector<double> p = law.weights(x);
  if (p.size() != m) throw LawError("discrete law: weight count differs from field count");
  double total = 0.0;
  for (double w : p) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw LawError("discrete law: invalid weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "discrete law: weights sum to " << total << ", drift beyond 1e-9";
    throw LawError(msg.str());
  }
  for (double& w : p) w /= total;
  return p;
}

TangentVector normalized_field(const ManifoldPoint& x, const VectorField& field, std::size_t j) {
  TangentVector v = field(x);
  const double r = norm(x, v);
  if (!(r > 0.0) || !std::isfinite(r)) {
    std::ostringstream msg;
    msg << "discrete law: field " << j << " vanishes at the current point";
    throw LawError(msg.str());
  }
  return v * (1.0 / r);
}

}  // namespace

Direction sample_direction(const ManifoldPoint& x, const DirectionLaw& law, RngStream& rng) {
  if (std::holds_alternative<HaarLaw>(law)) return {haar_unit_tangent(x, rng), std::nullopt};
  if (const auto* d = std::get_if<DiscreteLaw>(&law)) {
    const auto p = discrete_weights(x, *d);
    const double r = rng.uniform();
    std::size_t j = p.size();
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      acc += p[k];
      if (p[k] > 0.0) j = k;
      if (r < acc && p[k] > 0.0) break;
    }
    if (j == p.size()) throw LawError("discrete law: all weights vanish");
    return {normalized_field(x, d->fields[j], j), j};
  }
  const auto& dc = std::get<DesignConjugatesLaw>(law);
  if (x.kind().type() != ManifoldKind::Type::SpecialUnitary ||
      x.kind().n() != dc.unitaries().n())
    throw LawError("design-conjugate law needs a matching SU(n) point");
  const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(dc.generators().size()));
  return {dc.generators()[k], k};
}

std::vector<TangentVector> support_directions(const ManifoldPoint& x, const DirectionLaw& law) {
  if (const auto* d = std::get_if<DiscreteLaw>(&law)) {
    std::vector<TangentVector> out;
    for (std::size_t j = 0; j < d->fields.size(); ++j)
      out.push_back(normalized_field(x, d->fields[j], j));
    return out;
  }
  if (const auto* dc = std::get_if<DesignConjugatesLaw>(&law)) return dc->generators();
  return {};
}

TangentVector project_gradient(const ManifoldPoint& x, const TangentVector& u,
                               const TangentVector& grad) {
  return u * inner(x, u, grad);
}

TangentVector project_gradient(const ManifoldPoint& x, const TangentVector& u,
                               const CostFunction& cost) {
  return project_gradient(x, u, cost.riemannian_grad(x));
}

double projection_sphere_check(const ManifoldPoint& x, const CostFunction& cost,
                               std::size_t samples, RngStream& rng) {
  const TangentVector grad = cost.riemannian_grad(x);
  const double gnorm = norm(x, grad);
  if (gnorm == 0.0) throw UsageError("projection_sphere_check: gradient vanishes at x");
  const TangentVector center = grad * 0.5;
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const TangentVector g = project_gradient(x, haar_unit_tangent(x, rng), grad);
    worst = std::max(worst, std::abs(norm(x, g - center) - 0.5 * gnorm));
  }
  return worst;
}

ExpectationReport expectation_check(const ManifoldPoint& x, const CostFunction& cost,
                                    std::size_t samples, RngStream& rng) {
  if (samples < 2) throw UsageError("expectation_check: need at least 2 samples");
  const TangentVector grad = cost.riemannian_grad(x);
  const RealVector target_full = tangent_coordinates(x, grad);
  const std::size_t n = target_full.size();
  RealVector sum(n, 0.0), sum_sq(n, 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    const RealVector c =
        tangent_coordinates(x, project_gradient(x, haar_unit_tangent(x, rng), grad));
    for (std::size_t k = 0; k < n; ++k) {
      sum[k] += c[k];
      sum_sq[k] += c[k] * c[k];
    }
  }
  ExpectationReport report;
  const double m = static_cast<double>(samples);
  for (std::size_t k = 0; k < n; ++k) {
    const double mean = sum[k] / m;
    const double var = std::max(0.0, (sum_sq[k] - m * mean * mean) / (m - 1.0));
    const double se = std::sqrt(var / m);
    const double dev = mean - target_full[k] / static_cast<double>(n);
    report.deviation.push_back(dev);
    report.standard_error.push_back(se);
    if (se > 0.0)
      report.max_z = std::max(report.max_z, std::abs(dev) / se);
    else if (dev != 0.0)
      report.max_z = std::numeric_limits<double>::infinity();
  }
  return report;
}

double overlap_floor(const DirectionLaw& law, const VectorField& v,
                     const std::vector<ManifoldPoint>& probe_points) {
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& x : probe_points) {
    const TangentVector target = v(x);
    double best = 0.0;
    for (const auto& d : support_directions(x, law)) {
      const double c = inner(x, d, target);
      best = std::max(best, c * c);
    }
    floor = std::min(floor, best);
  }
  return probe_points.empty() ? 0.0 : floor;
}

namespace {

std::size_t coordinate_rank(const std::vector<RealVector>& rows, std::size_t n) {
  if (rows.empty()) return 0;
  ComplexMatrix gram(n);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) gram(i, j) += r[i] * r[j];
  return linalg::rank_from_gram(HermitianMatrix::symmetrized(gram), designs::kRankThreshold);
}

}  // namespace

SpanReport span_check(const DirectionLaw& law, const std::vector<ManifoldPoint>& probe_points) {
  SpanReport report;
  if (std::holds_alternative<HaarLaw>(law) || probe_points.empty()) {
    report.ok = true;
    if (!probe_points.empty()) report.required_rank = report.min_rank = dim(probe_points[0].kind());
    return report;
  }
  report.required_rank = dim(probe_points[0].kind());
  report.min_rank = report.required_rank;
  for (const auto& x : probe_points) {
    const auto dirs = support_directions(x, law);
    std::vector<RealVector> coords;
    for (const auto& d : dirs) coords.push_back(tangent_coordinates(x, d));
    const std::size_t n = report.required_rank;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      std::vector<RealVector> kept;
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        if (std::holds_alternative<DiscreteLaw>(law)) {
          double c = 0.0;
          for (std::size_t i = 0; i < n; ++i) c += coords[j][i] * coords[k][i];
          if (std::abs(c) > 1.0 - kCollinearTolerance) continue;
        } else if (k == j) {
          continue;
        }
        kept.push_back(coords[k]);
      }
      report.min_rank = std::min(report.min_rank, coordinate_rank(kept, n));
    }
  }
  report.ok = report.min_rank == report.required_rank;
  return report;
}

ManifoldPoint random_point(const ManifoldKind& kind, RngStream& rng) {
  const std::size_t n = kind.n();
  switch (kind.type()) {
    case ManifoldKind::Type::Euclidean: {
      RealVector z(n);
      for (double& c : z) c = rng.normal();
      return ManifoldPoint::euclidean(std::move(z));
    }
    case ManifoldKind::Type::Sphere: {
      for (;;) {
        RealVector z(n);
        double r2 = 0.0;
        for (double& c : z) {
          c = rng.normal();
          r2 += c * c;
        }
        if (r2 == 0.0) continue;
        for (double& c : z) c /= std::sqrt(r2);
        return reproject(ManifoldPoint::unchecked(kind, std::move(z)));
      }
    }
    case ManifoldKind::Type::SpecialUnitary: {
      const auto id = ManifoldPoint::special_unitary(ComplexMatrix::identity(n));
      const TangentVector xi = haar_unit_tangent(id, rng) * (std::numbers::pi / 2.0);
      return reproject(exp_map(id, xi));
    }
  }
  throw UsageError("random_point: unknown manifold");
}

}  // namespace mangrad
