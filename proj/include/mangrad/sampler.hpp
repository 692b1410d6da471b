#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "mangrad/cost.hpp"
#include "mangrad/designs.hpp"
#include "mangrad/manifold.hpp"
#include "mangrad/rng.hpp"

namespace mangrad {

using VectorField = std::function<TangentVector(const ManifoldPoint&)>;

/// Rotation-invariant law on the unit tangent sphere.
struct HaarLaw {};

/// Picks xi_j(x)/||xi_j(x)|| with probability p_j(x). An empty weight
/// function means uniform weights.
struct DiscreteLaw {
  std::vector<VectorField> fields;
  std::function<std::vector<double>(const ManifoldPoint&)> weights;
};

/// Uniform over the normalized generators i U_g H U_g^dagger on SU(n); the
/// tangent vector at U is the generator times U.
class DesignConjugatesLaw {
 public:
  DesignConjugatesLaw(designs::FiniteUnitarySet unitaries, const HermitianMatrix& seed);

  const designs::FiniteUnitarySet& unitaries() const { return unitaries_; }
  const HermitianMatrix& seed() const { return seed_; }
  const std::vector<TangentVector>& generators() const { return generators_; }

 private:
  designs::FiniteUnitarySet unitaries_;
  HermitianMatrix seed_;
  std::vector<TangentVector> generators_;
};

using DirectionLaw = std::variant<HaarLaw, DiscreteLaw, DesignConjugatesLaw>;

struct Direction {
  TangentVector u;
  /// Index of the chosen field or group element (discrete laws only).
  std::optional<std::size_t> index;
};

/// Throws LawError when a selected field vanishes, or when the discrete
/// weights are negative or drift from 1 by more than 1e-9.
Direction sample_direction(const ManifoldPoint& x, const DirectionLaw& law, RngStream& rng);

/// Normalized support directions at x (empty for HaarLaw).
std::vector<TangentVector> support_directions(const ManifoldPoint& x, const DirectionLaw& law);

/// g(x, u) = <u, grad f(x)> u
TangentVector project_gradient(const ManifoldPoint& x, const TangentVector& u,
                               const TangentVector& grad);
TangentVector project_gradient(const ManifoldPoint& x, const TangentVector& u,
                               const CostFunction& cost);

/// max over Haar draws of | ||g - grad/2|| - ||grad||/2 |. UsageError if grad = 0.
double projection_sphere_check(const ManifoldPoint& x, const CostFunction& cost,
                               std::size_t samples, RngStream& rng);

struct ExpectationReport {
  /// In tangent_basis(x) coordinates.
  RealVector deviation;  // mean(g) - grad / N
  RealVector standard_error;
  /// max_k |deviation_k| / standard_error_k (0 where the SE vanishes and
  /// the deviation is exactly 0).
  double max_z = 0.0;
};

ExpectationReport expectation_check(const ManifoldPoint& x, const CostFunction& cost,
                                    std::size_t samples, RngStream& rng);

/// min over probe points of max_j <xi_j/||xi_j||, v>^2.
double overlap_floor(const DirectionLaw& law, const VectorField& v,
                     const std::vector<ManifoldPoint>& probe_points);

inline constexpr double kCollinearTolerance = 1e-9;

struct SpanReport {
  std::size_t required_rank = 0;
  std::size_t min_rank = 0;  // worst case over removals and probe points
  bool ok = false;
};

/// Discrete laws: for each j, drop every support vector collinear with
/// xi_j (|cos| > 1 - 1e-9) and rank the rest. Design-conjugate laws: drop
/// one group element at a time. Haar laws trivially pass.
SpanReport span_check(const DirectionLaw& law, const std::vector<ManifoldPoint>& probe_points);

/// Random point: Gaussian (Euclidean), normalized Gaussian (Sphere), or
/// exp of a random generator scaled to Frobenius norm pi/2 (SU(n)).
ManifoldPoint random_point(const ManifoldKind& kind, RngStream& rng);

}  // namespace mangrad
