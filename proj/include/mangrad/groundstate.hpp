#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "mangrad/cost.hpp"
#include "mangrad/rgd.hpp"
#include "mangrad/sampler.hpp"

namespace mangrad::groundstate {

enum class InitialPolicy { FixedIdentity, HaarRandomUnitary };

struct GroundStateProblem {
  std::size_t n_qubits = 1;
  RealVector a_eigenvalues;    // non-increasing, length 2^n_qubits
  RealVector rho_eigenvalues;  // non-negative, summing to 1
  InitialPolicy initial = InitialPolicy::HaarRandomUnitary;

  /// UsageError on a bad qubit count, length, ordering, or density.
  void validate() const;
  std::size_t dim() const { return std::size_t{1} << n_qubits; }
  /// a_max - a_min
  double spread() const;
  /// True if A or rho has a repeated eigenvalue (to 1e-12).
  bool degenerate_spectra() const;
  GroundStateCost cost() const;
  /// Identity, or exp of a random generator scaled to norm pi/2.
  ManifoldPoint initial_point(RngStream& rng) const;
};

/// <[A, U rho U^dagger], -iH>, which equals d/dx J(exp(-ixH) U) at x = 0.
/// UsageError unless ||H||_F = 1 to 1e-10.
double projected_derivative(const ManifoldPoint& u, const HermitianMatrix& h,
                            const GroundStateCost& cost);

/// Ensemble with target global_min_value and success tolerance
/// 1e-3 * spread(A). Realization r runs on RngStream(config.seed, r).
EnsembleSummary run_groundstate_ensemble(const GroundStateProblem& problem,
                                         const DirectionLaw& law, const RgdConfig& config,
                                         std::size_t n_realizations, std::size_t threads = 0);

struct SaddleReport {
  std::size_t n_realizations = 0;
  std::size_t strict_saddle_endpoints = 0;
  std::size_t degenerate_starts = 0;
  bool degenerate_spectra = false;
  std::vector<double> critical_values;
  /// Per realization: iterations spent with ||grad|| <= 10 grad_tol before
  /// the final approach.
  std::vector<std::size_t> dwell_iterations;
  /// Per realization: number of downward crossings of critical values.
  std::vector<std::size_t> passages;
  /// Per realization: ||[A, U rho U^dagger]||_F at the final point.
  std::vector<double> endpoint_commutator_norms;
  EnsembleSummary ensemble;

  nlohmann::json to_json() const;
};

/// Runs the ensemble with critical values registered for passage logging
/// and classifies every endpoint. Starts with ||grad|| <= grad_tol are
/// counted as degenerate starts and not as saddle endpoints.
SaddleReport saddle_statistics(const GroundStateProblem& problem, const DirectionLaw& law,
                               const RgdConfig& config, std::size_t n_realizations,
                               std::size_t threads = 0);

}  // namespace mangrad::groundstate
