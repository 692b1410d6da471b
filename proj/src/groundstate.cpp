#include "mangrad/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "mangrad/errors.hpp"

namespace mangrad::groundstate {

using linalg::Complex;

void GroundStateProblem::validate() const {
  if (n_qubits < 1 || n_qubits > 3) throw UsageError("n_qubits must be 1, 2 or 3");
  if (a_eigenvalues.size() != dim() || rho_eigenvalues.size() != dim()) {
    std::ostringstream msg;
    msg << "a_eigenvalues and rho_eigenvalues need " << dim() << " entries";
    throw UsageError(msg.str());
  }
  for (std::size_t i = 0; i + 1 < a_eigenvalues.size(); ++i)
    if (a_eigenvalues[i] < a_eigenvalues[i + 1])
      throw UsageError("a_eigenvalues must be non-increasing");
  double total = 0.0;
  for (double p : rho_eigenvalues) {
    if (!(p >= 0.0)) throw UsageError("rho_eigenvalues must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) throw UsageError("rho_eigenvalues must sum to 1");
}

double GroundStateProblem::spread() const {
  const auto [lo, hi] = std::minmax_element(a_eigenvalues.begin(), a_eigenvalues.end());
  return *hi - *lo;
}

bool GroundStateProblem::degenerate_spectra() const {
  auto repeated = [](RealVector v) {
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      if (std::abs(v[i + 1] - v[i]) <= 1e-12) return true;
    return false;
  };
  return repeated(a_eigenvalues) || repeated(rho_eigenvalues);
}

GroundStateCost GroundStateProblem::cost() const {
  validate();
  return GroundStateCost::from_spectra(a_eigenvalues, rho_eigenvalues);
}

ManifoldPoint GroundStateProblem::initial_point(RngStream& rng) const {
  const auto kind = ManifoldKind::special_unitary(dim());
  if (initial == InitialPolicy::FixedIdentity)
    return ManifoldPoint::special_unitary(ComplexMatrix::identity(dim()));
  return random_point(kind, rng);
}

double projected_derivative(const ManifoldPoint& u, const HermitianMatrix& h,
                            const GroundStateCost& cost) {
  if (std::abs(h.matrix().frobenius_norm() - 1.0) > 1e-10)
    throw UsageError("projected_derivative: H must have unit Frobenius norm");
  const TangentVector direction = TangentVector::generator(h.matrix() * Complex{0.0, -1.0});
  return inner(u, cost.riemannian_grad(u), direction);
}

namespace {

EnsembleProblem make_problem(const GroundStateProblem& problem) {
  EnsembleProblem ep;
  ep.cost = std::make_shared<GroundStateCost>(problem.cost());
  ep.initial_point = [problem](std::size_t, RngStream& rng) { return problem.initial_point(rng); };
  ep.target = global_min_value(static_cast<const GroundStateCost&>(*ep.cost));
  ep.success_tol = 1e-3 * problem.spread();
  return ep;
}

}  // namespace

EnsembleSummary run_groundstate_ensemble(const GroundStateProblem& problem,
                                         const DirectionLaw& law, const RgdConfig& config,
                                         std::size_t n_realizations, std::size_t threads) {
  return ensemble_run(make_problem(problem), law, config, n_realizations, threads);
}

nlohmann::json SaddleReport::to_json() const {
  return {{"n_realizations", n_realizations},
          {"strict_saddle_endpoints", strict_saddle_endpoints},
          {"degenerate_starts", degenerate_starts},
          {"degenerate_spectra", degenerate_spectra},
          {"critical_values", critical_values},
          {"dwell_iterations", dwell_iterations},
          {"passages", passages},
          {"endpoint_commutator_norms", endpoint_commutator_norms},
          {"ensemble", ensemble.to_json()}};
}

SaddleReport saddle_statistics(const GroundStateProblem& problem, const DirectionLaw& law,
                               const RgdConfig& config, std::size_t n_realizations,
                               std::size_t threads) {
  const EnsembleProblem ep = make_problem(problem);
  const auto& cost = static_cast<const GroundStateCost&>(*ep.cost);
  RgdConfig cfg = config;
  cfg.critical_values = critical_values(cost);

  SaddleReport report;
  report.n_realizations = n_realizations;
  report.degenerate_spectra = problem.degenerate_spectra();
  report.critical_values = cfg.critical_values;
  report.ensemble = ensemble_run(ep, law, cfg, n_realizations, threads);
  for (const auto& r : report.ensemble.results) {
    const bool degenerate_start = r.record.iterations_used == 0 && r.stop == StopReason::GradTol;
    if (degenerate_start)
      ++report.degenerate_starts;
    else if (r.classification == CriticalKind::StrictSaddle)
      ++report.strict_saddle_endpoints;
    std::size_t dwell = 0;
    const auto& runs = r.record.near_critical_runs;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const bool terminal = runs[k].first + runs[k].second > r.record.iterations_used;
      if (!terminal) dwell += runs[k].second;
    }
    report.dwell_iterations.push_back(dwell);
    report.passages.push_back(r.record.passages.size());
    report.endpoint_commutator_norms.push_back(cost.commutator_norm(*r.record.final_point));
  }
  return report;
}

}  // namespace mangrad::groundstate
