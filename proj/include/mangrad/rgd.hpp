#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mangrad/cost.hpp"
#include "mangrad/manifold.hpp"
#include "mangrad/rng.hpp"
#include "mangrad/sampler.hpp"

namespace mangrad {

enum class EtaPolicy { Explicit, FromSmoothness };

struct RgdConfig {
  EtaPolicy eta_policy = EtaPolicy::FromSmoothness;
  /// Step size for Explicit. Under FromSmoothness an optional override that
  /// must not exceed min(1/ell, inj).
  std::optional<double> eta;
  std::size_t max_iter = 100000;
  double grad_tol = 1e-8;
  /// Stop when |f_{i-window} - f_i| <= f_tol * (1 + |f_i|).
  double f_tol = 1e-12;
  std::size_t window = 100;
  std::uint64_t seed = 0;
  double certificate_slack = 1e-10;
  /// Keep every k-th iteration in the record; 0 keeps none.
  std::size_t record_stride = 1;
  /// Critical values whose downward crossings are logged.
  std::vector<double> critical_values;
  /// Run the direction-law span check at x0 and a few random points.
  bool check_span = true;
};

/// min(1/ell, inj) under FromSmoothness (or the validated override);
/// config.eta under Explicit. Throws UsageError on invalid values.
double resolve_eta(const RgdConfig& config, const CostFunction& cost);

struct StepDiagnostics {
  double f_before = 0.0;
  double f_after = 0.0;
  double grad_norm = 0.0;
  /// <grad f(x), g>
  double proj = 0.0;
  /// -eta (1 - ell eta / 2) <grad, g>
  double certificate_bound = 0.0;
  /// (f_after - f_before) - certificate_bound; <= slack when the certificate holds.
  double cert_residual = 0.0;
  std::optional<std::size_t> direction;
  bool reprojected = false;
};

struct StepResult {
  ManifoldPoint x_next;
  StepDiagnostics diagnostics;
};

/// x_next = exp_x(-eta g(x, u)) with u drawn from law. One re-projection is
/// attempted if the new point leaves the manifold; NumericError after that.
StepResult rgd_step(const ManifoldPoint& x, const CostFunction& cost, const DirectionLaw& law,
                    double eta, RngStream& rng);

enum class StopReason { GradTol, FTolWindow, Budget, CertificateViolation };
std::string to_string(StopReason reason);

struct IterationRecord {
  std::size_t iter = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double proj = 0.0;
  double cert_residual = 0.0;
  std::optional<std::size_t> direction;
};

struct SaddlePassage {
  std::size_t iter = 0;
  double critical_value = 0.0;
};

struct TrajectoryRecord {
  std::vector<IterationRecord> iterations;
  std::optional<ManifoldPoint> final_point;
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  std::size_t iterations_used = 0;
  StopReason stop = StopReason::Budget;
  double eta = 0.0;
  std::vector<SaddlePassage> passages;
  std::size_t certificate_violations = 0;
  double max_cert_residual = -std::numeric_limits<double>::infinity();
  /// Largest f_{i+1} - f_i, minus the 1e-12 (1 + |f|) allowance.
  double max_increase = -std::numeric_limits<double>::infinity();
  /// (first iteration, length) of each run of consecutive iterations with
  /// ||grad|| <= 10 grad_tol.
  std::vector<std::pair<std::size_t, std::size_t>> near_critical_runs;

  /// Columns iter,f,grad_norm,proj,cert_residual at 17 significant digits.
  std::string to_csv() const;
};

/// Runs until the gradient, window, or budget criterion fires, or aborts on
/// a certificate violation. Step errors are rethrown with the iteration index.
TrajectoryRecord rgd_run(const ManifoldPoint& x0, const CostFunction& cost,
                         const DirectionLaw& law, const RgdConfig& config, RngStream& rng);
/// Same, with RngStream(config.seed, 0).
TrajectoryRecord rgd_run(const ManifoldPoint& x0, const CostFunction& cost,
                         const DirectionLaw& law, const RgdConfig& config);

enum class CriticalKind { Minimum, StrictSaddle, Degenerate, NotCritical };
std::string to_string(CriticalKind kind);

struct Classification {
  CriticalKind kind = CriticalKind::NotCritical;
  double grad_norm = 0.0;
  /// Hessian eigenvalues in an orthonormal tangent basis (ascending).
  std::vector<double> eigenvalues;
  double lambda_tol = 0.0;
};

/// Polarized analytic Hessian form when the cost provides one, otherwise
/// central second differences along geodesics with step fd_step.
Classification classify_critical(const CostFunction& cost, const ManifoldPoint& x,
                                 double grad_tol = 1e-6, double fd_step = 1e-4);

struct EnsembleProblem {
  std::shared_ptr<const CostFunction> cost;
  /// Starting point for a realization; may draw from the realization's stream.
  std::function<ManifoldPoint(std::size_t realization, RngStream& rng)> initial_point;
  std::optional<double> target;
  /// success <=> |final f - target| <= success_tol
  double success_tol = 1e-3;
};

struct RealizationResult {
  std::size_t realization = 0;
  double initial_f = 0.0;
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  std::size_t iterations = 0;
  StopReason stop = StopReason::Budget;
  CriticalKind classification = CriticalKind::NotCritical;
  bool success = false;
  TrajectoryRecord record;
};

struct EnsembleSummary {
  std::vector<RealizationResult> results;
  std::optional<double> target;
  double success_tol = 0.0;
  double eta = 0.0;
  std::size_t successes = 0;
  std::size_t strict_saddle_endpoints = 0;
  std::size_t certificate_violations = 0;
  double max_cert_residual = -std::numeric_limits<double>::infinity();
  double max_increase = -std::numeric_limits<double>::infinity();

  double success_rate() const;
  nlohmann::json to_json() const;
};

/// Realization r runs on RngStream(config.seed, r). threads = 0 picks the
/// hardware concurrency; results do not depend on the thread count.
EnsembleSummary ensemble_run(const EnsembleProblem& problem, const DirectionLaw& law,
                             const RgdConfig& config, std::size_t n_realizations,
                             std::size_t threads = 0);

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = auto).
/// The first exception thrown by any worker is rethrown after the join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

/// %.17g formatting used by every CSV writer.
std::string format_double(double v);

}  // namespace mangrad
