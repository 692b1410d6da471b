#include "mangrad/rgd.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "mangrad/errors.hpp"

namespace mangrad {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double resolve_eta(const RgdConfig& config, const CostFunction& cost) {
  if (config.eta_policy == EtaPolicy::Explicit) {
    if (!config.eta || !(*config.eta > 0.0) || !std::isfinite(*config.eta))
      throw UsageError("eta: explicit policy needs a positive finite eta");
    return *config.eta;
  }
  const double ell = cost.smoothness_ell();
  const double inj = injectivity_radius(cost.manifold());
  const double cap = std::min(ell > 0.0 ? 1.0 / ell : std::numeric_limits<double>::infinity(), inj);
  if (config.eta) {
    if (!(*config.eta > 0.0)) throw UsageError("eta: must be positive");
    if (*config.eta > cap) {
      std::ostringstream msg;
      msg << "eta: " << *config.eta << " exceeds min(1/ell, inj) = " << cap
          << "; descent is only guaranteed for eta <= min(1/ell, inj)";
      throw UsageError(msg.str());
    }
    return *config.eta;
  }
  if (!std::isfinite(cap)) throw UsageError("eta: ell = 0 on a flat manifold, set eta explicitly");
  return cap;
}

namespace {

struct StepInput {
  double f;
  TangentVector grad;
  double grad_norm;
};

StepResult step_from(const ManifoldPoint& x, const StepInput& in, const CostFunction& cost,
                     const DirectionLaw& law, double eta, RngStream& rng) {
  const Direction dir = sample_direction(x, law, rng);
  const double proj_coeff = inner(x, dir.u, in.grad);
  const TangentVector g = dir.u * proj_coeff;

  StepDiagnostics d;
  d.f_before = in.f;
  d.grad_norm = in.grad_norm;
  d.proj = proj_coeff * proj_coeff;
  d.direction = dir.index;

  ManifoldPoint next = proj_coeff == 0.0 ? x : exp_map(x, g * (-eta));
  if (point_defect(next) > 1e-10) {
    next = reproject(next);
    d.reprojected = true;
    const double defect = point_defect(next);
    if (!(defect <= 1e-10)) {
      std::ostringstream msg;
      msg << "rgd_step: point left the manifold (defect " << defect << " after re-projection)";
      throw NumericError(msg.str());
    }
  }
  d.f_after = cost.value(next);
  const double ell = cost.smoothness_ell();
  d.certificate_bound = -eta * (1.0 - ell * eta / 2.0) * d.proj;
  d.cert_residual = (d.f_after - d.f_before) - d.certificate_bound;
  return {std::move(next), d};
}

StepInput evaluate(const ManifoldPoint& x, const CostFunction& cost) {
  TangentVector grad = cost.riemannian_grad(x);
  const double gn = norm(x, grad);
  return {cost.value(x), std::move(grad), gn};
}

}  // namespace

StepResult rgd_step(const ManifoldPoint& x, const CostFunction& cost, const DirectionLaw& law,
                    double eta, RngStream& rng) {
  if (!(eta > 0.0)) throw UsageError("rgd_step: eta must be positive");
  return step_from(x, evaluate(x, cost), cost, law, eta, rng);
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::GradTol: return "grad_tol";
    case StopReason::FTolWindow: return "f_tol";
    case StopReason::Budget: return "budget";
    case StopReason::CertificateViolation: return "certificate_violation";
  }
  return "unknown";
}

std::string TrajectoryRecord::to_csv() const {
  std::string out = "iter,f,grad_norm,proj,cert_residual\n";
  for (const auto& r : iterations) {
    out += std::to_string(r.iter);
    for (double v : {r.f, r.grad_norm, r.proj, r.cert_residual}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

namespace {

void require_span(const ManifoldPoint& x0, const DirectionLaw& law, std::uint64_t seed) {
  if (std::holds_alternative<HaarLaw>(law)) return;
  std::vector<ManifoldPoint> probes{x0};
  RngStream probe_rng(seed, ~std::uint64_t{0});
  for (int k = 0; k < 4; ++k) probes.push_back(random_point(x0.kind(), probe_rng));
  const SpanReport report = span_check(law, probes);
  if (!report.ok) {
    std::ostringstream msg;
    msg << "direction law fails the span condition: rank " << report.min_rank
        << " of " << report.required_rank << " after removal";
    throw LawError(msg.str());
  }
}

template <typename E>
[[noreturn]] void rethrow_at(const E& e, std::size_t iter) {
  std::ostringstream msg;
  msg << "iteration " << iter << ": " << e.what();
  throw E(msg.str());
}

}  // namespace

TrajectoryRecord rgd_run(const ManifoldPoint& x0, const CostFunction& cost,
                         const DirectionLaw& law, const RgdConfig& config, RngStream& rng) {
  if (config.window == 0) throw UsageError("window must be positive");
  if (!(config.grad_tol > 0.0)) throw UsageError("grad_tol must be positive");
  if (!(config.f_tol > 0.0)) throw UsageError("f_tol must be positive");
  const double eta = resolve_eta(config, cost);
  if (config.check_span) require_span(x0, law, config.seed);

  TrajectoryRecord rec;
  rec.eta = eta;
  ManifoldPoint x = x0;
  StepInput in = evaluate(x, cost);
  std::vector<double> history{in.f};
  const double near_tol = 10.0 * config.grad_tol;

  std::size_t i = 0;
  for (;; ++i) {
    if (in.grad_norm <= near_tol) {
      if (!rec.near_critical_runs.empty() &&
          rec.near_critical_runs.back().first + rec.near_critical_runs.back().second == i)
        ++rec.near_critical_runs.back().second;
      else
        rec.near_critical_runs.emplace_back(i, 1);
    }
    if (i >= config.max_iter) {
      rec.stop = StopReason::Budget;
      break;
    }
    if (in.grad_norm <= config.grad_tol) {
      rec.stop = StopReason::GradTol;
      break;
    }
    if (i >= config.window &&
        std::abs(history[i - config.window] - in.f) <= config.f_tol * (1.0 + std::abs(in.f))) {
      rec.stop = StopReason::FTolWindow;
      break;
    }

    StepResult step = [&] {
      try {
        return step_from(x, in, cost, law, eta, rng);
      } catch (const NumericError& e) {
        rethrow_at(e, i);
      } catch (const LawError& e) {
        rethrow_at(e, i);
      }
    }();
    const auto& d = step.diagnostics;
    if (config.record_stride > 0 && i % config.record_stride == 0)
      rec.iterations.push_back({i, d.f_before, d.grad_norm, d.proj, d.cert_residual, d.direction});
    rec.max_cert_residual = std::max(rec.max_cert_residual, d.cert_residual);
    rec.max_increase = std::max(rec.max_increase,
                                (d.f_after - d.f_before) - 1e-12 * (1.0 + std::abs(d.f_before)));
    for (double v : config.critical_values)
      if (d.f_before > v - 1e-12 && d.f_after < v - 1e-12) rec.passages.push_back({i + 1, v});

    x = std::move(step.x_next);
    if (d.cert_residual > config.certificate_slack) {
      ++rec.certificate_violations;
      rec.stop = StopReason::CertificateViolation;
      in = evaluate(x, cost);
      ++i;
      break;
    }
    in = evaluate(x, cost);
    if (!std::isfinite(in.f) || !std::isfinite(in.grad_norm)) {
      std::ostringstream msg;
      msg << "iteration " << i + 1 << ": cost or gradient is no longer finite";
      throw NumericError(msg.str());
    }
    history.push_back(in.f);
  }
  rec.iterations_used = i;
  rec.final_f = in.f;
  rec.final_grad_norm = in.grad_norm;
  rec.final_point = std::move(x);
  return rec;
}

TrajectoryRecord rgd_run(const ManifoldPoint& x0, const CostFunction& cost,
                         const DirectionLaw& law, const RgdConfig& config) {
  RngStream rng(config.seed, 0);
  return rgd_run(x0, cost, law, config, rng);
}

std::string to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::Minimum: return "minimum";
    case CriticalKind::StrictSaddle: return "strict_saddle";
    case CriticalKind::Degenerate: return "degenerate";
    case CriticalKind::NotCritical: return "not_critical";
  }
  return "unknown";
}

Classification classify_critical(const CostFunction& cost, const ManifoldPoint& x,
                                 double grad_tol, double fd_step) {
  Classification out;
  out.grad_norm = norm(x, cost.riemannian_grad(x));
  if (out.grad_norm > grad_tol) return out;

  const auto basis = tangent_basis(x);
  const std::size_t n = basis.size();
  const double f0 = cost.value(x);
  auto form = [&](const TangentVector& v) {
    if (auto h = cost.hessian_form(x, v)) return *h;
    const double fp = cost.value(exp_map(x, v * fd_step));
    const double fm = cost.value(exp_map(x, v * (-fd_step)));
    return (fp - 2.0 * f0 + fm) / (fd_step * fd_step);
  };
  linalg::ComplexMatrix hess(n);
  for (std::size_t k = 0; k < n; ++k) hess(k, k) = form(basis[k]);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) {
      const double h = (form(basis[k] + basis[l]) - form(basis[k] - basis[l])) / 4.0;
      hess(k, l) = h;
      hess(l, k) = h;
    }
  out.eigenvalues = linalg::hermitian_eig(HermitianMatrix::symmetrized(hess)).values;
  double op = 0.0;
  for (double l : out.eigenvalues) op = std::max(op, std::abs(l));
  out.lambda_tol = 1e-6 * op;
  if (op == 0.0) {
    out.kind = CriticalKind::Degenerate;
    return out;
  }
  bool negative = false, positive = false;
  for (double l : out.eigenvalues) {
    negative = negative || l < -out.lambda_tol;
    positive = positive || l > out.lambda_tol;
  }
  out.kind = negative ? CriticalKind::StrictSaddle
                      : (positive ? CriticalKind::Minimum : CriticalKind::Degenerate);
  return out;
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double EnsembleSummary::success_rate() const {
  return results.empty() ? 0.0
                         : static_cast<double>(successes) / static_cast<double>(results.size());
}

nlohmann::json EnsembleSummary::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results)
    rows.push_back({{"realization", r.realization},
                    {"initial_f", r.initial_f},
                    {"final_f", r.final_f},
                    {"final_grad_norm", r.final_grad_norm},
                    {"iterations", r.iterations},
                    {"stop", to_string(r.stop)},
                    {"classification", to_string(r.classification)},
                    {"saddle_passages", r.record.passages.size()},
                    {"success", r.success}});
  nlohmann::json j = {{"n_realizations", results.size()},
                      {"eta", eta},
                      {"successes", successes},
                      {"success_rate", success_rate()},
                      {"strict_saddle_endpoints", strict_saddle_endpoints},
                      {"certificate_violations", certificate_violations},
                      {"max_cert_residual", max_cert_residual},
                      {"max_increase", max_increase},
                      {"success_tol", success_tol},
                      {"realizations", std::move(rows)}};
  j["target"] = target ? nlohmann::json(*target) : nlohmann::json(nullptr);
  return j;
}

EnsembleSummary ensemble_run(const EnsembleProblem& problem, const DirectionLaw& law,
                             const RgdConfig& config, std::size_t n_realizations,
                             std::size_t threads) {
  if (n_realizations == 0) throw UsageError("ensemble_run: need at least one realization");
  if (!problem.cost || !problem.initial_point)
    throw UsageError("ensemble_run: problem needs a cost and an initial-point rule");
  const CostFunction& cost = *problem.cost;
  EnsembleSummary summary;
  summary.target = problem.target;
  summary.success_tol = problem.success_tol;
  summary.eta = resolve_eta(config, cost);
  summary.results.resize(n_realizations);

  parallel_for(n_realizations, threads, [&](std::size_t r) {
    RngStream rng(config.seed, r);
    const ManifoldPoint x0 = problem.initial_point(r, rng);
    RealizationResult res;
    res.realization = r;
    res.initial_f = cost.value(x0);
    res.record = rgd_run(x0, cost, law, config, rng);
    res.final_f = res.record.final_f;
    res.final_grad_norm = res.record.final_grad_norm;
    res.iterations = res.record.iterations_used;
    res.stop = res.record.stop;
    res.classification =
        classify_critical(cost, *res.record.final_point, 10.0 * config.grad_tol).kind;
    res.success = problem.target && std::abs(res.final_f - *problem.target) <= problem.success_tol;
    summary.results[r] = std::move(res);
  });

  for (const auto& r : summary.results) {
    summary.successes += r.success ? 1 : 0;
    summary.strict_saddle_endpoints += r.classification == CriticalKind::StrictSaddle ? 1 : 0;
    summary.certificate_violations += r.record.certificate_violations;
    summary.max_cert_residual = std::max(summary.max_cert_residual, r.record.max_cert_residual);
    summary.max_increase = std::max(summary.max_increase, r.record.max_increase);
  }
  return summary;
}

}  // namespace mangrad
