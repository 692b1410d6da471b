#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <json.hpp>

#include "mangrad/rng.hpp"

namespace mangrad::stats {

/// Beta(alpha, beta). Construction integrates the pdf by tanh-sinh
/// quadrature and throws NumericError if the mass is off by more than 1e-8.
class BetaLaw {
 public:
  BetaLaw(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double pdf(double x) const;
  double mean() const { return alpha_ / (alpha_ + beta_); }
  double variance() const;
  /// |integral of pdf - 1| found at construction.
  double mass_error() const { return mass_error_; }

 private:
  double alpha_;
  double beta_;
  double log_norm_;
  double mass_error_ = 0.0;
};

/// Integral of f over (0, 1) by the tanh-sinh rule; f receives x and 1 - x
/// separately so endpoint singularities keep full precision.
double tanh_sinh_unit(const std::function<double(double, double)>& f);

/// Regularized incomplete beta I_x(alpha, beta). UsageError outside [0, 1].
double beta_cdf(const BetaLaw& law, double x);

/// CDF of the last coordinate of a Haar unit vector in R^N (N >= 2).
double u_last_cdf(std::size_t n, double x);

double erf(double x);
double normal_cdf(double x);
double chi2_1_cdf(double x);

/// sup_x |F_n(x) - F(x)| for the empirical law of `samples` (copied, sorted).
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// 95% one-sample KS null quantile, 1.36 / sqrt(samples).
double ks_slack(std::size_t samples);

/// `samples` draws of the last coordinate of a Haar unit vector in R^N.
std::vector<double> haar_last_components(std::size_t n, std::size_t samples, RngStream& rng);

struct KsReport {
  double statistic = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool pass = false;
  nlohmann::json to_json() const;
};

struct KsBoundReport {
  std::size_t n = 0;
  std::size_t samples = 0;
  KsReport normal;  // sqrt(N) u_N against Phi, bound 1/N
  KsReport chi2;    // N u_N^2 against chi^2_1, bound 2/N
  KsReport exact;   // u_N against u_last_cdf, bound 0
  bool pass() const { return normal.pass && chi2.pass && exact.pass; }
  nlohmann::json to_json() const;
};

/// UsageError unless N >= 5.
KsBoundReport ks_bound_check(std::size_t n, std::size_t samples, RngStream& rng);

struct TailReport {
  std::size_t n = 0;
  double k = 0.0;
  std::size_t samples = 0;
  double frequency = 0.0;
  double bound = 0.0;
  double standard_error = 0.0;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Empirical Pr(u_N^2 >= 1/(k^2 N)) against 2(1 - Phi(1/k) - 1/N); passes
/// if the frequency is at least bound - 3 SE.
TailReport tail_bound_check(std::size_t n, double k, std::size_t samples, RngStream& rng);

struct MomentReport {
  std::size_t n = 0;
  std::size_t samples = 0;
  double mean = 0.0;
  double expected_mean = 0.0;
  double mean_se = 0.0;
  double variance = 0.0;
  double expected_variance = 0.0;
  double variance_se = 0.0;
  bool pass = false;  // both within 3 SE
  nlohmann::json to_json() const;
};

/// Mean and variance of u_N^2 against 1/N and 2(N-1)/(N^2 (N+2)).
MomentReport moment_check(std::size_t n, std::size_t samples, RngStream& rng);

}  // namespace mangrad::stats
