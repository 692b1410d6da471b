#include "mangrad/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mangrad/errors.hpp"
#include "mangrad/manifold.hpp"

namespace mangrad::stats {

double tanh_sinh_unit(const std::function<double(double, double)>& f) {
  constexpr double h = 1.0 / 64.0;
  constexpr int k_max = 6 * 64;
  double sum = 0.0;
  for (int k = -k_max; k <= k_max; ++k) {
    const double t = k * h;
    const double s = std::numbers::pi * std::sinh(t);
    const double x = 1.0 / (1.0 + std::exp(-s));
    const double y = 1.0 / (1.0 + std::exp(s));
    if (x == 0.0 || y == 0.0) continue;
    sum += f(x, y) * std::numbers::pi * std::cosh(t) * x * y;
  }
  return sum * h;
}

BetaLaw::BetaLaw(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw UsageError("BetaLaw: parameters must be positive and finite");
  log_norm_ = std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
  const double mass = tanh_sinh_unit([this](double x, double y) {
    return std::exp((alpha_ - 1.0) * std::log(x) + (beta_ - 1.0) * std::log(y) - log_norm_);
  });
  mass_error_ = std::abs(mass - 1.0);
  if (!(mass_error_ <= 1e-8)) {
    std::ostringstream msg;
    msg << "BetaLaw(" << alpha << ", " << beta << "): pdf integrates to " << mass;
    throw NumericError(msg.str());
  }
}

double BetaLaw::pdf(double x) const {
  if (x < 0.0 || x > 1.0) return 0.0;
  return std::exp((alpha_ - 1.0) * std::log(x) + (beta_ - 1.0) * std::log1p(-x) - log_norm_);
}

double BetaLaw::variance() const {
  const double s = alpha_ + beta_;
  return alpha_ * beta_ / (s * s * (s + 1.0));
}

namespace {

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 1000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw NumericError("beta_cdf: continued fraction did not converge");
}

}  // namespace

double beta_cdf(const BetaLaw& law, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw UsageError("beta_cdf: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double a = law.alpha(), b = law.beta();
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

namespace {

double symmetric_beta_cdf(const BetaLaw& law, double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // Evaluate the lower tail directly on both sides for symmetric accuracy.
  if (x <= 0.0) return beta_cdf(law, (1.0 + x) / 2.0);
  return 1.0 - beta_cdf(law, (1.0 - x) / 2.0);
}

BetaLaw u_last_law(std::size_t n) {
  if (n < 2) throw UsageError("u_last_cdf: N must be >= 2");
  const double p = 0.5 * static_cast<double>(n - 1);
  return BetaLaw(p, p);
}

}  // namespace

double u_last_cdf(std::size_t n, double x) { return symmetric_beta_cdf(u_last_law(n), x); }

double erf(double x) { return std::erf(x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double chi2_1_cdf(double x) { return x <= 0.0 ? 0.0 : std::erf(std::sqrt(x / 2.0)); }

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw UsageError("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_slack(std::size_t samples) { return 1.36 / std::sqrt(static_cast<double>(samples)); }

std::vector<double> haar_last_components(std::size_t n, std::size_t samples, RngStream& rng) {
  if (n < 2) throw UsageError("haar_last_components: N must be >= 2");
  const auto origin = ManifoldPoint::euclidean(RealVector(n, 0.0));
  std::vector<double> out;
  out.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) out.push_back(haar_unit_tangent(origin, rng).vec().back());
  return out;
}

nlohmann::json KsReport::to_json() const {
  return {{"statistic", statistic}, {"bound", bound}, {"slack", slack}, {"pass", pass}};
}

nlohmann::json KsBoundReport::to_json() const {
  return {{"N", n},
          {"samples", samples},
          {"normal", normal.to_json()},
          {"chi2", chi2.to_json()},
          {"exact", exact.to_json()},
          {"pass", pass()}};
}

namespace {

KsReport ks_report(double statistic, double bound, std::size_t samples) {
  KsReport r;
  r.statistic = statistic;
  r.bound = bound;
  r.slack = ks_slack(samples);
  r.pass = statistic <= bound + r.slack;
  return r;
}

}  // namespace

KsBoundReport ks_bound_check(std::size_t n, std::size_t samples, RngStream& rng) {
  if (n < 5) throw UsageError("ks_bound_check: the Kolmogorov bounds need N >= 5");
  if (samples == 0) throw UsageError("ks_bound_check: samples must be positive");
  const auto u = haar_last_components(n, samples, rng);
  const double dn = static_cast<double>(n);
  std::vector<double> scaled, squared;
  for (double v : u) {
    scaled.push_back(std::sqrt(dn) * v);
    squared.push_back(dn * v * v);
  }
  KsBoundReport report;
  report.n = n;
  report.samples = samples;
  report.normal = ks_report(ks_statistic(scaled, normal_cdf), 1.0 / dn, samples);
  report.chi2 = ks_report(ks_statistic(squared, chi2_1_cdf), 2.0 / dn, samples);
  report.exact =
      ks_report(ks_statistic(u, [law = u_last_law(n)](double x) {
                  return symmetric_beta_cdf(law, x);
                }),
                0.0, samples);
  return report;
}

nlohmann::json TailReport::to_json() const {
  return {{"N", n},       {"k", k},         {"samples", samples},
          {"frequency", frequency}, {"bound", bound}, {"standard_error", standard_error},
          {"pass", pass}};
}

TailReport tail_bound_check(std::size_t n, double k, std::size_t samples, RngStream& rng) {
  if (n < 2) throw UsageError("tail_bound_check: N must be >= 2");
  if (!(k > 0.0)) throw UsageError("tail_bound_check: k must be positive");
  if (samples == 0) throw UsageError("tail_bound_check: samples must be positive");
  const double dn = static_cast<double>(n);
  const double threshold = 1.0 / (k * k * dn);
  std::size_t hits = 0;
  for (double v : haar_last_components(n, samples, rng)) hits += v * v >= threshold ? 1 : 0;
  TailReport r;
  r.n = n;
  r.k = k;
  r.samples = samples;
  r.frequency = static_cast<double>(hits) / static_cast<double>(samples);
  r.bound = 2.0 * (1.0 - normal_cdf(1.0 / k) - 1.0 / dn);
  r.standard_error = std::sqrt(r.frequency * (1.0 - r.frequency) / static_cast<double>(samples));
  r.pass = r.frequency >= r.bound - 3.0 * r.standard_error;
  return r;
}

nlohmann::json MomentReport::to_json() const {
  return {{"N", n},
          {"samples", samples},
          {"mean", mean},
          {"expected_mean", expected_mean},
          {"mean_se", mean_se},
          {"variance", variance},
          {"expected_variance", expected_variance},
          {"variance_se", variance_se},
          {"pass", pass}};
}

MomentReport moment_check(std::size_t n, std::size_t samples, RngStream& rng) {
  if (samples < 2) throw UsageError("moment_check: need at least 2 samples");
  std::vector<double> sq;
  sq.reserve(samples);
  for (double v : haar_last_components(n, samples, rng)) sq.push_back(v * v);
  const double m = static_cast<double>(samples);
  double mean = 0.0;
  for (double v : sq) mean += v;
  mean /= m;
  double m2 = 0.0, m4 = 0.0;
  for (double v : sq) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double var = m2 / (m - 1.0);
  m4 /= m;
  const double dn = static_cast<double>(n);
  MomentReport r;
  r.n = n;
  r.samples = samples;
  r.mean = mean;
  r.expected_mean = 1.0 / dn;
  r.mean_se = std::sqrt(var / m);
  r.variance = var;
  r.expected_variance = 2.0 * (dn - 1.0) / (dn * dn * (dn + 2.0));
  r.variance_se = std::sqrt(std::max(0.0, m4 - var * var) / m);
  r.pass = std::abs(r.mean - r.expected_mean) <= 3.0 * r.mean_se &&
           std::abs(r.variance - r.expected_variance) <= 3.0 * r.variance_se;
  return r;
}

}  // namespace mangrad::stats
