#include "mangrad/saddlelab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mangrad/errors.hpp"
#include "mangrad/rgd.hpp"

namespace mangrad::saddle {

void AngleProcessParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0)) throw UsageError("angle process: a and b must be positive");
  if (!(eta > 0.0)) throw UsageError("angle process: eta must be positive");
  if (eta > 1.0 / (2.0 * std::max(a, b))) {
    std::ostringstream msg;
    msg << "angle process: eta = " << eta << " exceeds 1/(2 max(a, b)) = "
        << 1.0 / (2.0 * std::max(a, b));
    throw UsageError(msg.str());
  }
  if (!(std::abs(phi0) <= std::numbers::pi / 4.0))
    throw UsageError("angle process: phi0 must lie in [-pi/4, pi/4]");
}

double angle_drift(double phi, const AngleProcessParams& p) {
  return p.eta * 0.5 * (p.a + p.b) * std::sin(2.0 * phi);
}

double angle_noise_scale(double phi, const AngleProcessParams& p) {
  return p.eta * std::hypot(p.a * std::cos(phi), p.b * std::sin(phi));
}

double angle_step(double phi, const AngleProcessParams& p, RngStream& rng) {
  const double u2 = std::sin(2.0 * std::numbers::pi * rng.uniform());
  return phi + angle_drift(phi, p) + u2 * angle_noise_scale(phi, p);
}

HittingSample simulate_angle_hitting(const AngleProcessParams& p, RngStream& rng,
                                     double threshold) {
  double phi = p.phi0;
  if (std::abs(phi) >= threshold) return {0.0, false};
  for (std::size_t k = 1; k <= p.n_steps; ++k) {
    phi = angle_step(phi, p, rng);
    if (std::abs(phi) >= threshold) return {static_cast<double>(k) * p.eta, false};
  }
  return {static_cast<double>(p.n_steps) * p.eta, true};
}

double sde_drift(double phi, const AngleProcessParams& p) {
  return 0.5 * (p.a + p.b) * std::sin(2.0 * phi);
}

double sde_diffusion(double phi, const AngleProcessParams& p, DiffusionConvention conv) {
  const double s = p.a * p.a * std::cos(phi) * std::cos(phi) +
                   p.b * p.b * std::sin(phi) * std::sin(phi);
  switch (conv) {
    case DiffusionConvention::AsPrinted: return std::sqrt(p.eta * s) / 2.0;
    case DiffusionConvention::VarianceMatched: return std::sqrt(p.eta * s / 2.0);
    case DiffusionConvention::Off: return 0.0;
  }
  return 0.0;
}

namespace {

std::size_t step_count(double dt, double t_max) {
  if (!(dt > 0.0) || !(t_max >= dt)) throw UsageError("need 0 < dt <= t_max");
  return static_cast<std::size_t>(std::llround(t_max / dt));
}

}  // namespace

std::vector<double> euler_maruyama_angle_path(const AngleProcessParams& p, double dt,
                                              double t_max, DiffusionConvention conv,
                                              RngStream& rng) {
  const std::size_t steps = step_count(dt, t_max);
  const double sqrt_dt = std::sqrt(dt);
  std::vector<double> path{p.phi0};
  path.reserve(steps + 1);
  double phi = p.phi0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double noise = conv == DiffusionConvention::Off ? 0.0 : rng.normal();
    phi += sde_drift(phi, p) * dt + sde_diffusion(phi, p, conv) * sqrt_dt * noise;
    path.push_back(phi);
  }
  return path;
}

HittingSample euler_maruyama_angle_hitting(const AngleProcessParams& p, double dt, double t_max,
                                           DiffusionConvention conv, RngStream& rng,
                                           double threshold) {
  const std::size_t steps = step_count(dt, t_max);
  double phi = p.phi0;
  if (std::abs(phi) >= threshold) return {0.0, false};
  const double sqrt_dt = std::sqrt(dt);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double noise = conv == DiffusionConvention::Off ? 0.0 : rng.normal();
    phi += sde_drift(phi, p) * dt + sde_diffusion(phi, p, conv) * sqrt_dt * noise;
    if (std::abs(phi) >= threshold) return {static_cast<double>(k) * dt, false};
  }
  return {static_cast<double>(steps) * dt, true};
}

void OuParams::validate() const {
  if (!(kappa > 0.0)) throw UsageError("ou: kappa must be positive");
  if (!(sigma >= 0.0)) throw UsageError("ou: sigma must be non-negative");
  if (!(c >= 0.0)) throw UsageError("ou: c must be non-negative");
  if (!(dt > 0.0) || !(dt <= t_max)) throw UsageError("ou: need 0 < dt <= t_max");
}

double ou_sigma_tilde(double t, double kappa, double sigma) {
  if (t <= 0.0) return 0.0;
  return sigma * std::sqrt(std::expm1(2.0 * kappa * t) / (2.0 * kappa));
}

double ou_hitting_lower_cdf(double t, const OuParams& p) {
  if (t <= 0.0) return 0.0;
  const double st = ou_sigma_tilde(t, p.kappa, p.sigma);
  if (st == 0.0) return p.c > 0.0 ? 0.0 : 1.0;
  // 1 + erf(-x) = erfc(x)
  return std::erfc(p.c / (st * std::numbers::sqrt2));
}

HittingSample simulate_ou_hitting(const OuParams& p, RngStream& rng) {
  p.validate();
  if (p.c == 0.0) return {0.0, false};
  const std::size_t steps = step_count(p.dt, p.t_max);
  const double sqrt_dt = std::sqrt(p.dt);
  double x = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    x += p.kappa * x * p.dt + p.sigma * sqrt_dt * rng.normal();
    if (std::abs(x) >= p.c) return {static_cast<double>(k) * p.dt, false};
  }
  return {static_cast<double>(steps) * p.dt, true};
}

double deterministic_tail_time(double c) {
  if (!(c > 0.0 && c <= std::numbers::pi / 4.0))
    throw UsageError("deterministic_tail_time: c must lie in (0, pi/4]");
  return -0.5 * std::log(std::tan(c));
}

Linearization linearize_at_saddle(const AngleProcessParams& p, DiffusionConvention conv) {
  return {p.a + p.b, sde_diffusion(0.0, p, conv)};
}

CombinedApproximation::CombinedApproximation(double c, double kappa, double sigma)
    : c_(c), tail_time_(deterministic_tail_time(c)) {
  ou_.kappa = kappa;
  ou_.sigma = sigma;
  ou_.c = c;
  if (!(kappa > 0.0) || !(sigma >= 0.0))
    throw UsageError("combined approximation: need kappa > 0 and sigma >= 0");
}

double CombinedApproximation::cdf(double t) const {
  if (t <= tail_time_) return 0.0;
  return ou_hitting_lower_cdf(t - tail_time_, ou_);
}

Ecdf::Ecdf(const std::vector<HittingSample>& samples, double horizon)
    : total_(samples.size()), horizon_(horizon) {
  if (samples.empty()) throw UsageError("Ecdf: no samples");
  for (const auto& s : samples)
    if (!s.censored) sorted_.push_back(s.tau);
  std::sort(sorted_.begin(), sorted_.end());
}

Ecdf::Ecdf(std::vector<double> values) : sorted_(std::move(values)), total_(sorted_.size()) {
  if (sorted_.empty()) throw UsageError("Ecdf: no samples");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double t) const {
  const auto k = std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin();
  return static_cast<double>(k) / static_cast<double>(total_);
}

double Ecdf::left_limit(double t) const {
  const auto k = std::lower_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin();
  return static_cast<double>(k) / static_cast<double>(total_);
}

double Ecdf::censored_fraction() const {
  return 1.0 - static_cast<double>(sorted_.size()) / static_cast<double>(total_);
}

double ks_distance(const Ecdf& a, const Ecdf& b) {
  double d = 0.0;
  for (const auto* e : {&a, &b})
    for (double t : e->sorted()) d = std::max(d, std::abs(a(t) - b(t)));
  return d;
}

double ks_distance(const std::function<double(double)>& cdf, const Ecdf& e) {
  double d = 0.0;
  for (double t : e.sorted()) {
    const double f = cdf(t);
    d = std::max({d, std::abs(f - e(t)), std::abs(f - e.left_limit(t))});
  }
  if (std::isfinite(e.horizon())) d = std::max(d, std::abs(cdf(e.horizon()) - e(e.horizon())));
  return d;
}

namespace {

template <typename Draw>
std::vector<HittingSample> ensemble(std::size_t n, std::uint64_t seed, std::uint64_t offset,
                                    std::size_t threads, Draw draw) {
  std::vector<HittingSample> out(n);
  parallel_for(n, threads, [&](std::size_t r) {
    RngStream rng(seed, offset + r);
    out[r] = draw(rng);
  });
  return out;
}

}  // namespace

std::vector<HittingSample> angle_hitting_ensemble(const AngleProcessParams& p, std::size_t n,
                                                  std::uint64_t seed, std::uint64_t stream_offset,
                                                  std::size_t threads) {
  p.validate();
  return ensemble(n, seed, stream_offset, threads,
                  [&](RngStream& rng) { return simulate_angle_hitting(p, rng); });
}

std::vector<HittingSample> sde_hitting_ensemble(const AngleProcessParams& p, double dt,
                                                double t_max, DiffusionConvention conv,
                                                std::size_t n, std::uint64_t seed,
                                                std::uint64_t stream_offset, std::size_t threads) {
  p.validate();
  step_count(dt, t_max);
  return ensemble(n, seed, stream_offset, threads, [&](RngStream& rng) {
    return euler_maruyama_angle_hitting(p, dt, t_max, conv, rng);
  });
}

std::vector<HittingSample> ou_hitting_ensemble(const OuParams& p, std::size_t n,
                                               std::uint64_t seed, std::uint64_t stream_offset,
                                               std::size_t threads) {
  p.validate();
  return ensemble(n, seed, stream_offset, threads,
                  [&](RngStream& rng) { return simulate_ou_hitting(p, rng); });
}

}  // namespace mangrad::saddle
