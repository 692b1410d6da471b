#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "mangrad/rng.hpp"

namespace mangrad::saddle {

/// Angle process of the quadratic saddle model with a, b > 0.
struct AngleProcessParams {
  double a = 1.0;
  double b = 1.0;
  double eta = 0.01;
  double phi0 = 0.0;
  std::size_t n_steps = 1000;

  /// UsageError unless a, b, eta > 0, eta <= 1/(2 max(a, b)) and |phi0| <= pi/4.
  void validate() const;
};

/// eta (a+b)/2 sin(2 phi): mean increment per step.
double angle_drift(double phi, const AngleProcessParams& p);
/// eta sqrt((a cos phi)^2 + (b sin phi)^2): scale of the u_2 noise.
double angle_noise_scale(double phi, const AngleProcessParams& p);

/// phi + drift + u_2 * noise_scale, u_2 = sin of a uniform angle.
double angle_step(double phi, const AngleProcessParams& p, RngStream& rng);

struct HittingSample {
  double tau = 0.0;  // physical time; t_max when censored
  bool censored = false;
};

/// First step with |phi| >= threshold, as physical time steps * eta;
/// censored after n_steps.
HittingSample simulate_angle_hitting(const AngleProcessParams& p, RngStream& rng,
                                     double threshold = std::numbers::pi / 4.0);

/// Diffusion coefficient of the angle SDE.
/// AsPrinted: sqrt(eta ((a cos)^2 + (b sin)^2)) / 2.
/// VarianceMatched: sqrt(eta ((a cos)^2 + (b sin)^2) / 2), matching the
///   discrete increment variance per unit time.
/// Off: 0 (the eta -> 0 ODE).
enum class DiffusionConvention { AsPrinted, VarianceMatched, Off };

double sde_drift(double phi, const AngleProcessParams& p);
double sde_diffusion(double phi, const AngleProcessParams& p, DiffusionConvention conv);

/// Euler-Maruyama path phi_0, phi_dt, ..., up to t_max (inclusive grid).
std::vector<double> euler_maruyama_angle_path(const AngleProcessParams& p, double dt,
                                              double t_max, DiffusionConvention conv,
                                              RngStream& rng);

/// Euler-Maruyama hitting time of |phi| >= threshold, censored at t_max.
HittingSample euler_maruyama_angle_hitting(const AngleProcessParams& p, double dt, double t_max,
                                           DiffusionConvention conv, RngStream& rng,
                                           double threshold = std::numbers::pi / 4.0);

/// dX = kappa X dt + sigma dW from X_0 = 0, threshold |X| >= c.
struct OuParams {
  double kappa = 2.0;
  double sigma = 3.0;
  double c = 10.0;
  double dt = 0.001;
  double t_max = 5.0;

  /// UsageError unless kappa > 0, sigma >= 0, c >= 0, 0 < dt <= t_max.
  void validate() const;
};

/// sigma sqrt((e^{2 kappa t} - 1) / (2 kappa))
double ou_sigma_tilde(double t, double kappa, double sigma);

/// 1 + erf(-c / (sigma_tilde(t) sqrt 2)); 0 for t <= 0.
double ou_hitting_lower_cdf(double t, const OuParams& p);

HittingSample simulate_ou_hitting(const OuParams& p, RngStream& rng);

/// -ln(tan c) / 2 for 0 < c <= pi/4, else UsageError.
double deterministic_tail_time(double c);

/// Linearization of the angle SDE at the saddle: kappa = a + b and sigma the
/// diffusion coefficient at phi = 0.
struct Linearization {
  double kappa = 0.0;
  double sigma = 0.0;
};
Linearization linearize_at_saddle(const AngleProcessParams& p, DiffusionConvention conv);

/// t -> ou_hitting_lower_cdf(t - tail_time) with tail_time = deterministic_tail_time(c).
class CombinedApproximation {
 public:
  CombinedApproximation(double c, double kappa, double sigma);

  double c() const { return c_; }
  double tail_time() const { return tail_time_; }
  double cdf(double t) const;

 private:
  double c_;
  double tail_time_;
  OuParams ou_;
};

/// Defective empirical c.d.f.: F(t) = #{uncensored tau <= t} / total, so
/// F(horizon) = 1 - censored fraction.
class Ecdf {
 public:
  /// UsageError if `samples` is empty.
  explicit Ecdf(const std::vector<HittingSample>& samples,
                double horizon = std::numeric_limits<double>::infinity());
  explicit Ecdf(std::vector<double> values);

  double operator()(double t) const;
  /// Value just below t.
  double left_limit(double t) const;
  const std::vector<double>& sorted() const { return sorted_; }
  std::size_t total() const { return total_; }
  double censored_fraction() const;
  double horizon() const { return horizon_; }

 private:
  std::vector<double> sorted_;
  std::size_t total_ = 0;
  double horizon_ = std::numeric_limits<double>::infinity();
};

/// sup |F1 - F2| over the merged jump points.
double ks_distance(const Ecdf& a, const Ecdf& b);
/// sup over t in [0, horizon] of |F(t) - F_n(t)| for a continuous c.d.f. F.
double ks_distance(const std::function<double(double)>& cdf, const Ecdf& e);

/// Realization r draws from RngStream(seed, stream_offset + r).
std::vector<HittingSample> angle_hitting_ensemble(const AngleProcessParams& p, std::size_t n,
                                                  std::uint64_t seed, std::uint64_t stream_offset,
                                                  std::size_t threads = 0);
std::vector<HittingSample> sde_hitting_ensemble(const AngleProcessParams& p, double dt,
                                                double t_max, DiffusionConvention conv,
                                                std::size_t n, std::uint64_t seed,
                                                std::uint64_t stream_offset,
                                                std::size_t threads = 0);
std::vector<HittingSample> ou_hitting_ensemble(const OuParams& p, std::size_t n,
                                               std::uint64_t seed, std::uint64_t stream_offset,
                                               std::size_t threads = 0);

}  // namespace mangrad::saddle
