#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mangrad/cost.hpp"
#include "mangrad/errors.hpp"
#include "mangrad/rgd.hpp"
#include "mangrad/saddlelab.hpp"

using namespace mangrad;
using namespace mangrad::saddle;

namespace {

constexpr double kQuarter = std::numbers::pi / 4.0;

}  // namespace

TEST(Saddle, Validation) {
  AngleProcessParams p;
  EXPECT_NO_THROW(p.validate());
  p.eta = 0.6;
  EXPECT_THROW(p.validate(), UsageError);
  p = {};
  p.phi0 = 1.0;
  EXPECT_THROW(p.validate(), UsageError);
  OuParams o;
  o.dt = 0.0;
  EXPECT_THROW(o.validate(), UsageError);
}

TEST(Saddle, DriftValues) {
  AngleProcessParams p;
  EXPECT_EQ(angle_drift(0.0, p), 0.0);
  EXPECT_NEAR(angle_drift(kQuarter, p), p.eta, 1e-17);
  EXPECT_NEAR(angle_noise_scale(0.0, p), p.eta * p.a, 1e-17);
  RngStream rng(1, 0);
  for (int k = 0; k < 1000; ++k) EXPECT_LE(std::abs(angle_step(0.0, p, rng)), p.eta * p.a + 1e-18);
}

TEST(Saddle, MeanIncrement) {
  AngleProcessParams p;
  RngStream rng(2, 0);
  for (double phi : {0.1, 0.5, kQuarter}) {
    const int n = 200000;
    double s = 0.0, q = 0.0;
    for (int k = 0; k < n; ++k) {
      const double d = angle_step(phi, p, rng) - phi;
      s += d;
      q += d * d;
    }
    const double mean = s / n;
    const double se = std::sqrt((q / n - mean * mean) / n);
    EXPECT_LE(std::abs(mean - p.eta * std::sin(2.0 * phi)), 3.0 * se) << "phi = " << phi;
  }
}

TEST(Saddle, HittingNearThreshold) {
  AngleProcessParams p;
  p.phi0 = kQuarter - 1e-6;
  RngStream rng(3, 0);
  for (int k = 0; k < 50; ++k) {
    const auto h = simulate_angle_hitting(p, rng);
    EXPECT_FALSE(h.censored);
    EXPECT_LE(h.tau, 5.0 * p.eta);
  }
}

TEST(Saddle, StartOnThresholdHitsAtZero) {
  AngleProcessParams p;
  p.phi0 = kQuarter;
  RngStream rng(4, 0);
  EXPECT_EQ(simulate_angle_hitting(p, rng).tau, 0.0);
  EXPECT_EQ(euler_maruyama_angle_hitting(p, 0.001, 10.0, DiffusionConvention::AsPrinted, rng).tau, 0.0);
}

TEST(Saddle, NoiseFreePathFollowsOde) {
  AngleProcessParams p;
  p.phi0 = 0.1;
  RngStream rng(5, 0);
  for (double dt : {0.002, 0.001}) {
    const auto path = euler_maruyama_angle_path(p, dt, 1.0, DiffusionConvention::Off, rng);
    ASSERT_EQ(path.size(), static_cast<std::size_t>(std::lround(1.0 / dt)) + 1);
    double worst = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
      const double t = static_cast<double>(k) * dt;
      worst = std::max(worst, std::abs(path[k] - std::atan(std::exp(2.0 * t) * std::tan(p.phi0))));
    }
    EXPECT_LE(worst, 2.0 * dt);
  }
}

TEST(Saddle, DiffusionConventions) {
  AngleProcessParams p;
  EXPECT_NEAR(sde_diffusion(0.0, p, DiffusionConvention::AsPrinted), std::sqrt(p.eta) / 2.0, 1e-16);
  EXPECT_NEAR(sde_diffusion(0.0, p, DiffusionConvention::VarianceMatched), std::sqrt(p.eta / 2.0), 1e-16);
  EXPECT_EQ(sde_diffusion(0.3, p, DiffusionConvention::Off), 0.0);
  const auto lin = linearize_at_saddle(p, DiffusionConvention::AsPrinted);
  EXPECT_DOUBLE_EQ(lin.kappa, 2.0);
  EXPECT_NEAR(lin.sigma, std::sqrt(0.01) / 2.0, 1e-16);
}

TEST(Saddle, SigmaTilde) {
  EXPECT_EQ(ou_sigma_tilde(0.0, 2.0, 3.0), 0.0);
  EXPECT_NEAR(ou_sigma_tilde(1.0, 2.0, 3.0), 3.0 * std::sqrt((std::exp(4.0) - 1.0) / 4.0), 1e-13);
  EXPECT_NEAR(ou_sigma_tilde(1.0, 2.0, 3.0), 10.98, 0.01);
  for (double t : {1e-5, 1e-3, 0.005})
    EXPECT_LE(std::abs(ou_sigma_tilde(t, 2.0, 3.0) / (3.0 * std::sqrt(t)) - 1.0), 0.01);
}

TEST(Saddle, LowerCdf) {
  OuParams p;
  EXPECT_EQ(ou_hitting_lower_cdf(0.0, p), 0.0);
  EXPECT_GT(ou_hitting_lower_cdf(50.0, p), 1.0 - 1e-12);
  EXPECT_LE(ou_hitting_lower_cdf(50.0, p), 1.0);
  // Choose c so that c / sigma_tilde(1) = 1.
  p.c = ou_sigma_tilde(1.0, p.kappa, p.sigma);
  EXPECT_NEAR(ou_hitting_lower_cdf(1.0, p), 0.31731050786291415, 1e-12);
}

TEST(Saddle, OuDegenerateCases) {
  RngStream rng(6, 0);
  OuParams p;
  p.c = 0.0;
  EXPECT_EQ(simulate_ou_hitting(p, rng).tau, 0.0);
  p = {};
  p.sigma = 0.0;
  const auto h = simulate_ou_hitting(p, rng);
  EXPECT_TRUE(h.censored);
}

TEST(Saddle, TailTime) {
  EXPECT_NEAR(deterministic_tail_time(kQuarter), 0.0, 1e-15);
  EXPECT_NEAR(deterministic_tail_time(0.1), 1.149, 1e-3);
  for (double c : {0.01, 0.05, 0.1, 0.5})
    EXPECT_NEAR(std::atan(std::exp(2.0 * deterministic_tail_time(c)) * std::tan(c)), kQuarter, 1e-12);
  EXPECT_THROW(deterministic_tail_time(0.0), UsageError);
}

TEST(Saddle, CombinedApproximation) {
  const CombinedApproximation a(0.05, 2.0, std::sqrt(0.01) / 2.0);
  EXPECT_EQ(a.cdf(0.5 * a.tail_time()), 0.0);
  EXPECT_EQ(a.cdf(a.tail_time()), 0.0);
  // Smaller eta (smaller sigma) shifts the c.d.f. right.
  const CombinedApproximation slow(0.05, 2.0, std::sqrt(0.001) / 2.0);
  for (double t : {2.0, 3.0, 4.0}) EXPECT_LT(slow.cdf(t), a.cdf(t));
}

TEST(Saddle, EcdfAndKs) {
  std::vector<HittingSample> s{{1.0, false}, {2.0, false}, {10.0, true}, {3.0, false}};
  const Ecdf e(s, 10.0);
  EXPECT_DOUBLE_EQ(e(2.5), 0.5);
  EXPECT_DOUBLE_EQ(e(10.0), 0.75);
  EXPECT_DOUBLE_EQ(e.left_limit(2.0), 0.25);
  EXPECT_DOUBLE_EQ(e.censored_fraction(), 0.25);

  const Ecdf a(std::vector<double>{0.1, 0.2, 0.3}), b(std::vector<double>{0.1, 0.2, 0.3});
  EXPECT_EQ(ks_distance(a, b), 0.0);
  const Ecdf c(std::vector<double>{5.0, 6.0});
  EXPECT_EQ(ks_distance(a, c), 1.0);

  RngStream r1(7, 0), r2(7, 1);
  std::vector<double> x, y;
  for (int k = 0; k < 10000; ++k) {
    x.push_back(r1.normal());
    y.push_back(r2.normal());
  }
  EXPECT_LE(ks_distance(Ecdf(x), Ecdf(y)), 0.03);
  EXPECT_THROW(Ecdf(std::vector<HittingSample>{}), UsageError);
}

TEST(Saddle, AnalyticKsAgainstEcdf) {
  // Uniform samples on a grid against the uniform c.d.f.: distance 1/n.
  std::vector<double> v;
  for (int k = 1; k <= 100; ++k) v.push_back(k / 100.0);
  EXPECT_NEAR(ks_distance([](double t) { return std::clamp(t, 0.0, 1.0); }, Ecdf(v)), 0.01, 1e-12);
}

TEST(Saddle, EnsemblesAreThreadIndependent) {
  AngleProcessParams p;
  const auto a = angle_hitting_ensemble(p, 40, 9, 0, 1);
  const auto b = angle_hitting_ensemble(p, 40, 9, 0, 3);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].tau, b[k].tau);
  OuParams o;
  const auto c = ou_hitting_ensemble(o, 20, 9, 0, 1);
  const auto d = ou_hitting_ensemble(o, 20, 9, 0, 4);
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_EQ(c[k].tau, d[k].tau);
}

TEST(Saddle, EulerMaruyamaWeakOrder) {
  // Halving dt moves the OU hitting-time ECDF by no more than sampling noise.
  OuParams p;
  p.dt = 0.002;
  const auto coarse = ou_hitting_ensemble(p, 4000, 11, 0);
  p.dt = 0.001;
  const auto fine = ou_hitting_ensemble(p, 4000, 11, 100000);
  const double d = ks_distance(Ecdf(coarse, p.t_max), Ecdf(fine, p.t_max));
  EXPECT_LE(d, 1.36 * std::sqrt(2.0 / 4000.0) + 0.01);
}

TEST(Saddle, AngleIsScaleInvariantUnderRgd) {
  // The update is linear in x for a quadratic, so scaling x0 scales the whole
  // path and leaves the saddle angle untouched.
  const QuadraticSaddle cost({1.0}, {1.0}, 2);
  const double eta = 0.05;
  for (double c : {1e-3, 7.0}) {
    RngStream r1(21, 0), r2(21, 0);
    auto x = ManifoldPoint::euclidean({0.8, 0.1});
    auto y = ManifoldPoint::euclidean({0.8 * c, 0.1 * c});
    for (int k = 0; k < 200; ++k) {
      x = rgd_step(x, cost, HaarLaw{}, eta, r1).x_next;
      y = rgd_step(y, cost, HaarLaw{}, eta, r2).x_next;
      ASSERT_NEAR(*saddle_angle(cost, x.coords()), *saddle_angle(cost, y.coords()), 1e-12);
    }
  }
}

TEST(Saddle, IncrementVarianceIsHalfTheNoiseScaleSquared) {
  // E[sin^2(2 pi U)] = 1/2.
  AngleProcessParams p;
  p.a = 1.0;
  p.b = 2.0;
  p.eta = 0.02;
  const std::size_t n = 200000;
  for (double phi : {0.05, 0.4}) {
    RngStream rng(22, 0);
    double s = 0.0, q = 0.0, r = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = angle_step(phi, p, rng) - phi - angle_drift(phi, p);
      s += d;
      q += d * d;
      r += d * d * d * d;
    }
    const double var = q / n - (s / n) * (s / n);
    const double se = std::sqrt((r / n - (q / n) * (q / n)) / n);
    const double expected = 0.5 * angle_noise_scale(phi, p) * angle_noise_scale(phi, p);
    EXPECT_LE(std::abs(var - expected), 3.0 * se) << "phi = " << phi;
  }
}

TEST(Saddle, LinearizedDriftErrorIsCubic) {
  AngleProcessParams p;
  p.a = 1.5;
  p.b = 0.5;
  const double k = p.eta * (p.a + p.b);
  for (double phi = 0.0; phi <= kQuarter; phi += 0.01) {
    const double err = std::abs(angle_drift(phi, p) - k * phi);
    EXPECT_LE(err, 0.5 * k * std::pow(2.0 * phi, 3) / 6.0 + 1e-17) << "phi = " << phi;
  }
}
