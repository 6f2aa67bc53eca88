#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "rwm/analysis.hpp"
#include "rwm/limit_process.hpp"
#include "rwm/moment_ode.hpp"

namespace {

using rwm::builtin_potential;
using rwm::EnsembleConfig;
using rwm::InitialDistribution;

EnsembleConfig config(std::size_t particles, double horizon, std::uint64_t seed, InitialDistribution init,
                      double l = 2.38) {
  EnsembleConfig cfg;
  cfg.n_particles = particles;
  cfg.dt = 1e-3;
  cfg.horizon = horizon;
  cfg.l = l;
  cfg.seed = seed;
  cfg.init = init;
  cfg.threads = 1;
  return cfg;
}

rwm::Potential gaussian() { return builtin_potential("gaussian", std::vector<double>{1.0}); }

double variance(const Eigen::ArrayXd& x) {
  const double m = x.mean();
  return (x - m).square().sum() / static_cast<double>(x.size() - 1);
}

TEST(Ensemble, FlatTargetIsPureDiffusion) {
  const auto cfg = config(50000, 1.0, 3, InitialDistribution::point(0), 1.5);
  const std::vector<double> times{0.0, 1.0};
  const auto run = rwm::run_ensemble(cfg, builtin_potential("flat"), times);
  // Gamma(0, 0) = l^2, so Var X_1 = l^2 with sd l^2 sqrt(2 / N)
  EXPECT_NEAR(variance(run.snapshots[1].particles), 2.25, 4 * 2.25 * std::sqrt(2.0 / 50000));
  const auto c = rwm::mean_field_coefficients({0.0, 0.0}, 1.5);
  EXPECT_DOUBLE_EQ(c.gamma, 2.25);
  EXPECT_DOUBLE_EQ(c.gee, 0.0);
  EXPECT_EQ(rwm::ks_test_normal(std::span<const double>(run.snapshots[1].particles.data(), 50000), 0, 1.5).p_value > 0.001,
            true);
}

TEST(Ensemble, ForcedInfiniteMomentCoefficientsGiveShiftedBrownianMotion) {
  auto cfg = config(40000, 0.5, 4, InitialDistribution::normal(1, 0.5));
  auto e = rwm::make_ensemble(cfg, gaussian());
  const Eigen::ArrayXd start = e.particles;
  const auto c = rwm::mean_field_coefficients({HUGE_VAL, 1.0}, cfg.l);
  EXPECT_DOUBLE_EQ(c.gamma, cfg.l * cfg.l / 2);
  EXPECT_EQ(c.gee, 0.0);
  for (std::size_t k = 0; k < cfg.total_steps(); ++k) rwm::ensemble_step_with(e, gaussian(), cfg, c);
  // X_t - xi = l B_t / sqrt 2
  const Eigen::ArrayXd inc = e.particles - start;
  const double expected = cfg.l * cfg.l / 2 * 0.5;
  EXPECT_NEAR(inc.mean(), 0.0, 4 * std::sqrt(expected / 40000));
  EXPECT_NEAR(variance(inc), expected, 4 * expected * std::sqrt(2.0 / 40000));
  EXPECT_NEAR(e.t, 0.5, 1e-12);
}

TEST(Ensemble, StationaryInitStaysAtFixedPoint) {
  const auto cfg = config(100000, 5.0, 5, InitialDistribution::normal(0, 1));
  const std::vector<double> times{0.0, 2.5, 5.0};
  const auto run = rwm::run_ensemble(cfg, gaussian(), times);
  ASSERT_EQ(run.curve.size(), 5001u);
  for (const auto& s : run.curve) {
    ASSERT_NEAR(s.a, 1.0, 0.05) << "t=" << s.t;
    ASSERT_EQ(s.b, 1.0);
  }
  for (const auto& snap : run.snapshots) {
    std::span<const double> xs(snap.particles.data(), static_cast<std::size_t>(snap.particles.size()));
    EXPECT_GT(rwm::ks_test_normal(xs).p_value, 0.01 / 3) << "t=" << snap.t;
  }
}

TEST(Ensemble, ZeroHorizonReturnsInitialEnsemble) {
  const auto cfg = config(1000, 0.0, 6, InitialDistribution::normal(0, 2));
  const std::vector<double> times{0.0};
  const auto run = rwm::run_ensemble(cfg, gaussian(), times);
  const auto e = rwm::make_ensemble(cfg, gaussian());
  ASSERT_EQ(run.snapshots.size(), 1u);
  ASSERT_EQ(run.curve.size(), 1u);
  EXPECT_TRUE((run.snapshots[0].particles == e.particles).all());
  EXPECT_DOUBLE_EQ(run.curve[0].a, e.particles.square().mean());
}

TEST(Ensemble, RejectsInvalidConfigs) {
  auto cfg = config(1000, 1.0, 1, InitialDistribution::point(0));
  cfg.dt = 0.02;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.dt = 1e-3;
  cfg.n_particles = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.n_particles = 10;
  const std::vector<double> late{2.0};
  EXPECT_THROW(rwm::run_ensemble(cfg, gaussian(), late), std::invalid_argument);
}

TEST(Ensemble, LogcoshCurvesSelfAverage) {
  const auto p = builtin_potential("logcosh");
  const std::vector<double> none;
  const auto a = rwm::run_ensemble(config(100000, 2.0, 11, InitialDistribution::point(2)), p, none);
  const auto b = rwm::run_ensemble(config(100000, 2.0, 12, InitialDistribution::point(2)), p, none);
  double worst = 0;
  for (std::size_t k = 0; k < a.curve.size(); ++k) {
    worst = std::max({worst, std::abs(a.curve[k].a - b.curve[k].a), std::abs(a.curve[k].b - b.curve[k].b)});
  }
  EXPECT_LE(worst, 0.02);
}

TEST(Ensemble, BitIdenticalAcrossThreadCounts) {
  auto cfg = config(3 * rwm::ParticleEnsemble::kBlockSize + 17, 0.2, 13, InitialDistribution::normal(0, 2));
  const std::vector<double> times{0.0, 0.1, 0.2};
  const auto one = rwm::run_ensemble(cfg, gaussian(), times);
  cfg.threads = 3;
  const auto three = rwm::run_ensemble(cfg, gaussian(), times);
  for (std::size_t s = 0; s < times.size(); ++s) {
    EXPECT_TRUE((one.snapshots[s].particles == three.snapshots[s].particles).all());
  }
  for (std::size_t k = 0; k < one.curve.size(); ++k) {
    EXPECT_EQ(one.curve[k].a, three.curve[k].a);
  }
}

TEST(Ensemble, TracksGaussianOde) {
  // the benchmark version of this check runs 1e5 particles; here 4e4 with a
  // looser bound keeps the test quick
  const auto cfg = config(40000, 2.0, 14, InitialDistribution::normal(0, 2));
  const auto run = rwm::run_ensemble(cfg, gaussian(), std::vector<double>{});
  const auto ode = rwm::integrate_moment_ode(4.0, 2.38, 2.0, 1e-3);
  double worst = 0;
  for (std::size_t k = 0; k < run.curve.size(); ++k) worst = std::max(worst, std::abs(run.curve[k].a - ode.m[k]));
  EXPECT_LE(worst, 0.1);
}

TEST(TestFunctions, TaperDerivativesMatchFiniteDifferences) {
  const double h = 1e-5;
  for (auto base : {rwm::TaperBase::kIdentity, rwm::TaperBase::kSquare, rwm::TaperBase::kSine}) {
    const auto phi = rwm::tapered_test_function(base, 1.5);
    for (double x = -3.4; x <= 3.4; x += 0.173) {
      EXPECT_NEAR((phi.f(x + h) - phi.f(x - h)) / (2 * h), phi.d1(x), 1e-6) << x;
      EXPECT_NEAR((phi.d1(x + h) - phi.d1(x - h)) / (2 * h), phi.d2(x), 1e-5) << x;
    }
    EXPECT_EQ(phi.f(3.0), 0.0);
    EXPECT_EQ(phi.f(-3.5), 0.0);
  }
  EXPECT_THROW(rwm::tapered_test_function(rwm::TaperBase::kSine, 0.0), std::invalid_argument);
}

TEST(CoveringRadius, Quantile) {
  Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(1000, -1, 1);
  EXPECT_NEAR(rwm::covering_radius(x, 0.5), 0.5, 0.01);
  EXPECT_NEAR(rwm::covering_radius(x, 1.0), 1.0, 1e-12);
}

TEST(MartingaleDefect, ConstantFunctionIsExactlyZero) {
  const auto cfg = config(2000, 0.1, 15, InitialDistribution::normal(0, 2));
  const std::vector<double> times{0.0, 0.05, 0.1};
  const auto run = rwm::run_ensemble(cfg, gaussian(), times);
  const auto d = rwm::martingale_defect(run, gaussian(), rwm::constant_test_function(3.0), 0.0, 0.1);
  EXPECT_EQ(d.defect, 0.0);
  EXPECT_THROW(rwm::martingale_defect(run, gaussian(), rwm::constant_test_function(1), 0.1, 0.1),
               std::invalid_argument);
  EXPECT_THROW(rwm::martingale_defect(run, gaussian(), rwm::constant_test_function(1), 0.0, 0.07),
               std::out_of_range);
}

TEST(MartingaleDefect, StationaryGaussianTaperedSquare) {
  const auto cfg = config(20000, 2.0, 16, InitialDistribution::normal(0, 1));
  std::vector<double> times;
  for (int i = 0; i <= 200; ++i) times.push_back(0.01 * i);
  const auto run = rwm::run_ensemble(cfg, gaussian(), times);
  const double radius = rwm::covering_radius(run.snapshots.front().particles);
  const auto phi = rwm::tapered_test_function(rwm::TaperBase::kSquare, radius);
  for (auto [s, t] : {std::pair{0.0, 1.0}, std::pair{0.5, 2.0}}) {
    const auto d = rwm::martingale_defect(run, gaussian(), phi, s, t);
    EXPECT_LE(std::abs(d.defect), 3 * (d.standard_error + 5 * cfg.dt)) << s << " " << t;
  }
}

TEST(MartingaleDefect, FlatTargetHeatBalance) {
  // flat target: X_t = X_0 + l B_t. With phi = x^2 on a region the particles
  // never leave, the heat kernel gives E phi(X_1) - E phi(X_0) = l^2.
  const auto cfg = config(20000, 1.0, 17, InitialDistribution::normal(0, 1), 1.0);
  std::vector<double> times;
  for (int i = 0; i <= 100; ++i) times.push_back(0.01 * i);
  const auto flat = builtin_potential("flat");
  const auto run = rwm::run_ensemble(cfg, flat, times);
  const auto phi = rwm::tapered_test_function(rwm::TaperBase::kSquare, 10.0);
  const Eigen::ArrayXd change = run.snapshots.back().particles.square() - run.snapshots.front().particles.square();
  EXPECT_NEAR(change.mean(), 1.0, 4 * std::sqrt(variance(change) / 20000));
  const auto d = rwm::martingale_defect(run, flat, phi, 0.0, 1.0);
  EXPECT_LE(std::abs(d.defect), 3 * (d.standard_error + 5 * cfg.dt));
  // the compensator is deterministic here: l^2 / 2 * phi'' = 1 inside the taper
  EXPECT_NEAR(change.mean() - d.defect, 1.0, 1e-9);
}

}  // namespace
