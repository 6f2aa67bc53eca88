#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "rwm/analysis.hpp"
#include "rwm/chain.hpp"

namespace {

using rwm::builtin_potential;
using rwm::ChainConfig;
using rwm::InitialDistribution;

rwm::Potential gaussian() { return builtin_potential("gaussian", std::vector<double>{1.0}); }

ChainConfig config(std::size_t n, std::size_t steps, std::uint64_t seed, InitialDistribution init) {
  ChainConfig cfg;
  cfg.n = n;
  cfg.steps = steps;
  cfg.seed = seed;
  cfg.init = init;
  return cfg;
}

TEST(ApplyProposal, FlatTargetAlwaysAccepts) {
  const auto flat = builtin_potential("flat");
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(5, -2, 2);
  const Eigen::VectorXd noise = Eigen::VectorXd::Constant(5, 0.7);
  // log U = 0 is the largest possible draw
  const auto rec = rwm::apply_proposal(x, noise, 0.0, flat, 2.0);
  EXPECT_TRUE(rec.accepted);
  EXPECT_EQ(rec.log_ratio, 0.0);
  EXPECT_NEAR(x(0), -2 + 2 / std::sqrt(5.0) * 0.7, 1e-15);
}

TEST(ApplyProposal, UphillMoveWithUnitUniformIsRejected) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd noise(1);
  noise << 0.5;
  const auto rec = rwm::apply_proposal(x, noise, 0.0, gaussian(), 1.0);
  EXPECT_FALSE(rec.accepted);
  EXPECT_LT(rec.log_ratio, 0.0);
  EXPECT_EQ(x(0), 0.0);
  // downhill with any U is accepted
  x << 1.0;
  noise << -0.5;
  EXPECT_TRUE(rwm::apply_proposal(x, noise, 0.0, gaussian(), 1.0).accepted);
  EXPECT_DOUBLE_EQ(x(0), 0.5);
}

TEST(ApplyProposal, RecordsPreStepMoments) {
  Eigen::VectorXd x(2);
  x << -1.0, 1.0;
  const auto rec = rwm::apply_proposal(x, Eigen::VectorXd::Zero(2), -1.0, gaussian(), 1.0);
  EXPECT_DOUBLE_EQ(rec.a_emp, 1.0);
  EXPECT_DOUBLE_EQ(rec.b_emp, 1.0);
}

TEST(EmpiricalMoments, Examples) {
  const auto zero = rwm::empirical_moments(Eigen::VectorXd::Zero(7), gaussian());
  EXPECT_EQ(zero.a, 0.0);
  EXPECT_EQ(zero.b, 1.0);
  Eigen::VectorXd pm(2);
  pm << -1.0, 1.0;
  const auto m = rwm::empirical_moments(pm, gaussian());
  EXPECT_EQ(m.a, 1.0);
  EXPECT_EQ(m.b, 1.0);
  EXPECT_THROW(rwm::empirical_moments(Eigen::VectorXd(0), gaussian()), std::invalid_argument);
}

TEST(EmpiricalMoments, LogcoshMatchesNaiveSum) {
  const auto p = builtin_potential("logcosh");
  rwm::Stream rng(3, {1});
  Eigen::VectorXd x(1000);
  for (auto& v : x) v = 3 * rng.gaussian();
  double a = 0, b = 0;
  for (double v : x) {
    a += std::tanh(v) * std::tanh(v);
    b += 1 / (std::cosh(v) * std::cosh(v));
  }
  const auto m = rwm::empirical_moments(x, p);
  EXPECT_NEAR(m.a, a / 1000, 1e-12);
  EXPECT_NEAR(m.b, b / 1000, 1e-12);
}

TEST(ChainStep, StationaryAcceptanceNearOptimalRate) {
  auto cfg = config(100, 100000, 21, InitialDistribution::stationary());
  auto state = rwm::make_chain_state(cfg, gaussian());
  std::size_t accepted = 0;
  for (std::size_t k = 0; k < cfg.steps; ++k) accepted += rwm::chain_step(state, gaussian(), cfg).accepted;
  EXPECT_EQ(state.k, cfg.steps);
  EXPECT_NEAR(static_cast<double>(accepted) / static_cast<double>(cfg.steps), 0.234, 0.02);
}

TEST(RunChain, RecordAtZeroReturnsInitialPositions) {
  auto cfg = config(20, 50, 4, InitialDistribution::normal(1, 2));
  const auto state = rwm::make_chain_state(cfg, gaussian(), 3);
  const std::vector<double> t0{0.0};
  const auto run = rwm::run_chain(cfg, gaussian(), t0, rwm::kAllComponents, 3);
  ASSERT_EQ(run.snapshots.size(), 1u);
  EXPECT_EQ(run.snapshots[0].k, 0u);
  EXPECT_EQ(run.snapshots[0].leading, state.positions);
}

TEST(RunChain, MatchesStepByStepAndIsDeterministic) {
  auto cfg = config(30, 400, 8, InitialDistribution::uniform(-3, 3));
  const std::vector<double> times{0.0, 2.5, 400.0 / 30};
  const auto run = rwm::run_chain(cfg, gaussian(), times, rwm::kAllComponents, 5);
  const auto again = rwm::run_chain(cfg, gaussian(), times, rwm::kAllComponents, 5);
  auto state = rwm::make_chain_state(cfg, gaussian(), 5);
  std::vector<std::uint8_t> accepted;
  for (std::size_t k = 0; k < cfg.steps; ++k) {
    if (k == rwm::snapshot_step(2.5, 30)) {
      EXPECT_EQ(run.snapshots[1].leading, state.positions);
    }
    accepted.push_back(rwm::chain_step(state, gaussian(), cfg).accepted);
  }
  EXPECT_EQ(run.snapshots[2].leading, state.positions);
  EXPECT_EQ(run.accepted, accepted);
  EXPECT_EQ(again.accepted, run.accepted);
  EXPECT_EQ(again.snapshots[2].leading, run.snapshots[2].leading);
}

TEST(RunChain, RejectsBadRecordTimes) {
  auto cfg = config(10, 20, 1, InitialDistribution::point(0));
  const std::vector<double> late{3.0}, unsorted{1.0, 0.5};
  EXPECT_THROW(rwm::run_chain(cfg, gaussian(), late), std::invalid_argument);
  EXPECT_THROW(rwm::run_chain(cfg, gaussian(), unsorted), std::invalid_argument);
}

TEST(RunChain, StationaryMarginalStaysStandardNormal) {
  auto cfg = config(50, 50 * 20, 31, InitialDistribution::stationary());
  const std::vector<double> times{0, 5, 10, 20};
  const auto runs = rwm::run_replicas(cfg, gaussian(), times, 400, 1, 0);
  const auto slices = rwm::slice_replicas(runs, rwm::acceptance_window(50));
  for (const auto& s : slices) {
    EXPECT_GE(rwm::ks_test_normal(s.component1).p_value, 0.01 / 4) << "t=" << s.t;
  }
}

TEST(RunChain, PointInitContractsTowardOrigin) {
  auto cfg = config(200, 400, 17, InitialDistribution::point(3));
  const std::vector<double> times{0.0, 2.0};
  const auto runs = rwm::run_replicas(cfg, gaussian(), times, 200, 1, 0);
  double m0 = 0, m2 = 0;
  for (const auto& r : runs) {
    m0 += r.snapshots[0].leading(0);
    m2 += r.snapshots[1].leading(0);
  }
  EXPECT_LT(std::abs(m2 / 200), std::abs(m0 / 200));
}

TEST(RunChain, PermutationEquivariance) {
  const auto p = gaussian();
  rwm::Stream rng(77, {0});
  const Eigen::Index n = 12;
  Eigen::VectorXd x(n);
  for (auto& v : x) v = 2 * rng.gaussian();
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
  perm.setIdentity();
  std::reverse(perm.indices().data(), perm.indices().data() + n);
  std::swap(perm.indices()(0), perm.indices()(5));
  Eigen::VectorXd y = perm * x;
  for (int k = 0; k < 300; ++k) {
    Eigen::VectorXd noise(n);
    for (auto& v : noise) v = rng.gaussian();
    const double log_u = std::log(rng.uniform());
    const Eigen::VectorXd permuted_noise = perm * noise;
    const auto a = rwm::apply_proposal(x, noise, log_u, p, 2.38);
    const auto b = rwm::apply_proposal(y, permuted_noise, log_u, p, 2.38);
    ASSERT_EQ(a.accepted, b.accepted) << k;
    ASSERT_NEAR(a.log_ratio, b.log_ratio, 1e-12);
  }
  EXPECT_LT(((perm * x) - y).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RunChain, FlatTargetIsScaledRandomWalk) {
  auto cfg = config(16, 64, 9, InitialDistribution::point(0));
  cfg.l = 2.0;
  const std::vector<double> times{0.0, 4.0};
  const auto runs = rwm::run_replicas(cfg, builtin_potential("flat"), times, 4000, 1, 0);
  double ss = 0;
  for (const auto& r : runs) {
    EXPECT_DOUBLE_EQ(r.mean_acceptance(), 1.0);
    ss += r.snapshots[1].leading(0) * r.snapshots[1].leading(0);
  }
  // 64 steps of variance l^2 / n = 0.25, so E X^2 = 16 with sd 16 sqrt(2/4000)
  EXPECT_NEAR(ss / 4000, 16.0, 3 * 16 * std::sqrt(2.0 / 4000));
}

TEST(RunReplicas, IndependentOfThreadCount) {
  auto cfg = config(25, 250, 2, InitialDistribution::normal(0, 2));
  const std::vector<double> times{0.0, 5.0, 10.0};
  const auto one = rwm::run_replicas(cfg, gaussian(), times, 9, 3, 1);
  const auto four = rwm::run_replicas(cfg, gaussian(), times, 9, 3, 4);
  ASSERT_EQ(one.size(), four.size());
  for (std::size_t r = 0; r < one.size(); ++r) {
    EXPECT_EQ(one[r].accepted, four[r].accepted);
    for (std::size_t s = 0; s < times.size(); ++s) {
      EXPECT_EQ(one[r].snapshots[s].leading, four[r].snapshots[s].leading);
      EXPECT_EQ(one[r].snapshots[s].second_moment, four[r].snapshots[s].second_moment);
    }
  }
}

TEST(Snapshots, StepIndexAndWindow) {
  EXPECT_EQ(rwm::snapshot_step(0.3, 10), 3u);  // 0.3 * 10 is 2.9999999999999996
  EXPECT_EQ(rwm::snapshot_step(1.0, 200), 200u);
  EXPECT_EQ(rwm::snapshot_step(0.004, 200), 0u);
  EXPECT_EQ(rwm::acceptance_window(10), 1u);
  EXPECT_EQ(rwm::acceptance_window(50), 5u);
  EXPECT_EQ(rwm::acceptance_window(201), 21u);
}

TEST(Snapshots, WindowAcceptanceIsCentredAndClipped) {
  rwm::TrajectoryTable t;
  t.accepted = {1, 0, 0, 1, 1, 1, 0, 0};
  EXPECT_DOUBLE_EQ(t.window_acceptance(0, 2), 0.5);    // steps 0, 1
  EXPECT_DOUBLE_EQ(t.window_acceptance(4, 3), 1.0);    // steps 3..5
  EXPECT_DOUBLE_EQ(t.window_acceptance(8, 4), 0.5);    // steps 4..7
  EXPECT_DOUBLE_EQ(t.mean_acceptance(), 0.5);
}

TEST(ChainConfig, Validation) {
  auto cfg = config(0, 10, 1, InitialDistribution::point(0));
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.n = 3;
  cfg.steps = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.steps = 1;
  cfg.init = InitialDistribution::stationary();
  EXPECT_THROW(rwm::make_chain_state(cfg, builtin_potential("flat")), std::invalid_argument);
}

}  // namespace
