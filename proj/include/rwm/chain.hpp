#pragma once

// Random walk Metropolis on the product target prod_i exp(-V(x_i)) / Z in R^n
// with proposal N(x, l^2/n Id). All coordinates share one accept/reject draw,
// which is the mean-field interaction between them.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rwm/coefficients.hpp"
#include "rwm/initial.hpp"
#include "rwm/potential.hpp"
#include "rwm/random.hpp"

namespace rwm {

struct ChainConfig {
  std::size_t n = 1;
  double l = 2.38;
  std::size_t steps = 1;
  std::uint64_t seed = 0;
  InitialDistribution init;

  void validate() const;
};

struct ChainState {
  Eigen::VectorXd positions;
  std::size_t k = 0;
  Stream rng;
};

struct StepRecord {
  bool accepted = false;
  // sum_i V(x_i) - V(x_i + l/sqrt(n) G_i)
  double log_ratio = 0;
  // <nu, V'^2> and <nu, V''> of the pre-step configuration
  double a_emp = 0;
  double b_emp = 0;
};

/// Empirical moment pair ((1/n) sum V'(x_i)^2, (1/n) sum V''(x_i)).
template <typename Derived>
MomentPair<double> empirical_moments(const Eigen::DenseBase<Derived>& xs, const Potential& p) {
  if (xs.size() == 0) throw std::invalid_argument("empirical_moments of an empty sample");
  double a = 0, b = 0;
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double x = xs.derived().coeff(i);
    const double d = p.v1(x);
    a += d * d;
    b += p.v2(x);
  }
  const double n = static_cast<double>(xs.size());
  return {a / n, b / n};
}

/// State of replica `replica`: its stream, then n initial draws taken from it.
ChainState make_chain_state(const ChainConfig& cfg, const Potential& p,
                            std::uint64_t replica = 0);

/// Moves `positions` by l/sqrt(n) * noise if log_u <= sum dV. This is the
/// deterministic part of one Metropolis step; `noise` and `log_u` are the draws.
StepRecord apply_proposal(Eigen::Ref<Eigen::VectorXd> positions,
                          const Eigen::Ref<const Eigen::VectorXd>& noise, double log_u,
                          const Potential& p, double l);

/// One step: n normals in coordinate order, then one uniform, from state.rng.
StepRecord chain_step(ChainState& state, const Potential& p, const ChainConfig& cfg);

/// Step index floor(n t), robust to t*n landing a hair below an integer.
std::size_t snapshot_step(double t, std::size_t n);

/// Default acceptance averaging window ceil(n / 10).
std::size_t acceptance_window(std::size_t n);

struct ChainSnapshot {
  double t = 0;
  std::size_t k = 0;
  Eigen::VectorXd leading;  // first `keep_components` coordinates
  double a_emp = 0;
  double b_emp = 0;
  double second_moment = 0;  // (1/n) sum x_i^2
};

/// One replica's run: snapshots at the record times and the accept indicator
/// of every step (accepted[k] is the event A_{k+1}).
struct TrajectoryTable {
  std::size_t n = 0;
  std::uint64_t replica = 0;
  std::vector<ChainSnapshot> snapshots;
  std::vector<std::uint8_t> accepted;

  /// Mean acceptance over `w` steps centred on step k, shifted to stay inside
  /// the run.
  double window_acceptance(std::size_t k, std::size_t w) const;
  double mean_acceptance() const;
};

inline constexpr std::size_t kAllComponents = std::numeric_limits<std::size_t>::max();

/// Runs cfg.steps steps of replica `replica`, snapshotting X_{floor(n t)} for
/// each t in `record_times` (sorted, t <= steps / n).
TrajectoryTable run_chain(const ChainConfig& cfg, const Potential& p,
                          std::span<const double> record_times,
                          std::size_t keep_components = kAllComponents,
                          std::uint64_t replica = 0);

/// Replicas 0..replicas-1 run independently, possibly on several threads; the
/// result does not depend on `threads`.
std::vector<TrajectoryTable> run_replicas(const ChainConfig& cfg, const Potential& p,
                                          std::span<const double> record_times,
                                          std::size_t replicas,
                                          std::size_t keep_components = kAllComponents,
                                          unsigned threads = 0);

}  // namespace rwm
