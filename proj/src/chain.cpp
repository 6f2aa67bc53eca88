#include "rwm/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwm/parallel.hpp"

namespace rwm {

void ChainConfig::validate() const {
  if (n < 1) throw std::invalid_argument("chain dimension n must be >= 1");
  if (steps < 1) throw std::invalid_argument("chain needs at least one step");
  ScalingParams<double> check(l);
  (void)check;
}

ChainState make_chain_state(const ChainConfig& cfg, const Potential& p, std::uint64_t replica) {
  cfg.validate();
  ChainState state{Eigen::VectorXd(static_cast<Eigen::Index>(cfg.n)), 0,
                   Stream(cfg.seed, {tag(StreamTag::kChainReplica), replica})};
  for (Eigen::Index i = 0; i < state.positions.size(); ++i) {
    state.positions(i) = cfg.init.draw(p, state.rng);
  }
  return state;
}

namespace {

// Proposal and accept/reject without the moment bookkeeping.
bool propose(Eigen::Ref<Eigen::VectorXd> positions,
             const Eigen::Ref<const Eigen::VectorXd>& noise, double log_u, const Potential& p,
             double l, double& log_ratio) {
  const double sigma = l / std::sqrt(static_cast<double>(positions.size()));
  double sum = 0;
  for (Eigen::Index i = 0; i < positions.size(); ++i) {
    const double x = positions(i);
    sum += p.v(x) - p.v(x + sigma * noise(i));
  }
  log_ratio = sum;
  if (log_u <= sum) {
    positions += sigma * noise;
    return true;
  }
  return false;
}

}  // namespace

StepRecord apply_proposal(Eigen::Ref<Eigen::VectorXd> positions,
                          const Eigen::Ref<const Eigen::VectorXd>& noise, double log_u,
                          const Potential& p, double l) {
  if (noise.size() != positions.size()) {
    throw std::invalid_argument("noise and positions differ in length");
  }
  StepRecord rec;
  const MomentPair<double> m = empirical_moments(positions, p);
  rec.a_emp = m.a;
  rec.b_emp = m.b;
  rec.accepted = propose(positions, noise, log_u, p, l, rec.log_ratio);
  return rec;
}

StepRecord chain_step(ChainState& state, const Potential& p, const ChainConfig& cfg) {
  if (static_cast<std::size_t>(state.positions.size()) != cfg.n) {
    throw std::invalid_argument("chain state dimension differs from cfg.n");
  }
  Eigen::VectorXd noise(state.positions.size());
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = state.rng.gaussian();
  const double log_u = std::log(state.rng.uniform());
  StepRecord rec = apply_proposal(state.positions, noise, log_u, p, cfg.l);
  ++state.k;
  return rec;
}

std::size_t snapshot_step(double t, std::size_t n) {
  if (!(t >= 0)) throw std::invalid_argument("record time must be >= 0");
  return static_cast<std::size_t>(std::floor(t * static_cast<double>(n) + 1e-9));
}

std::size_t acceptance_window(std::size_t n) { return (n + 9) / 10; }

double TrajectoryTable::window_acceptance(std::size_t k, std::size_t w) const {
  if (accepted.empty()) return std::nan("");
  w = std::clamp<std::size_t>(w, 1, accepted.size());
  const std::size_t half = w / 2;
  std::size_t begin = k > half ? k - half : 0;
  begin = std::min(begin, accepted.size() - w);
  std::size_t hits = 0;
  for (std::size_t j = begin; j < begin + w; ++j) hits += accepted[j];
  return static_cast<double>(hits) / static_cast<double>(w);
}

double TrajectoryTable::mean_acceptance() const {
  return window_acceptance(0, accepted.size());
}

TrajectoryTable run_chain(const ChainConfig& cfg, const Potential& p,
                          std::span<const double> record_times, std::size_t keep_components,
                          std::uint64_t replica) {
  if (!std::is_sorted(record_times.begin(), record_times.end())) {
    throw std::invalid_argument("record times must be sorted");
  }
  ChainState state = make_chain_state(cfg, p, replica);
  TrajectoryTable table;
  table.n = cfg.n;
  table.replica = replica;
  table.accepted.reserve(cfg.steps);
  const auto keep = static_cast<Eigen::Index>(std::min(keep_components, cfg.n));

  std::vector<std::size_t> record_steps;
  for (double t : record_times) {
    const std::size_t k = snapshot_step(t, cfg.n);
    if (k > cfg.steps) throw std::invalid_argument("record time beyond the last step");
    record_steps.push_back(k);
  }

  auto snapshot = [&](double t) {
    ChainSnapshot s;
    s.t = t;
    s.k = state.k;
    s.leading = state.positions.head(keep);
    const MomentPair<double> m = empirical_moments(state.positions, p);
    s.a_emp = m.a;
    s.b_emp = m.b;
    s.second_moment = state.positions.squaredNorm() / static_cast<double>(cfg.n);
    table.snapshots.push_back(std::move(s));
  };

  Eigen::VectorXd noise(state.positions.size());
  std::size_t next = 0;
  for (std::size_t k = 0;; ++k) {
    while (next < record_steps.size() && record_steps[next] == k) snapshot(record_times[next++]);
    if (k == cfg.steps) break;
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = state.rng.gaussian();
    const double log_u = std::log(state.rng.uniform());
    double log_ratio = 0;
    table.accepted.push_back(propose(state.positions, noise, log_u, p, cfg.l, log_ratio));
    ++state.k;
  }
  return table;
}

std::vector<TrajectoryTable> run_replicas(const ChainConfig& cfg, const Potential& p,
                                          std::span<const double> record_times,
                                          std::size_t replicas, std::size_t keep_components,
                                          unsigned threads) {
  std::vector<TrajectoryTable> out(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    out[r] = run_chain(cfg, p, record_times, keep_components, r);
  });
  return out;
}

}  // namespace rwm
