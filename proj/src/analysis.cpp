#include "rwm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

#include "rwm/coefficients.hpp"
#include "rwm/random.hpp"

namespace rwm {
namespace {

// W1 between sorted samples, integrating |F^-1 - G^-1| over the merged
// breakpoints i/m and j/k in integer units of 1/(m k).
double sorted_w1(std::span<const double> xs, std::span<const double> ys) {
  const std::uint64_t m = xs.size(), k = ys.size();
  std::uint64_t i = 0, j = 0, cur = 0;
  double sum = 0;
  while (i < m && j < k) {
    const std::uint64_t px = (i + 1) * k, py = (j + 1) * m;
    const std::uint64_t next = std::min(px, py);
    sum += static_cast<double>(next - cur) * std::abs(xs[i] - ys[j]);
    cur = next;
    if (px == next) ++i;
    if (py == next) ++j;
  }
  return sum / (static_cast<double>(m) * static_cast<double>(k));
}

std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

Estimate mean_and_se(std::span<const double> v) {
  Estimate e;
  if (v.empty()) return {std::nan(""), std::nan("")};
  double sum = 0;
  for (double x : v) sum += x;
  e.value = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - e.value) * (x - e.value);
    e.standard_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return e;
}

double standard_deviation(std::span<const double> v) {
  const Estimate e = mean_and_se(v);
  return e.standard_error * std::sqrt(static_cast<double>(v.size()));
}

}  // namespace

double wasserstein1_1d(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("wasserstein1_1d of an empty sample");
  return sorted_w1(sorted_copy(xs), sorted_copy(ys));
}

Estimate wasserstein1_bootstrap(std::span<const double> xs, std::span<const double> ys,
                                std::size_t resamples, std::uint64_t seed) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("wasserstein1_1d of an empty sample");
  const std::vector<double> sy = sorted_copy(ys);
  Estimate e;
  e.value = sorted_w1(sorted_copy(xs), sy);
  if (resamples < 2) return e;
  Stream rng(seed, {tag(StreamTag::kBootstrap)});
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  std::vector<double> stats(resamples), resample(xs.size());
  for (std::size_t b = 0; b < resamples; ++b) {
    for (double& x : resample) x = xs[pick(rng.engine())];
    std::sort(resample.begin(), resample.end());
    stats[b] = sorted_w1(resample, sy);
  }
  e.standard_error = standard_deviation(stats);
  return e;
}

KsResult ks_test_normal(std::span<const double> sample, double mean, double sd) {
  if (sample.empty()) throw std::invalid_argument("ks_test_normal of an empty sample");
  const std::vector<double> xs = sorted_copy(sample);
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf((xs[i] - mean) / sd);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double rn = std::sqrt(n);
  const double lambda = (rn + 0.12 + 0.11 / rn) * d;
  KsResult r;
  r.statistic = d;
  if (lambda < 0.2) return r;
  double q = 0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  r.p_value = std::clamp(q, 0.0, 1.0);
  return r;
}

double optimal_scale(double fisher) {
  if (!(fisher > 0)) throw std::invalid_argument("optimal_scale needs I > 0");
  const auto [arg, value] = boost::math::tools::brent_find_minima(
      [fisher](double l) { return -h_of_l(l, fisher); }, 1e-3 / std::sqrt(fisher),
      20.0 / std::sqrt(fisher), 50);
  return arg;
}

std::vector<ChainTimeSlice> slice_replicas(const std::vector<TrajectoryTable>& runs,
                                           std::size_t window) {
  if (runs.empty()) throw std::invalid_argument("no chain replicas");
  const std::size_t times = runs.front().snapshots.size();
  std::vector<ChainTimeSlice> slices(times);
  for (std::size_t s = 0; s < times; ++s) slices[s].t = runs.front().snapshots[s].t;
  for (const TrajectoryTable& run : runs) {
    if (run.snapshots.size() != times) throw std::invalid_argument("replica record grids differ");
    for (std::size_t s = 0; s < times; ++s) {
      const ChainSnapshot& snap = run.snapshots[s];
      if (snap.t != slices[s].t) throw std::invalid_argument("replica record grids differ");
      ChainTimeSlice& slice = slices[s];
      if (snap.leading.size() > 0) slice.component1.push_back(snap.leading(0));
      slice.acc_window.push_back(run.window_acceptance(snap.k, window));
      slice.a_emp.push_back(snap.a_emp);
      slice.b_emp.push_back(snap.b_emp);
      slice.second_moment.push_back(snap.second_moment);
    }
  }
  return slices;
}

LimitView LimitView::from_run(const EnsembleRun& run) {
  LimitView view;
  view.l = run.l;
  view.curve = run.curve;
  for (const auto& snap : run.snapshots) {
    view.marginal_times.push_back(snap.t);
    view.marginals.push_back(snap.particles);
  }
  return view;
}

const MomentSample& LimitView::moments_at(double t) const {
  if (curve.empty()) throw std::invalid_argument("limit moment curve is empty");
  const auto it = std::min_element(curve.begin(), curve.end(), [t](const auto& x, const auto& y) {
    return std::abs(x.t - t) < std::abs(y.t - t);
  });
  return *it;
}

const Eigen::ArrayXd* LimitView::marginal_at(double t) const {
  for (std::size_t i = 0; i < marginal_times.size(); ++i) {
    if (std::abs(marginal_times[i] - t) < 1e-9) return &marginals[i];
  }
  return nullptr;
}

ComparisonReport compare_chain_to_limit(const std::vector<ChainTimeSlice>& slices,
                                        const LimitView& limit, std::size_t n,
                                        std::size_t bootstrap_resamples, std::uint64_t seed) {
  const ScalingParams<double> scale(limit.l);
  ComparisonReport report;
  report.n = n;
  report.replicas = slices.empty() ? 0 : slices.front().acc_window.size();
  report.n_particles = limit.marginals.empty() ? 0 : static_cast<std::size_t>(limit.marginals.front().size());
  for (std::size_t s = 0; s < slices.size(); ++s) {
    const ChainTimeSlice& slice = slices[s];
    const MomentSample& m = limit.moments_at(slice.t);
    if (std::abs(m.t - slice.t) > 1e-6) {
      throw std::invalid_argument("limit curve does not cover chain time " + std::to_string(slice.t));
    }
    ComparisonRow row;
    row.t = slice.t;
    const Estimate acc = mean_and_se(slice.acc_window);
    row.acc_emp = acc.value;
    row.acc_emp_se = acc.standard_error;
    const Estimate a = mean_and_se(slice.a_emp);
    row.a_chain = a.value;
    row.a_chain_se = a.standard_error;
    row.b_chain = mean_and_se(slice.b_emp).value;
    row.a_limit = m.a;
    row.b_limit = m.b;
    row.acc_pred = acc_rate(MomentPair<double>(m.a, m.b), scale);
    row.w1_chain_vs_limit = std::nan("");
    row.w1_se = std::nan("");
    if (const Eigen::ArrayXd* marginal = limit.marginal_at(slice.t);
        marginal != nullptr && !slice.component1.empty()) {
      const Estimate w = wasserstein1_bootstrap(
          slice.component1, std::span<const double>(marginal->data(), marginal->size()),
          bootstrap_resamples, mix64(seed ^ mix64(s)));
      row.w1_chain_vs_limit = w.value;
      row.w1_se = w.standard_error;
    }
    report.rows.push_back(row);
  }
  return report;
}

ComparisonReport acceptance_curve(const std::vector<TrajectoryTable>& runs,
                                  const LimitView& limit) {
  if (runs.empty()) throw std::invalid_argument("no chain replicas");
  const std::size_t n = runs.front().n;
  LimitView curve_only = limit;
  curve_only.marginals.clear();
  curve_only.marginal_times.clear();
  return compare_chain_to_limit(slice_replicas(runs, acceptance_window(n)), curve_only, n, 0);
}

namespace {

Eigen::MatrixXd correlation(const Eigen::MatrixXd& samples) {
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centred = samples.rowwise() - mean;
  const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(samples.rows() - 1);
  const Eigen::VectorXd inv_sd = cov.diagonal().cwiseSqrt().cwiseInverse();
  return inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
}

double mean_off_diagonal(const Eigen::MatrixXd& m) {
  const Eigen::Index j = m.rows();
  if (j < 2) return 0;
  return (m.sum() - m.trace()) / static_cast<double>(j * (j - 1));
}

double copula_deviation(const Eigen::MatrixXd& samples) {
  const Eigen::Index r = samples.rows(), j = samples.cols();
  if (j < 2) return 0;
  Eigen::MatrixXd ranks(r, j);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(r));
  for (Eigen::Index c = 0; c < j; ++c) {
    for (Eigen::Index i = 0; i < r; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index x, Eigen::Index y) { return samples(x, c) < samples(y, c); });
    for (Eigen::Index pos = 0; pos < r; ++pos) {
      ranks(order[static_cast<std::size_t>(pos)], c) = static_cast<double>(pos + 1) / static_cast<double>(r);
    }
  }
  double worst = 0;
  for (Eigen::Index p = 0; p < j; ++p) {
    for (Eigen::Index q = p + 1; q < j; ++q) {
      for (int gu = 1; gu <= 9; ++gu) {
        for (int gv = 1; gv <= 9; ++gv) {
          const double u = gu / 10.0, v = gv / 10.0;
          const auto hits = ((ranks.col(p).array() <= u) && (ranks.col(q).array() <= v)).count();
          worst = std::max(worst, std::abs(static_cast<double>(hits) / static_cast<double>(r) - u * v));
        }
      }
    }
  }
  return worst;
}

}  // namespace

std::vector<ChaosRow> chaos_diagnostic(const std::vector<TrajectoryTable>& runs, std::size_t j,
                                       std::size_t bootstrap_resamples, std::uint64_t seed) {
  if (runs.size() < 2) throw std::invalid_argument("chaos_diagnostic needs >= 2 replicas");
  if (j < 1 || j > 5) throw std::invalid_argument("chaos_diagnostic supports 1 <= j <= 5");
  const auto r = static_cast<Eigen::Index>(runs.size());
  const auto cols = static_cast<Eigen::Index>(j);
  std::vector<ChaosRow> out;
  for (std::size_t s = 0; s < runs.front().snapshots.size(); ++s) {
    Eigen::MatrixXd samples(r, cols);
    for (Eigen::Index i = 0; i < r; ++i) {
      const ChainSnapshot& snap = runs[static_cast<std::size_t>(i)].snapshots.at(s);
      if (snap.leading.size() < cols) {
        throw std::invalid_argument("chain stored fewer than j leading components");
      }
      samples.row(i) = snap.leading.head(cols).transpose();
    }
    ChaosRow row;
    row.t = runs.front().snapshots[s].t;
    if (j == 1) {
      row.correlation = row.square_correlation = Eigen::MatrixXd::Ones(1, 1);
      out.push_back(row);
      continue;
    }
    const Eigen::MatrixXd squares = samples.array().square().matrix();
    row.correlation = correlation(samples);
    row.square_correlation = correlation(squares);
    row.mean_square_correlation = mean_off_diagonal(row.square_correlation);
    row.copula_deviation = copula_deviation(samples);
    if (bootstrap_resamples >= 2) {
      Stream rng(seed, {tag(StreamTag::kBootstrap), 0x6368616fULL, s});
      std::uniform_int_distribution<Eigen::Index> pick(0, r - 1);
      std::vector<double> stats(bootstrap_resamples);
      Eigen::MatrixXd resample(r, cols);
      for (auto& stat : stats) {
        for (Eigen::Index i = 0; i < r; ++i) resample.row(i) = squares.row(pick(rng.engine()));
        stat = mean_off_diagonal(correlation(resample));
      }
      row.mean_square_correlation_se = standard_deviation(stats);
    }
    out.push_back(std::move(row));
  }
  return out;
}

double moment_increment_bound(double l, double v2_sup_positive, double dt) {
  const double l2 = l * l;
  return 2 * l2 * (dt + std::max(l2 * v2_sup_positive, 2 / std::numbers::pi) * dt * dt);
}

std::vector<MomentBoundRow> moment_bound_check(const EnsembleRun& run, const Potential& p) {
  std::vector<MomentBoundRow> rows;
  const auto& snaps = run.snapshots;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    for (std::size_t k = i; k < snaps.size(); ++k) {
      if (snaps[i].particles.size() != snaps[k].particles.size()) {
        throw std::invalid_argument("snapshots do not track the same particles");
      }
      const Eigen::ArrayXd sq = (snaps[k].particles - snaps[i].particles).square();
      const Estimate lhs = mean_and_se(std::span<const double>(sq.data(), sq.size()));
      MomentBoundRow row;
      row.s = snaps[i].t;
      row.t = snaps[k].t;
      row.lhs = lhs.value;
      row.lhs_se = lhs.standard_error;
      row.rhs = moment_increment_bound(run.l, p.v2_sup_positive(), row.t - row.s);
      row.pass = row.lhs <= row.rhs + 3 * row.lhs_se;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace rwm
