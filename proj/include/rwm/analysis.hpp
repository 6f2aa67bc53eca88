#pragma once

// Statistics that compare the finite-n chain with the limit process:
// marginal Wasserstein distances, acceptance curves, chaoticity diagnostics
// and moment-bound audits.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rwm/chain.hpp"
#include "rwm/limit_process.hpp"
#include "rwm/potential.hpp"

namespace rwm {

/// Exact W1 between two empirical measures, the integral of |F^-1 - G^-1|.
/// For equal sizes this is the mean of |x_(i) - y_(i)|.
double wasserstein1_1d(std::span<const double> xs, std::span<const double> ys);

struct Estimate {
  double value = 0;
  double standard_error = 0;
};

/// W1 together with a bootstrap standard error obtained by resampling `xs`
/// (the smaller chain sample); `ys` is treated as the reference law.
Estimate wasserstein1_bootstrap(std::span<const double> xs, std::span<const double> ys,
                                std::size_t resamples, std::uint64_t seed);

struct KsResult {
  double statistic = 0;
  double p_value = 1;
};

/// One-sample Kolmogorov-Smirnov test against N(mean, sd^2); p-value from the
/// Kolmogorov limit law with Stephens' finite-sample correction.
KsResult ks_test_normal(std::span<const double> sample, double mean = 0, double sd = 1);

/// argmax over l of h(l) = 2 l^2 Phi(-l sqrt(I) / 2).
double optimal_scale(double fisher);

/// Chain replicas cut at one record time.
struct ChainTimeSlice {
  double t = 0;
  std::vector<double> component1;  // X^1 across replicas
  std::vector<double> acc_window;  // windowed acceptance per replica
  std::vector<double> a_emp, b_emp;
  std::vector<double> second_moment;
};

/// Regroups replica tables by record time, with acceptance window `window`.
std::vector<ChainTimeSlice> slice_replicas(const std::vector<TrajectoryTable>& runs,
                                           std::size_t window);

/// Limit-process data needed for comparisons: its moment curve and,
/// optionally, particle marginals at some times.
struct LimitView {
  double l = 0;
  std::vector<MomentSample> curve;
  std::vector<double> marginal_times;
  std::vector<Eigen::ArrayXd> marginals;

  static LimitView from_run(const EnsembleRun& run);
  /// Curve entry closest to t.
  const MomentSample& moments_at(double t) const;
  /// Marginal recorded within 1e-9 of t, or nullptr.
  const Eigen::ArrayXd* marginal_at(double t) const;
};

struct ComparisonRow {
  double t = 0;
  double w1_chain_vs_limit = 0;  // nan without a limit marginal at t
  double w1_se = 0;
  double acc_emp = 0;
  double acc_emp_se = 0;
  double acc_pred = 0;
  double a_chain = 0;
  double a_chain_se = 0;
  double a_limit = 0;
  double b_chain = 0;
  double b_limit = 0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  std::size_t n = 0;
  std::size_t replicas = 0;
  std::size_t n_particles = 0;
};

/// Replica-averaged windowed acceptance against acc(a(t), b(t)) = Gamma / l^2
/// of the limit, together with W1 and moment comparisons at each slice time.
ComparisonReport compare_chain_to_limit(const std::vector<ChainTimeSlice>& slices,
                                        const LimitView& limit, std::size_t n,
                                        std::size_t bootstrap_resamples = 200,
                                        std::uint64_t seed = 0);

/// Acceptance rows only (acceptance_curve of the chain runs vs. the limit).
ComparisonReport acceptance_curve(const std::vector<TrajectoryTable>& runs,
                                  const LimitView& limit);

struct ChaosRow {
  double t = 0;
  Eigen::MatrixXd correlation;          // of X^1..X^j across replicas
  Eigen::MatrixXd square_correlation;   // of (X^1)^2..(X^j)^2
  double mean_square_correlation = 0;   // average off-diagonal entry
  double mean_square_correlation_se = 0;  // bootstrap over replicas
  double copula_deviation = 0;          // max over pairs and a 9x9 grid of |C(u,v) - uv|
};

/// Cross-component dependence of the first j coordinates at each record time.
/// j = 1 yields marginal-only rows (1x1 matrices, zero cross statistics).
std::vector<ChaosRow> chaos_diagnostic(const std::vector<TrajectoryTable>& runs, std::size_t j,
                                       std::size_t bootstrap_resamples = 200,
                                       std::uint64_t seed = 0);

struct MomentBoundRow {
  double s = 0;
  double t = 0;
  double lhs = 0;       // ensemble mean of (X_t - X_s)^2
  double lhs_se = 0;
  double rhs = 0;       // 2 l^2 [(t-s) + (l^2 sup(V'')^+ v 2/pi)(t-s)^2]
  bool pass = false;    // lhs <= rhs + 3 se
};

/// Explicit increment bound of the limit process.
double moment_increment_bound(double l, double v2_sup_positive, double dt);

/// Audits every pair of snapshots s < t (plus s = t) of the run. Snapshots
/// must track the same particles, i.e. have equal sizes.
std::vector<MomentBoundRow> moment_bound_check(const EnsembleRun& run, const Potential& p);

}  // namespace rwm
