#pragma once

// End-to-end verification pipeline: closed forms, the stationary chain, the
// Gaussian transient regime across a ladder of dimensions, moment bounds and
// martingale defects. Every check is pinned to a fixed tolerance and writes
// its data as CSV under `out_dir`.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rwm {

struct BenchmarkConfig {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out_dir = "benchmark";

  // Gaussian identities against Monte Carlo
  std::size_t identity_draws = 20;
  std::size_t identity_samples = 10'000'000;

  // stationary chain
  std::size_t stationary_n = 100;
  std::size_t stationary_steps = 100'000;
  std::size_t stationary_replicas = 20;

  // Gaussian transient regime, init N(0, init_sd^2)
  std::vector<std::size_t> dimensions{10, 50, 200};
  std::size_t replicas = 2000;
  std::size_t particles = 100'000;
  double dt = 1e-3;
  double horizon = 5;
  double l = 2.38;
  double init_sd = 2;
  double record_spacing = 0.1;
  std::size_t stored_components = 5;
  std::size_t bootstrap_resamples = 200;

  // martingale defects on the stationary Gaussian ensemble
  std::size_t martingale_particles = 20'000;
  double martingale_horizon = 2;
  double martingale_spacing = 0.01;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

/// Runs criteria 1-9, writing CSVs into cfg.out_dir (created if needed) and
/// progress lines to `progress` when non-null.
std::vector<CriterionResult> run_full_benchmark(const BenchmarkConfig& cfg,
                                                std::ostream* progress = nullptr);

/// Files whose bytes differ between two output directories (or exist in one
/// only).
std::vector<std::string> diff_output_dirs(const std::string& a, const std::string& b);

/// Criterion 10: reruns the benchmark with `rerun_threads` into
/// cfg.out_dir + "_rerun" and compares every CSV with the first run's.
CriterionResult check_determinism(const BenchmarkConfig& cfg, unsigned rerun_threads,
                                  std::ostream* progress = nullptr);

/// "[PASS] criterion 3: ... | detail" line.
std::string format_result(const CriterionResult& r);

}  // namespace rwm
