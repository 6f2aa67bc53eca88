#pragma once

// Monte Carlo counterparts of the closed-form Gaussian identities, used to
// cross-check them.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rwm {

struct McEstimate {
  double mean = 0;
  double standard_error = 0;
  std::size_t samples = 0;
};

/// Each oracle averages antithetic pairs (noise, -noise) in fixed chunks of
/// independent streams derived from `seed`; `samples` counts single draws.
McEstimate mc_gaussian_exp_first(double alpha, double beta, double gamma, std::size_t samples,
                                 std::uint64_t seed, unsigned threads = 0);
McEstimate mc_gaussian_exp_second(double alpha, double beta, double gamma, std::size_t samples,
                                  std::uint64_t seed, unsigned threads = 0);
McEstimate mc_gaussian_exp_cross(double alpha, double beta, double delta, double gamma,
                                 std::size_t samples, std::uint64_t seed, unsigned threads = 0);
/// Average of G(a, alpha G + beta) under the scale l.
McEstimate mc_gee_smoothing(double a, double alpha, double beta, double l, std::size_t samples,
                            std::uint64_t seed, unsigned threads = 0);

struct IdentityCheck {
  std::string identity;  // exp_first | exp_second | exp_cross | gee_smoothing
  std::string params;    // "alpha=...;beta=...;..."
  double closed_form = 0;
  double mc_mean = 0;
  double mc_se = 0;
  double z_score = 0;

  bool pass(double z_limit = 3.0) const;
};

/// `draws` randomised parameter sets per identity, each checked against an MC
/// oracle with `samples` draws.
std::vector<IdentityCheck> verify_closed_forms(std::size_t draws, std::size_t samples,
                                               std::uint64_t seed, unsigned threads = 0);

}  // namespace rwm
