#include "rwm/identity_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwm/coefficients.hpp"
#include "rwm/format.hpp"
#include "rwm/gaussian_identities.hpp"
#include "rwm/parallel.hpp"
#include "rwm/random.hpp"

namespace rwm {
namespace {

constexpr std::size_t kPairsPerChunk = 1 << 16;

// pair(rng) returns the average of the integrand at a draw and its mirror.
template <typename PairFn>
McEstimate antithetic_mean(std::size_t samples, std::uint64_t seed, unsigned threads,
                           PairFn pair) {
  const std::size_t pairs = std::max<std::size_t>(samples / 2, 2);
  const std::size_t chunks = (pairs + kPairsPerChunk - 1) / kPairsPerChunk;
  std::vector<double> sums(chunks), squares(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Stream rng(seed, {tag(StreamTag::kIdentityOracle), c});
    const std::size_t count = std::min(kPairsPerChunk, pairs - c * kPairsPerChunk);
    double s = 0, ss = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const double v = pair(rng);
      s += v;
      ss += v * v;
    }
    sums[c] = s;
    squares[c] = ss;
  });
  double s = 0, ss = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    s += sums[c];
    ss += squares[c];
  }
  const double np = static_cast<double>(pairs);
  const double mean = s / np;
  const double var = std::max(0.0, (ss - np * mean * mean) / (np - 1));
  return {mean, std::sqrt(var / np), 2 * pairs};
}

double accept(double exponent) { return exponent >= 0 ? 1.0 : std::exp(exponent); }

}  // namespace

McEstimate mc_gaussian_exp_first(double alpha, double beta, double gamma, std::size_t samples,
                                 std::uint64_t seed, unsigned threads) {
  return antithetic_mean(samples, seed, threads, [=](Stream& rng) {
    const double g = rng.gaussian(), h = rng.gaussian();
    const double e = alpha * g + beta * h;
    return 0.5 * (g * accept(e + gamma) - g * accept(-e + gamma));
  });
}

McEstimate mc_gaussian_exp_second(double alpha, double beta, double gamma, std::size_t samples,
                                  std::uint64_t seed, unsigned threads) {
  return antithetic_mean(samples, seed, threads, [=](Stream& rng) {
    const double g = rng.gaussian(), h = rng.gaussian();
    const double e = alpha * g + beta * h;
    return 0.5 * g * g * (accept(e + gamma) + accept(-e + gamma));
  });
}

McEstimate mc_gaussian_exp_cross(double alpha, double beta, double delta, double gamma,
                                 std::size_t samples, std::uint64_t seed, unsigned threads) {
  return antithetic_mean(samples, seed, threads, [=](Stream& rng) {
    const double g = rng.gaussian(), h = rng.gaussian(), k = rng.gaussian();
    const double e = alpha * g + beta * h + delta * k;
    return 0.5 * g * k * (accept(e + gamma) + accept(-e + gamma));
  });
}

McEstimate mc_gee_smoothing(double a, double alpha, double beta, double l, std::size_t samples,
                            std::uint64_t seed, unsigned threads) {
  const ScalingParams<double> s(l);
  return antithetic_mean(samples, seed, threads, [=](Stream& rng) {
    const double g = rng.gaussian();
    return 0.5 * (gee_coef(MomentPair<double>(a, alpha * g + beta), s) +
                  gee_coef(MomentPair<double>(a, -alpha * g + beta), s));
  });
}

bool IdentityCheck::pass(double z_limit) const { return std::abs(z_score) <= z_limit; }

namespace {

double draw_in(Stream& rng, double lo, double hi) { return lo + (hi - lo) * (1.0 - rng.uniform()); }

// magnitude in [lo, hi] with a random sign
double draw_signed(Stream& rng, double lo, double hi) {
  const double m = draw_in(rng, lo, hi);
  return rng.uniform() <= 0.5 ? -m : m;
}

std::string join_params(std::initializer_list<std::pair<const char*, double>> kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ';';
    out += k;
    out += '=';
    out += format_double(v);
  }
  return out;
}

IdentityCheck finish(std::string identity, std::string params, double closed, const McEstimate& mc) {
  IdentityCheck c{std::move(identity), std::move(params), closed, mc.mean, mc.standard_error, 0};
  c.z_score = mc.standard_error > 0 ? (closed - mc.mean) / mc.standard_error
                                    : (closed == mc.mean ? 0.0 : HUGE_VAL);
  return c;
}

}  // namespace

std::vector<IdentityCheck> verify_closed_forms(std::size_t draws, std::size_t samples,
                                               std::uint64_t seed, unsigned threads) {
  Stream params(seed, {tag(StreamTag::kIdentityOracle), 0x706172616d73ULL});
  std::vector<IdentityCheck> out;
  std::uint64_t oracle_seed = mix64(seed);
  auto next_seed = [&] { return oracle_seed = mix64(oracle_seed); };

  for (std::size_t d = 0; d < draws; ++d) {
    const double alpha = draw_signed(params, 0.1, 1.5);
    const double beta = draw_in(params, -1.5, 1.5);
    const double gamma = draw_in(params, -1.5, 1.5);
    const double l = draw_in(params, 0.5, 3.0);
    const double closed = gaussian_exp_first(alpha, beta, gamma, ScalingParams<double>(l));
    out.push_back(finish("exp_first",
                         join_params({{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}, {"l", l}}),
                         closed, mc_gaussian_exp_first(alpha, beta, gamma, samples, next_seed(), threads)));
  }
  for (std::size_t d = 0; d < draws; ++d) {
    const double alpha = draw_in(params, -1.5, 1.5);
    const double beta = draw_signed(params, 0.1, 1.5);
    const double gamma = draw_in(params, -1.5, 1.5);
    out.push_back(finish("exp_second",
                         join_params({{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}}),
                         gaussian_exp_second(alpha, beta, gamma),
                         mc_gaussian_exp_second(alpha, beta, gamma, samples, next_seed(), threads)));
  }
  for (std::size_t d = 0; d < draws; ++d) {
    const double alpha = draw_signed(params, 0.1, 1.5);
    const double beta = draw_in(params, -1.5, 1.5);
    const double delta = draw_signed(params, 0.1, 1.5);
    const double gamma = draw_in(params, -1.5, 1.5);
    out.push_back(finish(
        "exp_cross",
        join_params({{"alpha", alpha}, {"beta", beta}, {"delta", delta}, {"gamma", gamma}}),
        gaussian_exp_cross(alpha, beta, delta, gamma),
        mc_gaussian_exp_cross(alpha, beta, delta, gamma, samples, next_seed(), threads)));
  }
  for (std::size_t d = 0; d < draws; ++d) {
    const double a = draw_in(params, 0.05, 3.0);
    const double alpha = draw_in(params, -2.0, 2.0);
    const double beta = draw_in(params, -2.0, 2.0);
    const double l = draw_in(params, 0.5, 3.0);
    out.push_back(finish(
        "gee_smoothing",
        join_params({{"a", a}, {"alpha", alpha}, {"beta", beta}, {"l", l}}),
        gee_gaussian_smoothing(a, alpha, beta, ScalingParams<double>(l)),
        mc_gee_smoothing(a, alpha, beta, l, samples, next_seed(), threads)));
  }
  return out;
}

}  // namespace rwm
