#pragma once

// Diffusion and drift coefficient maps of the mean-field limit of random walk
// Metropolis with proposal variance l^2/n, as functions of the moment pair
// (a, b) = (E[V'(X)^2], E[V''(X)]).

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rwm/normal.hpp"

namespace rwm {

/// Proposal scale constant l, with sigma_n^2 = l^2 / n.
template <typename Scalar = double>
struct ScalingParams {
  Scalar l;

  explicit ScalingParams(Scalar scale) : l(scale) {
    if (!(scale > 0) || !std::isfinite(scale)) {
      throw std::invalid_argument("scaling constant l must be positive and finite");
    }
  }

  Scalar l2() const { return l * l; }
};

/// (a, b) = (<mu, V'^2>, <mu, V''>). a lives in [0, +inf], the infinite end
/// represented by the floating-point infinity.
template <typename Scalar = double>
struct MomentPair {
  Scalar a;
  Scalar b;

  MomentPair(Scalar a_, Scalar b_) : a(a_), b(b_) {
    if (!(a_ >= 0)) throw std::invalid_argument("moment a must be >= 0 or +inf");
    if (!std::isfinite(b_)) throw std::invalid_argument("moment b must be finite");
  }
};

namespace detail {

// Below this, a is on the a -> 0+ branch for Gamma (which is continuous there).
template <typename Scalar>
inline constexpr Scalar kTinyMoment = Scalar(1e-300);

// l^2 exp(l^2 (a - b) / 2) Phi(l (b / (2 sqrt a) - sqrt a)) for finite a > 0.
template <typename Scalar>
Scalar drift_term(Scalar a, Scalar b, Scalar l) {
  const Scalar l2 = l * l;
  const Scalar sa = std::sqrt(a);
  const Scalar exponent = l2 * (a - b) / 2;
  const Scalar y = l * (b / (2 * sa) - sa);
  const Scalar tail_exponent = -l2 * b * b / (8 * a);
  return l2 * exp_times_normal_cdf(exponent, y, tail_exponent);
}

}  // namespace detail

/// Diffusion coefficient Gamma(a, b), always in [0, l^2].
template <typename Scalar>
Scalar gamma_coef(const MomentPair<Scalar>& p, const ScalingParams<Scalar>& s) {
  const Scalar l = s.l;
  const Scalar l2 = s.l2();
  if (std::isinf(p.a)) return l2 / 2;
  if (p.a < detail::kTinyMoment<Scalar>) {
    return l2 * std::exp(-l2 * std::max(p.b, Scalar(0)) / 2);
  }
  const Scalar diffusive = l2 * normal_cdf(-l * p.b / (2 * std::sqrt(p.a)));
  return std::clamp(diffusive + detail::drift_term(p.a, p.b, l), Scalar(0), l2);
}

/// Drift coefficient G(a, b) multiplying -V'(x). Discontinuous at (0, 0).
template <typename Scalar>
Scalar gee_coef(const MomentPair<Scalar>& p, const ScalingParams<Scalar>& s) {
  const Scalar l2 = s.l2();
  if (std::isinf(p.a)) return Scalar(0);
  if (p.a == 0) return p.b > 0 ? l2 * std::exp(-l2 * p.b / 2) : Scalar(0);
  return std::clamp(detail::drift_term(p.a, p.b, s.l), Scalar(0), l2);
}

/// Limiting mean acceptance probability Gamma(a, b) / l^2.
template <typename Scalar>
Scalar acc_rate(const MomentPair<Scalar>& p, const ScalingParams<Scalar>& s) {
  return gamma_coef(p, s) / s.l2();
}

/// Speed of the stationary limiting diffusion, 2 l^2 Phi(-l sqrt(I) / 2).
template <typename Scalar>
Scalar h_of_l(Scalar l, Scalar fisher) {
  if (!(l > 0) || !(fisher > 0)) {
    throw std::invalid_argument("h_of_l needs l > 0 and I > 0");
  }
  return 2 * l * l * normal_cdf(-l * std::sqrt(fisher) / 2);
}

}  // namespace rwm
