#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace rwm {

template <typename Scalar = double>
inline constexpr Scalar kInvSqrt2 = Scalar(0.70710678118654752440084436210484903928L);

template <typename Scalar = double>
inline constexpr Scalar kInvSqrt2Pi = Scalar(0.39894228040143267793994605993438186848L);

template <typename Scalar = double>
inline constexpr Scalar kHalfLog2Pi = Scalar(0.91893853320467274178032973640561763986L);

/// Standard normal density.
template <typename Scalar>
Scalar normal_pdf(Scalar x) {
  return kInvSqrt2Pi<Scalar> * std::exp(-x * x / 2);
}

/// Standard normal cdf through erfc, accurate in both tails down to the
/// subnormal range.
template <typename Scalar>
Scalar normal_cdf(Scalar x) {
  return std::erfc(-x * kInvSqrt2<Scalar>) / 2;
}

/// Mills ratio (1 - Phi(z)) / phi(z) for z >= 8 by backward evaluation of the
/// Laplace continued fraction 1/(z+1/(z+2/(z+3/(z+...)))).
template <typename Scalar>
Scalar mills_ratio_tail(Scalar z) {
  if (std::isinf(z)) return Scalar(0);
  constexpr int kDepth = 64;
  Scalar t = 0;
  for (int k = kDepth; k >= 1; --k) t = Scalar(k) / (z + t);
  return Scalar(1) / (z + t);
}

/// log Phi(x). Below -8 the value comes from the Mills ratio so that it stays
/// finite long after Phi(x) itself has underflowed.
template <typename Scalar>
Scalar log_normal_cdf(Scalar x) {
  if (x < Scalar(-8)) {
    return -x * x / 2 - kHalfLog2Pi<Scalar> + std::log(mills_ratio_tail(-x));
  }
  if (x > Scalar(0)) return std::log1p(-normal_cdf(-x));
  return std::log(normal_cdf(x));
}

/// exp(e) * Phi(y) without overflow or underflow of the individual factors.
///
/// `tail_exponent` must equal e - y^2/2. Callers pass it in closed form so the
/// deep-tail branch (y < -8), where exp(e) and Phi(y) are both extreme, carries
/// no cancellation: there exp(e) Phi(y) = exp(e - y^2/2) R(-y) / sqrt(2 pi).
template <typename Scalar>
Scalar exp_times_normal_cdf(Scalar e, Scalar y, Scalar tail_exponent) {
  if (y < Scalar(-8)) {
    return std::exp(tail_exponent) * mills_ratio_tail(-y) * kInvSqrt2Pi<Scalar>;
  }
  if (e > Scalar(30)) return std::exp(e + log_normal_cdf(y));
  return std::exp(e) * normal_cdf(y);
}

}  // namespace rwm
