#pragma once

// Closed forms for Gaussian expectations of the Metropolis acceptance factor
// min(exp(alpha G + beta G~ + gamma), 1) with G, G~, G^ independent N(0, 1).

#include <cmath>
#include <stdexcept>

#include "rwm/coefficients.hpp"
#include "rwm/normal.hpp"

namespace rwm {

/// E[G (e^{alpha G + beta G~ + gamma} ^ 1)], written through the drift map as
/// alpha / l^2 * G((alpha^2 + beta^2) / l^2, -2 gamma / l^2). The value does not
/// depend on l; l only selects the parametrisation of G.
template <typename Scalar>
Scalar gaussian_exp_first(Scalar alpha, Scalar beta, Scalar gamma,
                          const ScalingParams<Scalar>& s) {
  if (alpha == 0) return Scalar(0);
  const Scalar l2 = s.l2();
  const MomentPair<Scalar> p((alpha * alpha + beta * beta) / l2, -2 * gamma / l2);
  return alpha / l2 * gee_coef(p, s);
}

/// E[G^2 (e^{alpha G + beta G~ + gamma} ^ 1)]. Requires (alpha, beta) != (0, 0).
template <typename Scalar>
Scalar gaussian_exp_second(Scalar alpha, Scalar beta, Scalar gamma) {
  const Scalar s2 = alpha * alpha + beta * beta;
  if (!(s2 > 0)) {
    throw std::invalid_argument("gaussian_exp_second: (alpha, beta) must not both vanish");
  }
  const Scalar rs = std::sqrt(s2);
  const Scalar gauss = std::exp(-gamma * gamma / (2 * s2));
  const Scalar head = exp_times_normal_cdf(gamma + s2 / 2, -(gamma + s2) / rs,
                                           -gamma * gamma / (2 * s2));
  return (1 + alpha * alpha) * head + normal_cdf(gamma / rs) -
         alpha * alpha * kInvSqrt2Pi<Scalar> / rs * gauss;
}

/// E[G G^ (e^{alpha G + beta G~ + delta G^ + gamma} ^ 1)]. Requires a nonzero
/// coefficient triple.
template <typename Scalar>
Scalar gaussian_exp_cross(Scalar alpha, Scalar beta, Scalar delta, Scalar gamma) {
  const Scalar s3 = alpha * alpha + beta * beta + delta * delta;
  if (!(s3 > 0)) {
    throw std::invalid_argument("gaussian_exp_cross: coefficients must not all vanish");
  }
  if (alpha == 0 || delta == 0) return Scalar(0);
  const Scalar rs = std::sqrt(s3);
  const Scalar tail = -gamma * gamma / (2 * s3);
  const Scalar head = exp_times_normal_cdf(gamma + s3 / 2, -(gamma + s3) / rs, tail);
  return alpha * delta * (head - std::exp(tail) * kInvSqrt2Pi<Scalar> / rs);
}

/// E[G(a, alpha G + beta)] = G(a + l^2 alpha^2 / 4, beta) for finite a >= 0.
template <typename Scalar>
Scalar gee_gaussian_smoothing(Scalar a, Scalar alpha, Scalar beta,
                              const ScalingParams<Scalar>& s) {
  if (!(a >= 0) || std::isinf(a)) {
    throw std::invalid_argument("gee_gaussian_smoothing: a must be finite and >= 0");
  }
  return gee_coef(MomentPair<Scalar>(a + s.l2() * alpha * alpha / 4, beta), s);
}

}  // namespace rwm
