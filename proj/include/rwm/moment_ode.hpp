#pragma once

// Second-moment ODE of the limit process for the Gaussian target V = x^2/2:
//   m' = Gamma(m, 1) - 2 m G(m, 1),  m(t) = E[X_t^2].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rwm/coefficients.hpp"

namespace rwm {

template <typename Scalar>
Scalar gaussian_rhs(Scalar m, Scalar l) {
  if (!(m >= 0)) throw std::invalid_argument("gaussian_rhs needs m >= 0");
  const ScalingParams<Scalar> s(l);
  const MomentPair<Scalar> p(m, Scalar(1));
  return gamma_coef(p, s) - 2 * m * gee_coef(p, s);
}

template <typename Scalar = double>
struct MomentCurve {
  std::vector<Scalar> t;
  std::vector<Scalar> m;
  // sup-norm difference against the same integration at dt / 2
  Scalar error_estimate = 0;
};

namespace detail {

template <typename Scalar>
std::vector<Scalar> rk4_trajectory(Scalar m0, Scalar l, Scalar horizon, std::size_t steps) {
  std::vector<Scalar> m(steps + 1);
  m[0] = m0;
  const Scalar h = horizon / static_cast<Scalar>(steps);
  auto f = [l](Scalar x) { return gaussian_rhs(std::max(x, Scalar(0)), l); };
  for (std::size_t k = 0; k < steps; ++k) {
    const Scalar x = m[k];
    const Scalar k1 = f(x);
    const Scalar k2 = f(x + h / 2 * k1);
    const Scalar k3 = f(x + h / 2 * k2);
    const Scalar k4 = f(x + h * k3);
    m[k + 1] = std::max(x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4), Scalar(0));
  }
  return m;
}

}  // namespace detail

/// Classical RK4 on [0, horizon] with ceil(horizon / dt) equal steps; the
/// same integration at half the step gives the error estimate.
template <typename Scalar>
MomentCurve<Scalar> integrate_moment_ode(Scalar m0, Scalar l, Scalar horizon, Scalar dt) {
  if (!(m0 >= 0)) throw std::invalid_argument("initial second moment must be >= 0");
  if (!(horizon >= 0) || !(dt > 0)) throw std::invalid_argument("need horizon >= 0, dt > 0");
  const auto steps = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(horizon / dt - Scalar(1e-9))));
  MomentCurve<Scalar> curve;
  curve.m = detail::rk4_trajectory(m0, l, horizon, steps);
  const std::vector<Scalar> fine = detail::rk4_trajectory(m0, l, horizon, 2 * steps);
  curve.t.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    curve.t[k] = horizon * static_cast<Scalar>(k) / static_cast<Scalar>(steps);
    curve.error_estimate = std::max(curve.error_estimate, std::abs(curve.m[k] - fine[2 * k]));
  }
  return curve;
}

/// Linear interpolation of the curve at t.
template <typename Scalar>
Scalar evaluate(const MomentCurve<Scalar>& curve, Scalar t) {
  if (curve.t.empty()) throw std::invalid_argument("empty moment curve");
  if (t <= curve.t.front()) return curve.m.front();
  if (t >= curve.t.back()) return curve.m.back();
  const auto it = std::upper_bound(curve.t.begin(), curve.t.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - curve.t.begin());
  const Scalar w = (t - curve.t[j - 1]) / (curve.t[j] - curve.t[j - 1]);
  return (1 - w) * curve.m[j - 1] + w * curve.m[j];
}

}  // namespace rwm
