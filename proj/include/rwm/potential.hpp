#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rwm/random.hpp"

namespace rwm {

/// One-dimensional potential V of the product target prod_i exp(-V(x_i)) / Z,
/// with analytic derivatives and curvature bounds
/// v2_inf <= V'' <= v2_sup, |V'''| <= v3_sup_abs.
///
/// Builtins carry exact bounds. For user potentials the bounds are asserted by
/// the caller.
struct Potential {
  using Fn = std::function<double(double)>;

  std::string name;
  Fn v, v1, v2, v3;
  double v2_sup = 0;
  double v2_inf = 0;
  double v3_sup_abs = 0;
  // Exact i.i.d. sampler for exp(-V) / Z, when one is known.
  std::function<double(Stream&)> exact_sampler;
  // False when exp(-V) is known not to be integrable.
  bool integrable = true;

  double v2_sup_positive() const { return v2_sup > 0 ? v2_sup : 0.0; }
};

/// Builtins: gaussian(s) V = x^2/(2 s^2); logcosh V = log cosh x;
/// perturbed_gaussian(eps) V = x^2/2 + eps cos x with |eps| < 1;
/// flat V = 0 (not integrable). Throws std::invalid_argument on an unknown
/// name or out-of-range parameters.
Potential builtin_potential(std::string_view name, std::span<const double> params = {});

/// Parses "name" or "name:p1,p2,..." (e.g. "gaussian:1.0").
Potential parse_potential(std::string_view spec);

struct QuadratureResult {
  double z = 0;             // normaliser of exp(-V)
  double i_fisher = 0;      // int V'^2 exp(-V) / Z
  double i_curvature = 0;   // int V'' exp(-V) / Z, equal to i_fisher by parts
  double abs_err_estimate = 0;
};

/// Adaptive Gauss-Kronrod quadrature of Z and I on [-halfwidth, halfwidth].
///
/// The truncation has to be certified: exp(-V(+-halfwidth)) < tol exp(-V(0)),
/// otherwise std::domain_error. Also throws std::runtime_error when the
/// quadrature does not reach `tol` or the integration-by-parts identity
/// int V'^2 e^{-V} = int V'' e^{-V} fails by more than 10 tol.
QuadratureResult compute_z_and_i(const Potential& p, double halfwidth, double tol);

/// Elementwise V' and V'' over an array.
template <typename Derived>
Eigen::ArrayXd apply(const Potential::Fn& f, const Eigen::DenseBase<Derived>& xs) {
  Eigen::ArrayXd out(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) out(i) = f(xs.derived().coeff(i));
  return out;
}

}  // namespace rwm
