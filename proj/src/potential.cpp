#include "rwm/potential.hpp"

#include "rwm/format.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rwm {
namespace {

Potential gaussian(double s) {
  if (!(s > 0) || !std::isfinite(s)) {
    throw std::invalid_argument("gaussian potential needs a positive scale");
  }
  const double inv = 1.0 / (s * s);
  Potential p;
  p.name = "gaussian";
  p.v = [inv](double x) { return 0.5 * x * x * inv; };
  p.v1 = [inv](double x) { return x * inv; };
  p.v2 = [inv](double) { return inv; };
  p.v3 = [](double) { return 0.0; };
  p.v2_sup = p.v2_inf = inv;
  p.v3_sup_abs = 0;
  p.exact_sampler = [s](Stream& rng) { return s * rng.gaussian(); };
  return p;
}

Potential logcosh() {
  Potential p;
  p.name = "logcosh";
  // log cosh x = |x| + log1p(e^{-2|x|}) - log 2, stable for large |x|.
  p.v = [](double x) {
    const double ax = std::abs(x);
    return ax + std::log1p(std::exp(-2 * ax)) - std::numbers::ln2;
  };
  p.v1 = [](double x) { return std::tanh(x); };
  p.v2 = [](double x) {
    const double c = std::cosh(x);
    return 1.0 / (c * c);
  };
  p.v3 = [](double x) {
    const double c = std::cosh(x);
    return -2.0 * std::tanh(x) / (c * c);
  };
  p.v2_sup = 1;
  p.v2_inf = 0;
  // max of 2 tanh sech^2 at tanh^2 = 1/3
  p.v3_sup_abs = 4.0 / (3.0 * std::sqrt(3.0));
  // density sech(x) / pi has cdf (2/pi) atan(e^x)
  p.exact_sampler = [](Stream& rng) {
    return std::log(std::tan(std::numbers::pi / 2 * rng.uniform()));
  };
  return p;
}

Potential perturbed_gaussian(double eps) {
  if (!(std::abs(eps) < 1)) {
    throw std::invalid_argument("perturbed_gaussian needs |eps| < 1");
  }
  Potential p;
  p.name = "perturbed_gaussian";
  p.v = [eps](double x) { return 0.5 * x * x + eps * std::cos(x); };
  p.v1 = [eps](double x) { return x - eps * std::sin(x); };
  p.v2 = [eps](double x) { return 1.0 - eps * std::cos(x); };
  p.v3 = [eps](double x) { return eps * std::sin(x); };
  p.v2_sup = 1 + std::abs(eps);
  p.v2_inf = 1 - std::abs(eps);
  p.v3_sup_abs = std::abs(eps);
  // rejection from N(0, 1): exp(-eps cos x) <= exp(|eps|)
  p.exact_sampler = [eps](Stream& rng) {
    for (;;) {
      const double x = rng.gaussian();
      if (std::log(rng.uniform()) <= -eps * std::cos(x) - std::abs(eps)) return x;
    }
  };
  return p;
}

Potential flat() {
  Potential p;
  p.name = "flat";
  p.v = p.v1 = p.v2 = p.v3 = [](double) { return 0.0; };
  p.integrable = false;
  return p;
}

}  // namespace

Potential builtin_potential(std::string_view name, std::span<const double> params) {
  auto expect = [&](std::size_t count) {
    if (params.size() != count) {
      throw std::invalid_argument("potential '" + std::string(name) + "' takes " +
                                  std::to_string(count) + " parameter(s)");
    }
  };
  if (name == "gaussian") {
    if (params.empty()) return gaussian(1.0);
    expect(1);
    return gaussian(params[0]);
  }
  if (name == "logcosh") {
    expect(0);
    return logcosh();
  }
  if (name == "perturbed_gaussian") {
    expect(1);
    return perturbed_gaussian(params[0]);
  }
  if (name == "flat") {
    expect(0);
    return flat();
  }
  throw std::invalid_argument("unknown potential '" + std::string(name) + "'");
}

Potential parse_potential(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string_view::npos) params = parse_double_list(spec.substr(colon + 1));
  return builtin_potential(name, params);
}

QuadratureResult compute_z_and_i(const Potential& p, double halfwidth, double tol) {
  if (!p.integrable) throw std::domain_error(p.name + ": exp(-V) is not integrable");
  if (!(halfwidth > 0) || !(tol > 0)) {
    throw std::invalid_argument("compute_z_and_i needs halfwidth > 0 and tol > 0");
  }
  const double v0 = p.v(0.0);
  const double edge = std::max(std::exp(v0 - p.v(-halfwidth)), std::exp(v0 - p.v(halfwidth)));
  if (!(edge < tol)) {
    throw std::domain_error(p.name + ": tail mass not negligible at halfwidth " +
                            std::to_string(halfwidth));
  }

  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  constexpr unsigned kMaxDepth = 20;
  auto weight = [&](double x) { return std::exp(v0 - p.v(x)); };
  double err_z = 0, err_a = 0, err_b = 0;
  const double z = Quad::integrate(weight, -halfwidth, halfwidth, kMaxDepth, tol, &err_z);
  const double a = Quad::integrate(
      [&](double x) {
        const double d = p.v1(x);
        return d * d * weight(x);
      },
      -halfwidth, halfwidth, kMaxDepth, tol, &err_a);
  const double b = Quad::integrate([&](double x) { return p.v2(x) * weight(x); }, -halfwidth,
                                   halfwidth, kMaxDepth, tol, &err_b);

  QuadratureResult r;
  r.z = z * std::exp(-v0);
  r.i_fisher = a / z;
  r.i_curvature = b / z;
  r.abs_err_estimate = std::max({err_z / z, err_a / z, err_b / z});
  if (!(r.abs_err_estimate <= tol)) {
    throw std::runtime_error(p.name + ": quadrature did not converge");
  }
  if (!(std::abs(r.i_fisher - r.i_curvature) <= 10 * tol)) {
    throw std::runtime_error(p.name + ": integration-by-parts identity violated");
  }
  return r;
}

}  // namespace rwm
