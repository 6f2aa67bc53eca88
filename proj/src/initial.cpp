#include "rwm/initial.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rwm/format.hpp"

namespace rwm {

InitialDistribution InitialDistribution::normal(double mean, double sd) {
  if (!std::isfinite(mean) || !(sd > 0) || !std::isfinite(sd)) {
    throw std::invalid_argument("normal initial law needs finite mean and sd > 0");
  }
  return {Kind::kNormal, mean, sd, 0};
}

InitialDistribution InitialDistribution::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw std::invalid_argument("uniform initial law needs finite lo < hi");
  }
  return {Kind::kUniform, lo, hi, 0};
}

InitialDistribution InitialDistribution::stationary(std::size_t burnin) {
  return {Kind::kStationary, 0, 0, burnin};
}

InitialDistribution InitialDistribution::point(double x0) {
  if (!std::isfinite(x0)) throw std::invalid_argument("point initial law needs finite x0");
  return {Kind::kPoint, x0, 0, 0};
}

double InitialDistribution::draw(const Potential& p, Stream& rng) const {
  switch (kind) {
    case Kind::kNormal:
      return first + second * rng.gaussian();
    case Kind::kUniform:
      return first + (second - first) * (1.0 - rng.uniform());
    case Kind::kPoint:
      return first;
    case Kind::kStationary: {
      if (!p.integrable) {
        throw std::invalid_argument(p.name + " has no stationary law to start from");
      }
      if (p.exact_sampler) return p.exact_sampler(rng);
      const double step = p.v2_sup > 0 ? 2.38 / std::sqrt(p.v2_sup) : 1.0;
      double x = 0, vx = p.v(0.0);
      for (std::size_t k = 0; k < burnin; ++k) {
        const double y = x + step * rng.gaussian();
        const double vy = p.v(y);
        if (std::log(rng.uniform()) <= vx - vy) {
          x = y;
          vx = vy;
        }
      }
      return x;
    }
  }
  return 0;
}

std::string InitialDistribution::describe() const {
  switch (kind) {
    case Kind::kNormal:
      return "normal:" + format_double(first) + "," + format_double(second);
    case Kind::kUniform:
      return "uniform:" + format_double(first) + "," + format_double(second);
    case Kind::kStationary:
      return "stationary:" + std::to_string(burnin);
    case Kind::kPoint:
      return "point:" + format_double(first);
  }
  return {};
}

InitialDistribution parse_initial(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string_view::npos) args = parse_double_list(spec.substr(colon + 1));
  auto expect = [&](std::size_t count) {
    if (args.size() != count) {
      throw std::invalid_argument("initial law '" + std::string(kind) + "' takes " +
                                  std::to_string(count) + " argument(s)");
    }
  };
  if (kind == "normal") {
    expect(2);
    return InitialDistribution::normal(args[0], args[1]);
  }
  if (kind == "uniform") {
    expect(2);
    return InitialDistribution::uniform(args[0], args[1]);
  }
  if (kind == "point") {
    expect(1);
    return InitialDistribution::point(args[0]);
  }
  if (kind == "stationary") {
    if (args.empty()) return InitialDistribution::stationary();
    expect(1);
    if (!(args[0] >= 0) || args[0] != std::floor(args[0])) {
      throw std::invalid_argument("stationary burn-in must be a nonnegative integer");
    }
    return InitialDistribution::stationary(static_cast<std::size_t>(args[0]));
  }
  throw std::invalid_argument("unknown initial law '" + std::string(kind) + "'");
}

}  // namespace rwm
