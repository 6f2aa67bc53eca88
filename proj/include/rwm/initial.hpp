#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "rwm/potential.hpp"
#include "rwm/random.hpp"

namespace rwm {

/// I.i.d. (hence exchangeable) initial law shared by the chain coordinates and
/// the limit-process particles.
struct InitialDistribution {
  enum class Kind { kNormal, kUniform, kStationary, kPoint };

  Kind kind = Kind::kNormal;
  double first = 0;   // mean | lower bound | point
  double second = 1;  // sd | upper bound
  std::size_t burnin = 1000;  // stationary draws without an exact sampler

  static InitialDistribution normal(double mean, double sd);
  static InitialDistribution uniform(double lo, double hi);
  static InitialDistribution stationary(std::size_t burnin = 1000);
  static InitialDistribution point(double x0);

  /// One draw. Stationary draws use the potential's exact sampler when there is
  /// one, otherwise the end of a 1-D Metropolis chain of `burnin` steps.
  double draw(const Potential& p, Stream& rng) const;

  /// Round-trips through parse_initial.
  std::string describe() const;
};

/// "normal:mean,sd", "uniform:lo,hi", "stationary[:burnin]", "point:x0".
InitialDistribution parse_initial(std::string_view spec);

}  // namespace rwm
