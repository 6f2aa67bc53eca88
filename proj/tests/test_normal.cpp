#include <cmath>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "rwm/normal.hpp"

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

// Phi in 50 decimal digits.
Wide wide_cdf(double x) {
  const Wide w = Wide(x) / boost::multiprecision::sqrt(Wide(2));
  return boost::math::erfc(-w) / 2;
}

TEST(NormalCdf, Examples) {
  EXPECT_DOUBLE_EQ(rwm::normal_cdf(0.0), 0.5);
  EXPECT_NEAR(rwm::normal_cdf(-1.19), 0.117023, 1e-6);
  EXPECT_NEAR(rwm::normal_cdf(40.0), 1.0, 1e-15);
}

TEST(NormalCdf, MatchesWidePrecisionOracle) {
  for (double x = -8.0; x <= 8.0; x += 0.0625) {
    const double expected = static_cast<double>(wide_cdf(x));
    EXPECT_NEAR(rwm::normal_cdf(x), expected, 1e-14 * expected) << "x = " << x;
  }
}

TEST(LogNormalCdf, Examples) {
  EXPECT_NEAR(rwm::log_normal_cdf(0.0), std::log(0.5), 1e-15);
  // leading asymptotic term -x^2/2 - log(-x sqrt(2 pi)) = -804.6078; 40-digit value -804.60844
  EXPECT_NEAR(rwm::log_normal_cdf(-40.0), -804.6084420137538, 1e-12);
  EXPECT_NEAR(rwm::log_normal_cdf(5.0), -2.8665e-7, 1e-10);
}

TEST(LogNormalCdf, MatchesWidePrecisionOracleInDeepTail) {
  for (double x : {-8.5, -10.0, -15.0, -25.0, -37.0, -40.0, -60.0}) {
    const double expected = static_cast<double>(boost::multiprecision::log(wide_cdf(x)));
    EXPECT_NEAR(rwm::log_normal_cdf(x), expected, 1e-13 * std::abs(expected)) << "x = " << x;
  }
  for (double x : {0.5, 2.0, 5.0, 8.0, 12.0}) {
    const double expected = static_cast<double>(boost::multiprecision::log(wide_cdf(x)));
    EXPECT_NEAR(rwm::log_normal_cdf(x), expected, 1e-13 * std::abs(expected)) << "x = " << x;
  }
}

TEST(LogNormalCdf, ContinuousAcrossBranchPoint) {
  const double below = rwm::log_normal_cdf(std::nextafter(-8.0, -9.0));
  const double at = rwm::log_normal_cdf(-8.0);
  EXPECT_NEAR(below, at, 1e-12 * std::abs(at));
}

TEST(ExpTimesNormalCdf, FiniteWhereFactorsOverflow) {
  // e^{e} Phi(y) with e = 800, y = -45: both factors are out of range
  const double e = 800.0, y = -45.0;
  const Wide expected = boost::multiprecision::exp(Wide(e)) * wide_cdf(y);
  const double got = rwm::exp_times_normal_cdf(e, y, e - y * y / 2);
  EXPECT_NEAR(got, static_cast<double>(expected), 1e-12 * static_cast<double>(expected));
}

TEST(ExpTimesNormalCdf, LargeExponentModerateCdf) {
  const double e = 40.0, y = -3.0;
  const double expected = static_cast<double>(boost::multiprecision::exp(Wide(e)) * wide_cdf(y));
  EXPECT_NEAR(rwm::exp_times_normal_cdf(e, y, e - y * y / 2), expected, 1e-13 * expected);
}

TEST(MillsRatio, Limits) {
  EXPECT_EQ(rwm::mills_ratio_tail(HUGE_VAL), 0.0);
  // R(z) ~ 1/z - 1/z^3
  const double z = 1e4;
  EXPECT_NEAR(rwm::mills_ratio_tail(z), 1 / z - 1 / (z * z * z), 1e-18);
}

}  // namespace
