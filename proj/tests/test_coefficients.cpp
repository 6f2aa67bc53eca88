#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "rwm/coefficients.hpp"

namespace {

using rwm::MomentPair;
using rwm::ScalingParams;

double gamma(double a, double b, double l) { return rwm::gamma_coef(MomentPair(a, b), ScalingParams(l)); }
double gee(double a, double b, double l) { return rwm::gee_coef(MomentPair(a, b), ScalingParams(l)); }

// Phi(-1.19) to 16 digits, from a 50-digit erfc evaluation
constexpr double kPhiMinus119 = 0.11702319602310873;

const std::vector<double> kScales{0.5, 1.0, 2.38, 5.0};

std::vector<double> a_grid() {
  std::vector<double> as{0.0, HUGE_VAL};
  for (int i = 0; i < 98; ++i) as.push_back(std::pow(10.0, -6.0 + 12.0 * i / 97.0));
  return as;
}

std::vector<double> b_grid(double lo = -50, double hi = 50, int count = 201) {
  std::vector<double> bs;
  for (int i = 0; i < count; ++i) bs.push_back(lo + (hi - lo) * i / (count - 1));
  return bs;
}

TEST(GammaCoef, Examples) {
  EXPECT_DOUBLE_EQ(gamma(HUGE_VAL, 3, 1), 0.5);
  EXPECT_DOUBLE_EQ(gamma(0, -1, 2), 4.0);
  EXPECT_NEAR(gamma(1, 1, 2.38), 2 * 2.38 * 2.38 * kPhiMinus119, 1e-13);
  EXPECT_NEAR(gamma(1, 1, 2.38), 1.32573238310659, 1e-13);
}

TEST(GeeCoef, Examples) {
  EXPECT_EQ(gee(HUGE_VAL, -2, 1.5), 0.0);
  EXPECT_EQ(gee(0, 0, 1), 0.0);
  EXPECT_NEAR(gee(1, 1, 2.38), 2.38 * 2.38 * kPhiMinus119, 1e-13);
  EXPECT_NEAR(gee(1, 1, 2.38), 0.66286619155330, 1e-13);
}

TEST(AccRate, Examples) {
  EXPECT_NEAR(rwm::acc_rate(MomentPair(1.0, 1.0), ScalingParams(2.38)), 2 * kPhiMinus119, 1e-14);
  EXPECT_NEAR(rwm::acc_rate(MomentPair(1.0, 1.0), ScalingParams(2.38)), 0.2340, 5e-5);
  for (double l : kScales) {
    EXPECT_DOUBLE_EQ(rwm::acc_rate(MomentPair(HUGE_VAL, 7.0), ScalingParams(l)), 0.5);
    EXPECT_DOUBLE_EQ(rwm::acc_rate(MomentPair(0.0, -5.0), ScalingParams(l)), 1.0);
  }
}

TEST(HOfL, Examples) {
  EXPECT_NEAR(rwm::h_of_l(2.38, 1.0), 2 * 2.38 * 2.38 * kPhiMinus119, 1e-13);
  EXPECT_LT(rwm::h_of_l(1e-6, 1.0), 1e-11);
  EXPECT_THROW(rwm::h_of_l(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(rwm::h_of_l(1.0, -1.0), std::invalid_argument);
}

TEST(Coefficients, RejectInvalidInputs) {
  EXPECT_THROW(ScalingParams(0.0), std::invalid_argument);
  EXPECT_THROW(ScalingParams(-1.0), std::invalid_argument);
  EXPECT_THROW(ScalingParams{HUGE_VAL}, std::invalid_argument);
  EXPECT_THROW(MomentPair(-1e-3, 0.0), std::invalid_argument);
  EXPECT_THROW(MomentPair(std::nan(""), 0.0), std::invalid_argument);
  EXPECT_THROW(MomentPair(1.0, HUGE_VAL), std::invalid_argument);
}

TEST(Coefficients, StationaryIdentity) {
  for (double l : kScales) {
    for (double fisher : {0.01, 0.25, 1.0, 4.0, 100.0}) {
      const double h = rwm::h_of_l(l, fisher);
      EXPECT_NEAR(gamma(fisher, fisher, l), h, 1e-12) << l << " " << fisher;
      EXPECT_NEAR(2 * gee(fisher, fisher, l), h, 1e-12) << l << " " << fisher;
    }
  }
}

TEST(Coefficients, OrderedBoundsOnGrid) {
  for (double l : kScales) {
    for (double a : a_grid()) {
      for (double b : b_grid()) {
        const double g = gamma(a, b, l), d = gee(a, b, l);
        ASSERT_TRUE(std::isfinite(g) && std::isfinite(d)) << a << " " << b;
        EXPECT_GE(d, -1e-12) << a << " " << b;
        EXPECT_LE(d, g + 1e-12) << a << " " << b;
        EXPECT_LE(g, l * l + 1e-12) << a << " " << b;
      }
    }
  }
}

TEST(Coefficients, GammaNonIncreasingInB) {
  for (double l : kScales) {
    for (double a : a_grid()) {
      if (a == 0 || std::isinf(a)) continue;
      double prev = HUGE_VAL;
      for (double b : b_grid(-50, 50, 2001)) {
        const double g = gamma(a, b, l);
        EXPECT_LE(g, prev + 1e-12 * l * l) << "a=" << a << " b=" << b;
        prev = g;
      }
    }
  }
}

TEST(Coefficients, GammaPositiveOnCompactB) {
  for (double l : kScales) {
    double lowest = HUGE_VAL;
    for (double a : a_grid()) {
      for (double b : b_grid(-5, 5, 41)) lowest = std::min(lowest, gamma(a, b, l));
    }
    EXPECT_GT(lowest, 0.0) << l;
  }
}

TEST(Coefficients, GeeTailBound) {
  for (double l : kScales) {
    for (double a : a_grid()) {
      if (std::isinf(a)) continue;
      for (double b : b_grid()) {
        const double bound = std::max(l * l * std::sqrt(std::max(b, 0.0)), 2 * l / std::sqrt(2 * M_PI));
        EXPECT_LE(std::sqrt(a) * gee(a, b, l), bound * (1 + 1e-12)) << a << " " << b;
      }
    }
  }
}

TEST(Coefficients, BehaviourAtOrigin) {
  for (double l : kScales) {
    // G jumps at (0, 0), Gamma does not
    EXPECT_NEAR(gee(0, 1e-12, l), l * l, 1e-9);
    EXPECT_EQ(gee(0, 0, l), 0.0);
    EXPECT_NEAR(gamma(0, 1e-12, l), l * l, 1e-9);
    EXPECT_NEAR(gamma(0, -1e-12, l), l * l, 1e-9);
    // Gamma(a, 0) = l^2 (1 - l sqrt(a) / sqrt(2 pi) + O(a))
    EXPECT_NEAR(gamma(1e-30, 0, l), l * l, 1e-9);
    EXPECT_NEAR(gamma(1e-20, 0, l), l * l * (1 - l * 1e-10 / std::sqrt(2 * M_PI)), 1e-12);
  }
}

TEST(Coefficients, ContinuousAsAShrinksToZero) {
  // for b != 0, Gamma(a, b) and G(a, b) tend to the a = 0 branch
  for (double l : kScales) {
    for (double b : {-2.0, -0.5, 0.5, 2.0}) {
      EXPECT_NEAR(gamma(1e-14, b, l), gamma(0, b, l), 1e-6 * l * l) << l << " " << b;
      EXPECT_NEAR(gee(1e-14, b, l), gee(0, b, l), 1e-6 * l * l) << l << " " << b;
    }
  }
}

TEST(Coefficients, LargeAApproachesInfiniteBranch) {
  for (double l : kScales) {
    EXPECT_NEAR(gamma(1e12, 1.0, l), l * l / 2, 1e-3 * l * l);
    EXPECT_NEAR(gee(1e12, 1.0, l), 0.0, 1e-3 * l * l);
  }
}

TEST(Coefficients, FloatScalar) {
  const float g = rwm::gamma_coef(MomentPair(1.0f, 1.0f), ScalingParams(2.38f));
  EXPECT_NEAR(g, 1.3257324f, 1e-5f);
}

}  // namespace
