#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "satcrb/coverage.hpp"
#include "satcrb/montecarlo.hpp"

using namespace satcrb;

namespace {

double binomial_at_least_four(int n, double p) {
  double below = 0.0, term = std::pow(1.0 - p, n);
  for (int m = 0; m <= 3; ++m) {
    below += term;
    term *= (n - m) / (m + 1.0) * p / (1.0 - p);
  }
  return 1.0 - below;
}

}  // namespace

TEST(Coverage, FrozenDefaults) {
  const CoverageResult c = coverage(SystemParams{});
  EXPECT_NEAR(c.p, 0.16493639025333168, 1e-15);
  EXPECT_NEAR(c.p_cov, 1.0, 1e-14);
}

TEST(Coverage, TwoFormsAgree) {
  // The distance form cancels for small altitudes, hence the looser tolerance.
  for (double h : {1.0, 100.0, 20000.0, 1e6})
    for (double deg : {1.0, 30.0, 60.0, 90.0}) {
      SystemParams p;
      p.h = h;
      p.phi_l_max = deg_to_rad(deg);
      EXPECT_NEAR(visibility_prob(p) / visibility_prob_distance_form(p), 1.0, 1e-8) << h << " " << deg;
    }
}

TEST(Coverage, HorizonLimit) {
  SystemParams p;
  p.phi_l_max = std::numbers::pi / 2;
  EXPECT_NEAR(visibility_prob(p), 0.5 * p.h / p.orbit_radius(), 1e-12);
}

TEST(Coverage, BinomialTailEdges) {
  EXPECT_EQ(prob_at_least_four(3, 0.9), 0.0);
  EXPECT_EQ(prob_at_least_four(10, 0.0), 0.0);
  EXPECT_EQ(prob_at_least_four(10, 1.0), 1.0);
  EXPECT_NEAR(prob_at_least_four(4, 0.5), 1.0 / 16.0, 1e-15);
  EXPECT_NEAR(prob_at_least_four(4, 0.3), std::pow(0.3, 4), 1e-15);
}

TEST(Coverage, BinomialTailMatchesDirectSum) {
  for (int n : {4, 5, 10, 50, 250})
    for (double p : {0.01, 0.1, 0.3, 0.7}) {
      const double direct = binomial_at_least_four(n, p);
      EXPECT_NEAR(prob_at_least_four(n, p), direct, 1e-12 + 1e-10 * direct) << n << " " << p;
    }
}

TEST(Coverage, TinyProbabilityStaysAccurate) {
  // P(X >= 4) ~ C(n, 4) p^4 for tiny p; the complement route would underflow to 0.
  const double p = 1e-5;
  const double leading = 250.0 * 249 * 248 * 247 / 24.0 * std::pow(p, 4);
  EXPECT_GE(prob_at_least_four(250, p), 0.0);
  EXPECT_LE(prob_at_least_four(250, p), 2.0 * leading + 1e-15);
}

TEST(Coverage, MonotoneInParameters) {
  SystemParams p;
  p.n_sats = 20;
  double prev = -1.0;
  for (double h = 100.0; h < 1e5; h *= 1.4) {
    p.h = h;
    EXPECT_GE(coverage_prob(p), prev);
    prev = coverage_prob(p);
  }
  p = SystemParams{};
  p.n_sats = 20;
  prev = -1.0;
  for (double deg = 1.0; deg <= 90.0; deg += 2.0) {
    p.phi_l_max = deg_to_rad(deg);
    EXPECT_GE(coverage_prob(p), prev);
    prev = coverage_prob(p);
  }
  p = SystemParams{};
  p.h = 1000.0;
  prev = -1.0;
  for (int n = 4; n <= 400; n += 12) {
    p.n_sats = n;
    EXPECT_GE(coverage_prob(p), prev);
    prev = coverage_prob(p);
  }
}

TEST(Coverage, FewerThanFourSatellitesNeverCover) {
  SystemParams p;
  p.n_sats = 3;
  EXPECT_EQ(coverage_prob(p), 0.0);
}

TEST(Coverage, MonteCarloAgreement) {
  SystemParams p;
  p.n_sats = 30;
  p.h = 1000.0;
  const double q = coverage_prob(p);
  const int trials = 10000;
  const double emp = empirical_coverage(p, trials, 77);
  EXPECT_LT(std::abs(emp - q), 4.0 * std::sqrt(q * (1 - q) / trials)) << q << " vs " << emp;
}

TEST(Coverage, DesignPointsReachTarget) {
  SystemParams p;
  p.n_sats = 60;
  p.h = 2000.0;
  const double angle = min_angle_for_coverage(p, 0.9);
  SystemParams q = p;
  q.phi_l_max = angle;
  EXPECT_GE(coverage_prob(q), 0.9);
  q.phi_l_max = angle - 2e-4;
  EXPECT_LT(coverage_prob(q), 0.9);

  p.phi_l_max = deg_to_rad(45.0);
  const double h = min_height_for_coverage(p, 0.9);
  q = p;
  q.h = h;
  EXPECT_GE(coverage_prob(q), 0.9);
  q.h = h - 2.0;
  EXPECT_LT(coverage_prob(q), 0.9);
}

TEST(Coverage, FrozenDesignPointsAtDefaults) {
  EXPECT_NEAR(min_angle_for_coverage(SystemParams{}, 0.9), 0.42759714462312248, 1e-4);
  EXPECT_NEAR(min_height_for_coverage(SystemParams{}, 0.9), 1996.612548828125, 1.0);
}

TEST(Coverage, UnachievableTargets) {
  SystemParams p;
  p.n_sats = 4;
  EXPECT_THROW(min_angle_for_coverage(p, 0.9), Unachievable);
  EXPECT_THROW(min_height_for_coverage(p, 0.9), Unachievable);
  p.n_sats = 3;
  EXPECT_THROW(min_angle_for_coverage(p, 0.5), Unachievable);
  EXPECT_THROW(min_angle_for_coverage(SystemParams{}, 1.0), InvalidConfig);
  EXPECT_THROW(min_height_for_coverage(SystemParams{}, 0.0), InvalidConfig);
}

TEST(Coverage, FourSatellitesNeedAllVisible) {
  SystemParams p;
  p.n_sats = 4;
  const double q = visibility_prob(p);
  EXPECT_NEAR(coverage_prob(p), std::pow(q, 4), 1e-15);
}
