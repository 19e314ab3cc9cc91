#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "satcrb/coverage.hpp"
#include "satcrb/geometry.hpp"
#include "satcrb/random.hpp"

using namespace satcrb;

namespace {

double law_of_cosines(double phi_e, const SystemParams& p) {
  const double big_r = p.orbit_radius();
  return std::sqrt(big_r * big_r + p.r * p.r - 2.0 * p.r * big_r * std::cos(phi_e));
}

}  // namespace

TEST(Geometry, SamplingIsDeterministic) {
  SystemParams p;
  p.n_sats = 1;
  const auto a = sample_constellation(p, 42), b = sample_constellation(p, 42);
  ASSERT_EQ(a.sats.size(), 1u);
  EXPECT_EQ(a.sats[0].phi_e, b.sats[0].phi_e);
  EXPECT_EQ(a.sats[0].theta, b.sats[0].theta);
  const auto c = sample_constellation(p, 43);
  EXPECT_NE(a.sats[0].phi_e, c.sats[0].phi_e);
}

TEST(Geometry, StreamsAreDistinct) {
  SystemParams p;
  p.n_sats = 4;
  const auto a = sample_constellation(p, 1, 250, 0), b = sample_constellation(p, 1, 250, 1);
  EXPECT_NE(a.sats[0].phi_e, b.sats[0].phi_e);
}

TEST(Geometry, UniformCosineMoments) {
  SystemParams p;
  p.n_sats = 100000;
  const auto cons = sample_constellation(p, 2024);
  double mean = 0.0, theta_mean = 0.0;
  for (const auto& s : cons.sats) {
    mean += std::cos(s.phi_e);
    theta_mean += s.theta;
    ASSERT_GE(s.theta, 0.0);
    ASSERT_LT(s.theta, 2.0 * std::numbers::pi);
  }
  mean /= p.n_sats;
  theta_mean /= p.n_sats;
  EXPECT_LT(std::abs(mean), 3.0 / std::sqrt(3.0 * p.n_sats));
  EXPECT_LT(std::abs(theta_mean - std::numbers::pi), 3.0 * 2.0 * std::numbers::pi / std::sqrt(12.0 * p.n_sats));
}

TEST(Geometry, VisibleFractionMatchesClosedForm) {
  SystemParams p;
  p.n_sats = 100000;
  const auto cons = sample_constellation(p, 99);
  const double phi_e_max = max_earth_angle(p);
  int inside = 0;
  for (const auto& s : cons.sats) inside += s.phi_e <= phi_e_max;
  const double frac = static_cast<double>(inside) / p.n_sats;
  const double q = visibility_prob(p);
  EXPECT_LT(std::abs(frac - q), 3.0 * std::sqrt(q * (1 - q) / p.n_sats));
}

TEST(Geometry, ZenithAndAntipode) {
  SystemParams p;
  const SatelliteState z = e_to_l(0.0, p);
  EXPECT_DOUBLE_EQ(z.d, p.h);
  EXPECT_DOUBLE_EQ(z.phi_l, 0.0);
  EXPECT_TRUE(z.visible);
  const SatelliteState a = e_to_l(std::numbers::pi, p);
  EXPECT_NEAR(a.d, 2.0 * p.r + p.h, 1e-9);
  EXPECT_NEAR(a.phi_l, std::numbers::pi, 1e-12);
  EXPECT_FALSE(a.visible);
}

TEST(Geometry, ReferenceEdgeAngle) {
  SystemParams p;
  EXPECT_NEAR(rad_to_deg(e_to_l(deg_to_rad(47.93), p).phi_l), 60.0, 0.05);
  EXPECT_NEAR(rad_to_deg(max_earth_angle(p)), 47.93, 0.05);
  EXPECT_NEAR(rad_to_deg(max_earth_angle(p)), 47.9231155775428, 1e-10);
}

TEST(Geometry, TrigIdentitiesAndLawOfCosines) {
  SystemParams p;
  rng::Stream rs(5);
  for (int i = 0; i < 2000; ++i) {
    const double phi_e = rs.uniform(0.0, std::numbers::pi);
    const SatelliteState s = e_to_l(phi_e, p);
    const double sl = std::sin(s.phi_l), cl = std::cos(s.phi_l);
    EXPECT_NEAR(sl * sl + cl * cl, 1.0, 1e-12);
    EXPECT_NEAR(s.d / law_of_cosines(phi_e, p), 1.0, 1e-12);
    const double big_r = p.orbit_radius();
    EXPECT_NEAR(sl, big_r / s.d * std::sin(phi_e), 1e-12);
    EXPECT_NEAR(cl, (big_r * std::cos(phi_e) - p.r) / s.d, 1e-11);
    EXPECT_GE(s.d, p.h * (1 - 1e-15));
    EXPECT_LE(s.d, (2 * p.r + p.h) * (1 + 1e-15));
  }
}

TEST(Geometry, LocalStateInvertsEarthAngle) {
  SystemParams p;
  for (double phi_e : {0.01, 0.3, 0.8, 1.5, 2.5}) {
    const SatelliteState e = e_to_l(phi_e, p);
    const SatelliteState l = l_to_state(e.phi_l, 0.0, p);
    EXPECT_NEAR(l.d / e.d, 1.0, 1e-12);
  }
}

TEST(Geometry, EdgeAngleReachesViewingLimit) {
  for (double deg : {1.0, 10.0, 30.0, 60.0, 89.0, 90.0})
    for (double h : {1.0, 500.0, 20000.0, 1e6}) {
      SystemParams p;
      p.h = h;
      p.phi_l_max = deg_to_rad(deg);
      EXPECT_NEAR(e_to_l(max_earth_angle(p), p).phi_l, p.phi_l_max, 1e-10) << deg << " " << h;
      EXPECT_LE(max_earth_angle(p), p.phi_l_max);
      EXPECT_GT(max_earth_angle(p), 0.0);
    }
}

TEST(Geometry, NarrowConeShrinksEarthAngle) {
  SystemParams p;
  p.phi_l_max = 1e-9;
  EXPECT_LT(max_earth_angle(p), 1e-9);
}

TEST(Geometry, HorizonGeometry) {
  SystemParams p;
  p.phi_l_max = std::numbers::pi / 2;
  EXPECT_NEAR(std::cos(max_earth_angle(p)), p.r / p.orbit_radius(), 1e-12);
  const double big_r = p.orbit_radius();
  EXPECT_NEAR(d_max(p), std::sqrt(big_r * big_r - p.r * p.r), 1e-9);
}

TEST(Geometry, DmaxOracleValues) {
  SystemParams p;
  EXPECT_NEAR(d_max(p), 22601.84981051755927, 1e-8);
  SystemParams tiny;
  tiny.h = 1e-6;
  tiny.phi_l_max = std::acos(0.5);
  EXPECT_NEAR(d_max(tiny) / tiny.h, 1.9999999995291163086, 1e-9);
  EXPECT_NEAR(d_max(tiny) / tiny.h, 2.0, 1e-6);
}

TEST(Geometry, DmaxAtZenithConeIsAltitude) {
  SystemParams p;
  p.phi_l_max = 1e-300;
  EXPECT_DOUBLE_EQ(d_max(p), p.h);
}

TEST(Geometry, DmaxMatchesEdgeDistance) {
  for (double deg : {5.0, 45.0, 60.0, 90.0})
    for (double h : {0.01, 100.0, 20000.0, 1e7}) {
      SystemParams p;
      p.h = h;
      p.phi_l_max = deg_to_rad(deg);
      EXPECT_NEAR(d_max(p) / e_to_l(max_earth_angle(p), p).d, 1.0, 1e-10);
      EXPECT_NEAR((d_max(p) - h) / d_max_excess(p), 1.0, h < 1.0 ? 1e-6 : 1e-9);
    }
}

TEST(Geometry, StableAndLiteralDmaxAgree) {
  for (double h : {1e-3, 0.1, 10.0, 1000.0, 20000.0, 1e6})
    for (double deg : {10.0, 60.0, 90.0}) {
      SystemParams p;
      p.h = h;
      p.phi_l_max = deg_to_rad(deg);
      EXPECT_NEAR(d_max(p) / d_max_literal(p), 1.0, 1e-9) << h << " " << deg;
    }
}

TEST(Geometry, DmaxMonotone) {
  SystemParams p;
  double prev = 0.0;
  for (double h = 100.0; h < 50000.0; h *= 1.3) {
    p.h = h;
    EXPECT_GT(d_max(p), prev);
    prev = d_max(p);
  }
  p = SystemParams{};
  prev = 0.0;
  for (double deg = 1.0; deg <= 90.0; deg += 1.0) {
    p.phi_l_max = deg_to_rad(deg);
    EXPECT_GT(d_max(p), prev);
    prev = d_max(p);
  }
}

TEST(Params, Validation) {
  SystemParams p;
  EXPECT_NO_THROW(p.validate());
  p.h = 0.0;
  EXPECT_THROW(p.validate(), InvalidConfig);
  p = SystemParams{};
  p.phi_l_max = 0.0;
  EXPECT_THROW(p.validate(), InvalidConfig);
  p = SystemParams{};
  p.n_sats = 0;
  EXPECT_THROW(p.validate(), InvalidConfig);
  p = SystemParams{};
  p.eta_rho = -1.0;
  EXPECT_THROW(p.validate(), InvalidConfig);
  p = SystemParams{};
  EXPECT_THROW(p.eta(), InvalidConfig);
  p.eta_split = 2.0;
  EXPECT_DOUBLE_EQ(p.rho(), p.eta_rho / 2.0);
}
