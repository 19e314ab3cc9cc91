#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "satcrb/ml.hpp"
#include "satcrb/signal.hpp"

using namespace satcrb;

namespace {

constexpr double kGaussianBandwidth = 112539.54350374;  // 1 / (2 pi sqrt(2) 1 us)

}  // namespace

TEST(Signal, PulseHasUnitEnergy) {
  for (PulseShape shape : {PulseShape::gaussian, PulseShape::raised_cosine, PulseShape::truncated_gaussian}) {
    SignalConfig cfg;
    cfg.pulse = shape;
    const Pulse pulse = make_pulse(cfg);
    double e = 0.0;
    for (double v : pulse.samples()) e += v * v * pulse.dt();
    EXPECT_NEAR(e, 1.0, 1e-12) << to_string(shape);
  }
}

TEST(Signal, GaussianIsSymmetric) {
  const Pulse pulse = make_pulse(SignalConfig{});
  for (double t : {1e-7, 5e-7, 2e-6}) {
    EXPECT_DOUBLE_EQ(pulse.value(t), pulse.value(-t));
    EXPECT_DOUBLE_EQ(pulse.derivative(t), -pulse.derivative(-t));
  }
  EXPECT_EQ(pulse.value(7e-6), 0.0);
  EXPECT_NEAR(pulse.support_hi(), 6e-6, 1e-18);
}

TEST(Signal, DerivativeMatchesFiniteDifference) {
  for (PulseShape shape : {PulseShape::gaussian, PulseShape::raised_cosine}) {
    SignalConfig cfg;
    cfg.pulse = shape;
    const Pulse pulse = make_pulse(cfg);
    const double step = 1e-11;
    for (double t : {-1.3e-6, -2e-7, 4e-7, 1.1e-6}) {
      const double fd = (pulse.value(t + step) - pulse.value(t - step)) / (2 * step);
      EXPECT_NEAR(fd / pulse.derivative(t), 1.0, 1e-5) << to_string(shape) << " " << t;
    }
  }
}

TEST(Signal, BandwidthRoutesAgree) {
  const Pulse pulse = make_pulse(SignalConfig{});
  EXPECT_NEAR(effective_bandwidth(pulse) / kGaussianBandwidth, 1.0, 1e-6);
  EXPECT_NEAR(effective_bandwidth_spectral(pulse) / kGaussianBandwidth, 1.0, 1e-6);
  SignalConfig rc;
  rc.pulse = PulseShape::raised_cosine;
  const Pulse rc_pulse = make_pulse(rc);
  EXPECT_NEAR(effective_bandwidth(rc_pulse) / effective_bandwidth_spectral(rc_pulse), 1.0, 1e-4);
}

TEST(Signal, BandwidthScalesInverselyWithWidth) {
  SignalConfig a, b;
  b.pulse_width = 2e-6;
  EXPECT_NEAR(effective_bandwidth(make_pulse(a)) / effective_bandwidth(make_pulse(b)), 2.0, 1e-6);
}

TEST(Signal, UndersampledPulseRejected) {
  SignalConfig cfg;
  cfg.sample_rate = 4e6;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  EXPECT_THROW(parse_pulse("square"), InvalidConfig);
  EXPECT_EQ(parse_pulse("raised_cosine"), PulseShape::raised_cosine);
}

TEST(Signal, CalibrationMatchesDelayInformation) {
  // Timing information of a satellite at distance h equals 2 eta rho / h^2.
  SignalConfig cfg;
  cfg.n0 = 0.01;
  const double h = 20000.0;
  const double info = delay_information(cfg, std::sqrt(cfg.es_max)) / (cfg.c * cfg.c);
  EXPECT_NEAR(info / (2.0 * calibrated_eta_rho(cfg, h) / (h * h)), 1.0, 1e-5);
  const double w = 2.0 * std::numbers::pi * kGaussianBandwidth;
  EXPECT_NEAR(delay_information(cfg, 3.0, 2.3e-7) / (2.0 * 9.0 / cfg.n0 * w * w), 1.0, 1e-5);
}

TEST(Signal, RangeOffsetIsStable) {
  const Eigen::Vector3d p(1000.0, -2000.0, 20000.0), xi(0.1, 0.2, -0.05);
  const double direct = (p - xi).norm() - p.norm();
  EXPECT_NEAR(range_offset(p, xi), direct, 1e-10);
  EXPECT_EQ(range_offset(p, Eigen::Vector3d::Zero()), 0.0);
}

TEST(Signal, ReferenceScenarioGeometry) {
  const MlScenario sc = reference_scenario();
  ASSERT_EQ(sc.sats.size(), 6u);
  EXPECT_NEAR(sc.sats[0].z(), 20000.0, 1e-9);
  const SignalConfig cfg;
  const double d_ring = l_to_state(deg_to_rad(30.0), 0.0, SystemParams{}).d;
  EXPECT_NEAR(sc.amplitude(1, cfg) / sc.amplitude(0, cfg), 20000.0 / d_ring, 1e-4);
}

TEST(Signal, NoiseStatistics) {
  const MlScenario sc = reference_scenario();
  SignalConfig cfg;
  cfg.n0 = 2.0;
  const auto meas = simulate_measurements(sc, cfg, 5);
  const Pulse pulse = make_pulse(cfg);
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (std::size_t m = 0; m < meas.size(); ++m) {
    const auto mean = mean_window(pulse, cfg, sc.amplitude(m, cfg), meas[m].true_delay);
    for (std::size_t k = 0; k < mean.size(); ++k) {
      const double w = meas[m].samples[k] - mean[k];
      sum += w;
      sq += w * w;
      ++n;
    }
  }
  const double var = cfg.n0 / (2.0 * cfg.dt());
  EXPECT_LT(std::abs(sum / n), 4.0 * std::sqrt(var / n));
  EXPECT_NEAR(sq / n / var, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Signal, NoiseStreamIsSharedAcrossSnr) {
  const MlScenario sc = reference_scenario();
  SignalConfig a, b;
  a.n0 = 1.0;
  b.n0 = 4.0;
  a.es_max = b.es_max = 1e-300;  // signal negligible against the noise
  const auto ma = simulate_measurements(sc, a, 3, 7), mb = simulate_measurements(sc, b, 3, 7);
  for (std::size_t k = 0; k < 50; ++k) EXPECT_NEAR(mb[2].samples[k], 2.0 * ma[2].samples[k], 1e-9);
  EXPECT_EQ(simulate_measurements(sc, a, 3, 7)[0].samples, ma[0].samples);
}

TEST(Signal, AmplitudesDecoupleFromLocation) {
  const MlScenario sc = reference_scenario();
  SignalConfig cfg;
  const double sym = decoupling_check(sc, cfg);
  EXPECT_LT(sym, 1e-3);
  cfg.pulse = PulseShape::truncated_gaussian;
  EXPECT_GT(decoupling_check(sc, cfg), 10.0 * sym);
}

TEST(Ml, NoiselessRecovery) {
  const MlScenario sc = reference_scenario();
  SignalConfig cfg;
  cfg.n0 = 0.0;
  const auto meas = simulate_measurements(sc, cfg, 1);
  const LocationEstimate est = ml_localize(meas, sc.sats, cfg, MlMode::full_3d);
  EXPECT_TRUE(est.converged);
  EXPECT_LT((est.xi_hat - sc.truth).norm(), 1e-4);
  EXPECT_NEAR(est.t0_hat * cfg.c, sc.t0 * cfg.c, 1e-4);
  ASSERT_EQ(est.amplitudes_hat.size(), sc.sats.size());
  for (std::size_t m = 0; m < sc.sats.size(); ++m)
    EXPECT_NEAR(est.amplitudes_hat[m] / sc.amplitude(m, cfg), 1.0, 1e-4);
}

TEST(Ml, NoiselessRecoveryWithKnownAltitude) {
  const MlScenario sc = reference_scenario();
  SignalConfig cfg;
  cfg.n0 = 0.0;
  LocalizerOptions opt;
  opt.known_z = sc.truth.z();
  const auto est = ml_localize(simulate_measurements(sc, cfg, 1), sc.sats, cfg, MlMode::fix_z, opt);
  EXPECT_LT((est.xi_hat - sc.truth).norm(), 1e-4);
  EXPECT_EQ(est.xi_hat.z(), sc.truth.z());
}

TEST(Ml, AmplitudeScaleDoesNotMoveEstimate) {
  const MlScenario sc = reference_scenario();
  SignalConfig a, b;
  a.n0 = 1e-4;
  b.n0 = 4e-4;
  b.es_max = 4.0;
  const auto ea = ml_localize(simulate_measurements(sc, a, 2), sc.sats, a, MlMode::full_3d);
  const auto eb = ml_localize(simulate_measurements(sc, b, 2), sc.sats, b, MlMode::full_3d);
  EXPECT_LT((ea.xi_hat - eb.xi_hat).norm(), 1e-4);
}

TEST(Ml, TooFewMeasurementsRejected) {
  const MlScenario sc = reference_scenario();
  SignalConfig cfg;
  auto meas = simulate_measurements(sc, cfg, 1);
  meas.resize(3);
  EXPECT_THROW(ml_localize(meas, sc.sats, cfg, MlMode::full_3d), InsufficientCoverage);
}

TEST(Ml, KnownAltitudeBound) {
  const MlScenario sc = reference_scenario();
  SignalConfig cfg;
  cfg.n0 = 0.01;
  const BoundSet fixed = scenario_crb(sc, cfg, MlMode::fix_z);
  const BoundSet full = scenario_crb(sc, cfg, MlMode::full_3d);
  EXPECT_EQ(fixed.xyz, fixed.xy);
  EXPECT_LE(fixed.xy, full.xy * (1 + 1e-12));
  EXPECT_GT(full.xyz, full.xy);
}

TEST(Ml, BoundScalesWithNoise) {
  const MlScenario sc = reference_scenario();
  SignalConfig a, b;
  a.n0 = 0.01;
  b.n0 = 0.1;
  EXPECT_NEAR(scenario_crb(sc, b, MlMode::full_3d).xyz / scenario_crb(sc, a, MlMode::full_3d).xyz, 10.0, 1e-9);
}

TEST(Ml, ExperimentIsDeterministic) {
  const MlScenario sc = reference_scenario();
  const SignalConfig cfg;
  const auto a = mse_experiment(sc, cfg, {30.0}, 4, 11, MlMode::fix_z);
  const auto b = mse_experiment(sc, cfg, {30.0}, 4, 11, MlMode::fix_z);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].mse_xy, b[0].mse_xy);
  EXPECT_EQ(a[0].crb_xy, b[0].crb_xy);
  EXPECT_THROW(mse_experiment(sc, cfg, {30.0}, 0, 11, MlMode::fix_z), InvalidConfig);
}
