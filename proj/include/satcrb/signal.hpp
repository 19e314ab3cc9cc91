#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "satcrb/errors.hpp"
#include "satcrb/geometry.hpp"
#include "satcrb/params.hpp"
#include "satcrb/quadrature.hpp"
#include "satcrb/random.hpp"

namespace satcrb {

enum class PulseShape { gaussian, raised_cosine, truncated_gaussian };

inline const char* to_string(PulseShape p) {
  switch (p) {
    case PulseShape::gaussian: return "gaussian";
    case PulseShape::raised_cosine: return "raised_cosine";
    case PulseShape::truncated_gaussian: return "truncated_gaussian";
  }
  return "?";
}

inline PulseShape parse_pulse(const std::string& s) {
  if (s == "gaussian") return PulseShape::gaussian;
  if (s == "raised_cosine") return PulseShape::raised_cosine;
  if (s == "truncated_gaussian") return PulseShape::truncated_gaussian;
  throw InvalidConfig("unknown pulse shape '" + s + "'");
}

/// Baseband signal settings. Times in seconds; noise is white with two-sided
/// density n0 / 2.
struct SignalConfig {
  PulseShape pulse = PulseShape::gaussian;
  double pulse_width = 1e-6;   ///< Gaussian standard deviation, or raised-cosine quarter span [s]
  double sample_rate = 16e6;   ///< [Hz]
  double obs_window = 60e-6;   ///< per-satellite window, centred on the nominal delay [s]
  double n0 = 1.0;
  double es_max = 1.0;         ///< received energy from a satellite at distance h
  double c = kSpeedOfLight;    ///< [km/s]

  double dt() const { return 1.0 / sample_rate; }
  std::size_t n_samples() const { return static_cast<std::size_t>(std::llround(obs_window * sample_rate)); }
  void validate() const;
};

inline void SignalConfig::validate() const {
  if (!(pulse_width > 0.0)) throw InvalidConfig("pulse_width must be positive");
  if (!(sample_rate > 0.0)) throw InvalidConfig("sample_rate must be positive");
  if (sample_rate * pulse_width < 16.0 - 1e-9)
    throw InvalidConfig("sample_rate * pulse_width must be at least 16");
  if (!(obs_window > 0.0) || n_samples() < 2) throw InvalidConfig("obs_window too short");
  if (!(n0 >= 0.0)) throw InvalidConfig("n0 must be non-negative");
  if (!(es_max > 0.0)) throw InvalidConfig("es_max must be positive");
  if (!(c > 0.0)) throw InvalidConfig("c must be positive");
}

/// Analytic pulse scaled to unit energy on its own sampling grid
/// (sum s(k dt)^2 dt = 1 over the integer grid covering the support).
class Pulse {
 public:
  Pulse(PulseShape shape, double width, double dt) : shape_(shape), width_(width), dt_(dt) {
    switch (shape) {
      case PulseShape::gaussian: lo_ = -6.0 * width; hi_ = 6.0 * width; break;
      case PulseShape::raised_cosine: lo_ = -2.0 * width; hi_ = 2.0 * width; break;
      case PulseShape::truncated_gaussian: lo_ = -width; hi_ = 6.0 * width; break;
    }
    double energy = 0.0;
    for (const long k : grid()) {
      const double v = raw(k * dt_);
      energy += v * v * dt_;
    }
    norm_ = 1.0 / std::sqrt(energy);
  }

  PulseShape shape() const { return shape_; }
  double width() const { return width_; }
  double dt() const { return dt_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

  double value(double t) const { return norm_ * raw(t); }
  double derivative(double t) const { return norm_ * raw_derivative(t); }

  /// Integer indices k with k dt inside the support.
  std::vector<long> grid() const {
    std::vector<long> ks;
    for (long k = static_cast<long>(std::ceil(lo_ / dt_)); k * dt_ <= hi_; ++k) ks.push_back(k);
    return ks;
  }

  std::vector<double> samples() const {
    std::vector<double> out;
    for (const long k : grid()) out.push_back(value(k * dt_));
    return out;
  }

 private:
  double raw(double t) const {
    if (t < lo_ || t > hi_) return 0.0;
    if (shape_ == PulseShape::raised_cosine) {
      const double c = std::cos(std::numbers::pi * t / (4.0 * width_));
      return c * c;
    }
    return std::exp(-0.5 * t * t / (width_ * width_));
  }

  double raw_derivative(double t) const {
    if (t < lo_ || t > hi_) return 0.0;
    if (shape_ == PulseShape::raised_cosine)
      return -std::numbers::pi / (4.0 * width_) * std::sin(std::numbers::pi * t / (2.0 * width_));
    return -t / (width_ * width_) * std::exp(-0.5 * t * t / (width_ * width_));
  }

  PulseShape shape_;
  double width_;
  double dt_;
  double lo_ = 0.0, hi_ = 0.0;
  double norm_ = 1.0;
};

inline Pulse make_pulse(const SignalConfig& config) {
  config.validate();
  return Pulse(config.pulse, config.pulse_width, config.dt());
}

/// RMS (Gabor) bandwidth [Hz] via sqrt(sum sdot^2 / sum s^2) / (2 pi).
inline double effective_bandwidth(const Pulse& pulse) {
  double num = 0.0, den = 0.0;
  for (const long k : pulse.grid()) {
    const double t = k * pulse.dt();
    num += pulse.derivative(t) * pulse.derivative(t);
    den += pulse.value(t) * pulse.value(t);
  }
  return std::sqrt(num / den) / (2.0 * std::numbers::pi);
}

/// RMS bandwidth from the sampled pulse's spectrum (discrete-time Fourier
/// transform integrated over [-fs/2, fs/2]).
inline double effective_bandwidth_spectral(const Pulse& pulse, int panels = 512) {
  const auto ks = pulse.grid();
  const auto s = pulse.samples();
  const double dt = pulse.dt();
  const double nyquist = 0.5 / dt;
  const GaussLegendre rule(8);
  auto power = [&](double f) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const double arg = 2.0 * std::numbers::pi * f * ks[i] * dt;
      re += s[i] * std::cos(arg);
      im -= s[i] * std::sin(arg);
    }
    return (re * re + im * im) * dt * dt;
  };
  double num = 0.0, den = 0.0;
  const double step = nyquist / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = p * step, b = a + step;
    num += rule.integrate([&](double f) { return std::pow(2.0 * std::numbers::pi * f, 2) * power(f); }, a, b);
    den += rule.integrate(power, a, b);
  }
  return std::sqrt(num / den) / (2.0 * std::numbers::pi);
}

/// Combined information scale implied by a signal configuration:
/// eta = (2 pi W_e / c)^2 [km^-2], rho = es_max h^2 / n0.
inline double calibrated_eta_rho(const SignalConfig& config, double h) {
  const double w = 2.0 * std::numbers::pi * effective_bandwidth(make_pulse(config)) / config.c;
  return w * w * h * h * config.es_max / config.n0;
}

/// One satellite's sampled window. Times are relative to the satellite's
/// nominal delay (the delay to the local frame origin with T0 = 0).
struct Measurement {
  std::vector<double> samples;
  int sat_index = 0;
  double t_start = 0.0;     ///< time of samples[0] [s]
  double dt = 0.0;          ///< sample spacing [s]
  double true_delay = 0.0;  ///< actual pulse offset inside the window [s]; test use only
};

/// Fixed satellites around a terminal in a local east-north-up frame whose
/// origin is the a-priori terminal location.
struct MlScenario {
  std::vector<Eigen::Vector3d> sats;                ///< satellite positions [km]
  Eigen::Vector3d truth = Eigen::Vector3d::Zero();  ///< true terminal position [km]
  double t0 = 0.0;                                  ///< true emission time offset [s]
  double h = 20000.0;                               ///< altitude used for the amplitude law [km]

  /// A_m = (h / D_m) sqrt(es_max), so a satellite at distance h has energy es_max.
  double amplitude(std::size_t m, const SignalConfig& config) const {
    return h / (sats[m] - truth).norm() * std::sqrt(config.es_max);
  }
};

/// One satellite at the zenith and five on a ring at 30 degrees from it.
inline MlScenario reference_scenario(const SystemParams& params = {}) {
  MlScenario sc;
  sc.h = params.h;
  sc.sats.push_back(l_to_state(0.0, 0.0, params).position());
  for (int k = 0; k < 5; ++k)
    sc.sats.push_back(l_to_state(deg_to_rad(30.0), 2.0 * std::numbers::pi * k / 5.0, params).position());
  sc.truth = {0.137, -0.211, 0.089};
  sc.t0 = 0.05 / params.c;
  return sc;
}

/// Range offset ||p - xi|| - ||p|| [km], free of cancellation.
inline double range_offset(const Eigen::Vector3d& p, const Eigen::Vector3d& xi) {
  const double far = (p - xi).norm() + p.norm();
  return (xi.squaredNorm() - 2.0 * p.dot(xi)) / far;
}

/// Pulse offset inside the window of satellite p for terminal xi and clock
/// offset b = c T0 [km]: (range_offset + b) / c [s].
inline double window_delay(const Eigen::Vector3d& p, const Eigen::Vector3d& xi, double b_km, double c) {
  return (range_offset(p, xi) + b_km) / c;
}

/// Noise-free window of satellite m: A_m s(t_k - delay).
inline std::vector<double> mean_window(const Pulse& pulse, const SignalConfig& config, double amplitude,
                                       double delay) {
  const std::size_t n = config.n_samples();
  const double t_start = -0.5 * config.obs_window;
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = amplitude * pulse.value(t_start + k * config.dt() - delay);
  return out;
}

/// Samples A_m s(t - tau_m - T0) + w for every satellite; w is white Gaussian
/// with variance n0 / (2 dt) per sample. The noise of trial t always comes
/// from stream (seed, t, m), so sweeping n0 rescales one fixed realization.
inline std::vector<Measurement> simulate_measurements(const MlScenario& sc, const SignalConfig& config,
                                                      std::uint64_t seed, std::uint64_t trial = 0) {
  config.validate();
  if (sc.sats.size() < 3) throw InsufficientCoverage("need at least three satellites");
  const Pulse pulse = make_pulse(config);
  const double sigma = std::sqrt(config.n0 / (2.0 * config.dt()));
  std::vector<Measurement> out;
  out.reserve(sc.sats.size());
  for (std::size_t m = 0; m < sc.sats.size(); ++m) {
    Measurement meas;
    meas.sat_index = static_cast<int>(m);
    meas.dt = config.dt();
    meas.t_start = -0.5 * config.obs_window;
    meas.true_delay = window_delay(sc.sats[m], sc.truth, config.c * sc.t0, config.c);
    meas.samples = mean_window(pulse, config, sc.amplitude(m, config), meas.true_delay);
    rng::Stream rs(seed, trial, m);
    for (double& v : meas.samples) v += sigma * rs.normal();
    out.push_back(std::move(meas));
  }
  return out;
}

/// Normalized cross-information between the location block (x, y, z, c T0)
/// and the amplitudes, from central differences of the noise-free windows:
/// max |F_ij| / sqrt(F_ii F_jj) over location i and amplitude j.
inline double decoupling_check(const MlScenario& sc, const SignalConfig& config) {
  config.validate();
  const Pulse pulse = make_pulse(config);
  const std::size_t m_count = sc.sats.size();
  const std::size_t dim = 4 + m_count;
  std::vector<double> theta(dim);
  for (int i = 0; i < 3; ++i) theta[static_cast<std::size_t>(i)] = sc.truth[i];
  theta[3] = config.c * sc.t0;
  for (std::size_t m = 0; m < m_count; ++m) theta[4 + m] = sc.amplitude(m, config);

  auto windows = [&](const std::vector<double>& th) {
    const Eigen::Vector3d xi(th[0], th[1], th[2]);
    std::vector<std::vector<double>> w(m_count);
    for (std::size_t m = 0; m < m_count; ++m)
      w[m] = mean_window(pulse, config, th[4 + m], window_delay(sc.sats[m], xi, th[3], config.c));
    return w;
  };

  std::vector<std::vector<std::vector<double>>> grads(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double step = i < 4 ? 1e-4 : 1e-6 * std::max(1.0, std::abs(theta[i]));
    auto up = theta, down = theta;
    up[i] += step;
    down[i] -= step;
    const auto wu = windows(up), wd = windows(down);
    grads[i].resize(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
      grads[i][m].resize(wu[m].size());
      for (std::size_t k = 0; k < wu[m].size(); ++k) grads[i][m][k] = (wu[m][k] - wd[m][k]) / (2.0 * step);
    }
  }
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(static_cast<long>(dim), static_cast<long>(dim));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) {
      double acc = 0.0;
      for (std::size_t m = 0; m < m_count; ++m)
        for (std::size_t k = 0; k < grads[i][m].size(); ++k) acc += grads[i][m][k] * grads[j][m][k];
      f(static_cast<long>(i), static_cast<long>(j)) = f(static_cast<long>(j), static_cast<long>(i)) = acc;
    }
  double worst = 0.0;
  for (long i = 0; i < 4; ++i)
    for (long j = 4; j < static_cast<long>(dim); ++j)
      worst = std::max(worst, std::abs(f(i, j)) / std::sqrt(f(i, i) * f(j, j)));
  return worst;
}

/// Delay information of one satellite's discrete window, from a central
/// difference of the noise-free samples: sum (d mu / d tau)^2 / sigma^2.
inline double delay_information(const SignalConfig& config, double amplitude, double delay = 0.0) {
  const Pulse pulse = make_pulse(config);
  const double step = 1e-4 * config.pulse_width;
  const auto up = mean_window(pulse, config, amplitude, delay + step);
  const auto down = mean_window(pulse, config, amplitude, delay - step);
  const double var = config.n0 / (2.0 * config.dt());
  double acc = 0.0;
  for (std::size_t k = 0; k < up.size(); ++k) acc += std::pow((up[k] - down[k]) / (2.0 * step), 2);
  return acc / var;
}

}  // namespace satcrb
