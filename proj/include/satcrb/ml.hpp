#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include "satcrb/errors.hpp"
#include "satcrb/fim.hpp"
#include "satcrb/parallel.hpp"
#include "satcrb/signal.hpp"

namespace satcrb {

enum class MlMode { fix_z, full_3d };

inline const char* to_string(MlMode m) { return m == MlMode::fix_z ? "fix_z" : "full_3d"; }

struct LocationEstimate {
  Eigen::Vector3d xi_hat = Eigen::Vector3d::Zero();  ///< [km]
  double t0_hat = 0.0;                               ///< [s]
  std::vector<double> amplitudes_hat;
  bool converged = false;
};

struct LocalizerOptions {
  int lattice_half_points = 3;    ///< lattice spans +-half_points spacings per axis
  double lattice_spacing = 0.0;   ///< [km]; 0 selects c / (4 W_e)
  double tolerance_m = 0.01;      ///< simplex size at which refinement stops [m of range]
  int max_iterations = 4000;
  double known_z = 0.0;           ///< terminal altitude used in fix_z mode [km]
};

namespace detail {

/// Profiled log-likelihood sum_m (sum_k r_k s_k)^2 / sum_k s_k^2 with
/// s_k = s(t_k - delay_m(xi, b)). Also yields the profiled amplitudes.
class ProfiledLikelihood {
 public:
  ProfiledLikelihood(const std::vector<Measurement>& meas, const std::vector<Eigen::Vector3d>& sats,
                     const Pulse& pulse, double c)
      : meas_(meas), sats_(sats), pulse_(pulse), c_(c) {}

  double operator()(const Eigen::Vector3d& xi, double b_km, std::vector<double>* amps = nullptr) const {
    double total = 0.0;
    if (amps) amps->assign(meas_.size(), 0.0);
    for (std::size_t i = 0; i < meas_.size(); ++i) {
      const Measurement& m = meas_[i];
      const double delay = window_delay(sats_[static_cast<std::size_t>(m.sat_index)], xi, b_km, c_);
      const long n = static_cast<long>(m.samples.size());
      const long k0 = std::max(0L, static_cast<long>(std::ceil((delay + pulse_.support_lo() - m.t_start) / m.dt)));
      const long k1 =
          std::min(n - 1, static_cast<long>(std::floor((delay + pulse_.support_hi() - m.t_start) / m.dt)));
      double rs = 0.0, ss = 0.0;
      for (long k = k0; k <= k1; ++k) {
        const double s = pulse_.value(m.t_start + k * m.dt - delay);
        rs += m.samples[static_cast<std::size_t>(k)] * s;
        ss += s * s;
      }
      if (ss > 0.0) {
        total += rs * rs / ss;
        if (amps) (*amps)[i] = rs / ss;
      }
    }
    return total;
  }

 private:
  const std::vector<Measurement>& meas_;
  const std::vector<Eigen::Vector3d>& sats_;
  const Pulse& pulse_;
  double c_;
};

struct SimplexContext {
  const ProfiledLikelihood* ll;
  bool fix_z;
  double known_z;
};

/// Parameters are in metres: (x, y, z, b) or (x, y, b) in fix_z mode.
inline double negative_ll(const gsl_vector* v, void* raw) {
  const auto* ctx = static_cast<const SimplexContext*>(raw);
  const double x = gsl_vector_get(v, 0) * 1e-3, y = gsl_vector_get(v, 1) * 1e-3;
  const double z = ctx->fix_z ? ctx->known_z : gsl_vector_get(v, 2) * 1e-3;
  const double b = gsl_vector_get(v, ctx->fix_z ? 2 : 3) * 1e-3;
  return -(*ctx->ll)(Eigen::Vector3d(x, y, z), b);
}

}  // namespace detail

/// Maximum-likelihood terminal position and clock offset with the amplitudes
/// profiled out. A lattice over (x, y[, z]) with a scan over c T0 picks the
/// start point (first index wins ties); Nelder-Mead then refines it.
/// Satellite m of the measurements is sats[sat_index].
inline LocationEstimate ml_localize(const std::vector<Measurement>& meas, const std::vector<Eigen::Vector3d>& sats,
                                    const SignalConfig& config, MlMode mode, const LocalizerOptions& opt = {}) {
  config.validate();
  const bool fix_z = mode == MlMode::fix_z;
  if (meas.size() < (fix_z ? 3u : 4u)) throw InsufficientCoverage("too few measurements for ML localization");
  const Pulse pulse = make_pulse(config);
  const detail::ProfiledLikelihood ll(meas, sats, pulse, config.c);

  const double spacing =
      opt.lattice_spacing > 0.0 ? opt.lattice_spacing : config.c / (4.0 * effective_bandwidth(pulse));
  const int q = opt.lattice_half_points;
  double best = -std::numeric_limits<double>::infinity();
  Eigen::Vector4d start = Eigen::Vector4d::Zero();
  const int qz = fix_z ? 0 : q;
  for (int ix = -q; ix <= q; ++ix)
    for (int iy = -q; iy <= q; ++iy)
      for (int iz = -qz; iz <= qz; ++iz)
        for (int ib = -q; ib <= q; ++ib) {
          const Eigen::Vector3d xi(ix * spacing, iy * spacing, fix_z ? opt.known_z : iz * spacing);
          const double v = ll(xi, ib * spacing);
          if (v > best) {
            best = v;
            start = {xi.x(), xi.y(), xi.z(), ib * spacing};
          }
        }

  const std::size_t dim = fix_z ? 3 : 4;
  detail::SimplexContext ctx{&ll, fix_z, opt.known_z};
  gsl_multimin_function fn{&detail::negative_ll, dim, &ctx};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x0(gsl_vector_alloc(dim), &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> steps(gsl_vector_alloc(dim), &gsl_vector_free);
  gsl_vector_set(x0.get(), 0, start[0] * 1e3);
  gsl_vector_set(x0.get(), 1, start[1] * 1e3);
  if (!fix_z) gsl_vector_set(x0.get(), 2, start[2] * 1e3);
  gsl_vector_set(x0.get(), dim - 1, start[3] * 1e3);
  gsl_vector_set_all(steps.get(), 0.5 * spacing * 1e3);
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> nm(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim), &gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(nm.get(), &fn, x0.get(), steps.get());

  LocationEstimate est;
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), opt.tolerance_m) == GSL_SUCCESS) {
      est.converged = true;
      break;
    }
  }
  const gsl_vector* x = gsl_multimin_fminimizer_x(nm.get());
  est.xi_hat = {gsl_vector_get(x, 0) * 1e-3, gsl_vector_get(x, 1) * 1e-3,
                fix_z ? opt.known_z : gsl_vector_get(x, 2) * 1e-3};
  const double b = gsl_vector_get(x, dim - 1) * 1e-3;
  est.t0_hat = b / config.c;
  ll(est.xi_hat, b, &est.amplitudes_hat);
  return est;
}

/// Timing-only information matrix of a scenario at its true position, with
/// eta_rho calibrated from the signal configuration.
inline FisherMatrix scenario_fim(const MlScenario& sc, const SignalConfig& config) {
  const double eta_rho = calibrated_eta_rho(config, sc.h);
  FisherMatrix j;
  for (const auto& p : sc.sats) {
    const Eigen::Vector3d los = p - sc.truth;
    const double d = los.norm();
    const double l = 2.0 * eta_rho / (d * d);
    detail::add_summand(j.m, los / d, l, l);
  }
  return j;
}

/// CRB of the scenario for one mode. In fix_z mode z is known, so the bound
/// comes from the (x, y, c T0) block and xyz equals xy.
inline BoundSet scenario_crb(const MlScenario& sc, const SignalConfig& config, MlMode mode) {
  const FisherMatrix j = scenario_fim(sc, config);
  if (mode == MlMode::full_3d) return crb_from_fim(j);
  Eigen::Matrix3d sub;
  const int idx[3] = {0, 1, 3};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) sub(a, b) = j.m(idx[a], idx[b]);
  const Eigen::Matrix3d inv = checked_inverse(sub);
  return {inv(0, 0) + inv(1, 1), 0.0, inv(0, 0) + inv(1, 1)};
}

struct MlRow {
  double snr_db = 0.0;
  double mse_xy = 0.0;   ///< [km^2]
  double mse_xyz = 0.0;  ///< [km^2]
  double crb_xy = 0.0;
  double crb_xyz = 0.0;
  int unconverged = 0;
};

/// Empirical MSE against the CRB over an Es/N0 grid (dB). Trial t uses the
/// same noise stream at every grid point.
inline std::vector<MlRow> mse_experiment(const MlScenario& sc, SignalConfig config, const std::vector<double>& snr_db,
                                         int trials, std::uint64_t seed, MlMode mode,
                                         LocalizerOptions opt = {}) {
  if (trials < 1) throw InvalidConfig("trials must be positive");
  opt.known_z = sc.truth.z();
  std::vector<MlRow> rows;
  for (const double snr : snr_db) {
    config.n0 = config.es_max / std::pow(10.0, snr / 10.0);
    struct Err {
      double xy, z;
      bool converged;
    };
    std::vector<Err> errs(static_cast<std::size_t>(trials));
    parallel_for(errs.size(), [&](std::size_t t) {
      const auto meas = simulate_measurements(sc, config, seed, t);
      const LocationEstimate est = ml_localize(meas, sc.sats, config, mode, opt);
      const Eigen::Vector3d e = est.xi_hat - sc.truth;
      errs[t] = {e.x() * e.x() + e.y() * e.y(), e.z() * e.z(), est.converged};
    });
    MlRow row;
    row.snr_db = snr;
    for (const Err& e : errs) {
      row.mse_xy += e.xy;
      row.mse_xyz += e.xy + e.z;
      row.unconverged += !e.converged;
    }
    row.mse_xy /= trials;
    row.mse_xyz /= trials;
    const BoundSet crb = scenario_crb(sc, config, mode);
    row.crb_xy = crb.xy;
    row.crb_xyz = crb.xyz;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace satcrb
