#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "satcrb/params.hpp"
#include "satcrb/random.hpp"

namespace satcrb {

/// One satellite as seen from the localized terminal (LT). phi_l is measured
/// from the LT zenith, so phi_l = 0 means the satellite is straight overhead.
struct SatelliteState {
  double phi_l = 0.0;
  double theta = 0.0;
  double d = 0.0;  ///< LT-satellite distance [km]
  bool visible = false;

  /// Unit vector from the LT to the satellite in the local (east, north, up) frame.
  Eigen::Vector3d direction() const {
    return {std::sin(phi_l) * std::cos(theta), std::sin(phi_l) * std::sin(theta), std::cos(phi_l)};
  }
  Eigen::Vector3d position() const { return d * direction(); }
};

/// Satellite positions in Earth-center angles. phi_e is the angle between the
/// Earth-center-to-LT axis and the Earth-center-to-satellite axis.
struct Constellation {
  struct Point {
    double phi_e;
    double theta;
  };
  std::vector<Point> sats;
  std::uint64_t seed = 0;
};

/// Uniform positions on the satellite sphere: cos(phi_e) ~ U[-1, 1] and
/// theta ~ U[0, 2pi). The stream index lets Monte Carlo trials draw
/// independent constellations from one seed.
inline Constellation sample_constellation(const SystemParams& params, std::uint64_t seed,
                                          std::uint64_t stream = 0, std::uint64_t substream = 0) {
  rng::Stream rs(seed, stream, substream);
  Constellation out;
  out.seed = seed;
  out.sats.reserve(static_cast<std::size_t>(params.n_sats));
  for (int i = 0; i < params.n_sats; ++i) {
    const double chi = rs.uniform(-1.0, 1.0);
    const double theta = rs.uniform(0.0, 2.0 * std::numbers::pi);
    out.sats.push_back({std::acos(chi), theta});
  }
  return out;
}

/// Earth-center angle -> LT frame. Uses d^2 = h^2 + 4 r R sin^2(phi_e / 2),
/// which equals the law of cosines but does not cancel for small angles.
inline SatelliteState e_to_l(double phi_e, const SystemParams& params, double theta = 0.0) {
  const double r = params.r;
  const double big_r = params.orbit_radius();
  const double half = std::sin(0.5 * phi_e);
  SatelliteState s;
  s.d = std::sqrt(params.h * params.h + 4.0 * r * big_r * half * half);
  // R cos(phi_e) - r = h - 2 R sin^2(phi_e / 2)
  s.phi_l = std::atan2(big_r * std::sin(phi_e), params.h - 2.0 * big_r * half * half);
  s.theta = theta;
  s.visible = s.phi_l <= params.phi_l_max;
  return s;
}

/// Satellite state from LT-frame angles (inverse of e_to_l for the distance).
inline SatelliteState l_to_state(double phi_l, double theta, const SystemParams& params) {
  const double r = params.r;
  const double cos_l = std::cos(phi_l);
  // R^2 = r^2 + d^2 + 2 r d cos(phi_l), positive root.
  const double q = params.h * (2.0 * r + params.h);
  const double b = r * cos_l;
  const double disc = std::sqrt(b * b + q);
  SatelliteState s;
  s.d = b >= 0.0 ? q / (disc + b) : disc - b;
  s.phi_l = phi_l;
  s.theta = theta;
  s.visible = phi_l <= params.phi_l_max;
  return s;
}

/// Maximal Earth-center angle of the coverage cup (law of sines in the
/// center/LT/satellite triangle).
inline double max_earth_angle(const SystemParams& params) {
  const double phi = params.phi_l_max;
  return phi - std::asin(params.r * std::sin(phi) / params.orbit_radius());
}

/// Maximal LT-satellite distance inside the coverage cup. Evaluated as
/// h(2r+h) / (sqrt(R^2 - r^2 sin^2 phi) + r zeta), the rationalized form of
/// sqrt(R^2 + r^2 (zeta^2 - 1)) - r zeta.
inline double d_max(const SystemParams& params) {
  const double r = params.r;
  const double h = params.h;
  const double big_r = params.orbit_radius();
  const double s = std::sin(params.phi_l_max);
  const double root = std::sqrt(big_r * big_r - r * r * s * s);
  return h * (2.0 * r + h) / (root + r * params.zeta());
}

/// D_max - h without cancellation:
/// h (r(1 - zeta) + r^2 sin^2 phi / (R + root)) / (root + r zeta).
inline double d_max_excess(const SystemParams& params) {
  const double r = params.r;
  const double h = params.h;
  const double big_r = params.orbit_radius();
  const double s = std::sin(params.phi_l_max);
  const double half = std::sin(0.5 * params.phi_l_max);
  const double root = std::sqrt(big_r * big_r - r * r * s * s);
  const double one_minus_zeta = 2.0 * half * half;
  return h * (r * one_minus_zeta + r * r * s * s / (big_r + root)) / (root + r * params.zeta());
}

/// Textbook form of D_max, kept for cross-checking the rationalized one.
inline double d_max_literal(const SystemParams& params) {
  const double r = params.r;
  const double big_r = params.orbit_radius();
  const double z = params.zeta();
  return std::sqrt(big_r * big_r + r * r * (z * z - 1.0)) - r * z;
}

/// Converts a constellation into LT-frame states (visible and invisible).
inline std::vector<SatelliteState> to_states(const Constellation& cons, const SystemParams& params) {
  std::vector<SatelliteState> out;
  out.reserve(cons.sats.size());
  for (const auto& p : cons.sats) out.push_back(e_to_l(p.phi_e, params, p.theta));
  return out;
}

inline std::vector<SatelliteState> visible_only(const std::vector<SatelliteState>& sats) {
  std::vector<SatelliteState> out;
  for (const auto& s : sats)
    if (s.visible) out.push_back(s);
  return out;
}

}  // namespace satcrb
