#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "satcrb/errors.hpp"
#include "satcrb/fim.hpp"

namespace satcrb::planar {

/// Sensors around a planar source. Uses its own information scale
/// 4 W_e rho / c^2, unrelated to the satellite eta_rho.
struct PlanarSensors {
  std::vector<double> angles;     ///< bearing of each sensor from the source [rad]
  std::vector<double> distances;  ///< [km]
  double gamma = 2.0;             ///< path-loss exponent, A_i = D_i^-gamma
  double w_e = 1.0;               ///< effective bandwidth [Hz]
  double rho = 1.0;
  double c = 299792.458;          ///< [km/s]

  double scale() const { return 4.0 * w_e * rho / (c * c); }
  void validate() const;
};

inline void PlanarSensors::validate() const {
  if (angles.size() != distances.size()) throw InvalidConfig("angles and distances differ in length");
  for (double d : distances)
    if (!(d > 0.0)) throw InvalidConfig("sensor distances must be positive");
  if (!(w_e > 0.0) || !(rho > 0.0) || !(c > 0.0)) throw InvalidConfig("w_e, rho and c must be positive");
}

namespace detail {

inline std::vector<double> weights(const PlanarSensors& s) {
  std::vector<double> a(s.distances.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(s.distances[i], -s.gamma);
  return a;
}

}  // namespace detail

/// Closed-form TDOA CRB (sum of the two coordinate variances) [km^2]:
/// 3 c^2 sum A_i A_j b_ij / (4 W_e rho sum A_i A_j A_k b_ij b_jk b_ki),
/// with b_ij = 1 - cos(phi_i - phi_j).
inline double planar_crb_closed(const PlanarSensors& s) {
  s.validate();
  const std::size_t m = s.angles.size();
  if (m < 3) throw CollinearSensors("TDOA needs at least three non-collinear sensors");
  const auto a = detail::weights(s);
  // b_ij = 1 - cos(phi_i - phi_j) = 2 sin^2((phi_i - phi_j) / 2), stable for close bearings.
  std::vector<long double> b(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const long double half = std::sin(0.5L * (static_cast<long double>(s.angles[i]) - s.angles[j]));
      b[i * m + j] = 2 * half * half;
    }

  long double pairs = 0, triples = 0, scale_ref = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const long double aij = static_cast<long double>(a[i]) * a[j];
      pairs += aij * b[i * m + j];
      for (std::size_t k = 0; k < m; ++k) {
        triples += aij * a[k] * b[i * m + j] * b[j * m + k] * b[k * m + i];
        scale_ref += aij * a[k];
      }
    }
  if (!(triples > 1e-12L * scale_ref))
    throw CollinearSensors("sensors are collinear with the source");
  return static_cast<double>(3.0L * s.c * s.c * pairs / (4.0L * s.w_e * s.rho * triples));
}

/// 3x3 information matrix for (x, y, c T0), accumulated in extended
/// precision (random sensor layouts can be poorly conditioned).
inline Eigen::Matrix<long double, 3, 3> planar_fim(const PlanarSensors& s) {
  s.validate();
  const auto a = detail::weights(s);
  Eigen::Matrix<long double, 3, 3> j = Eigen::Matrix<long double, 3, 3>::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double phi = s.angles[i];
    const Eigen::Matrix<long double, 3, 1> u(std::cos(phi), std::sin(phi), -1.0L);
    j.noalias() += static_cast<long double>(a[i]) * u * u.transpose();
  }
  return static_cast<long double>(s.scale()) * j;
}

/// [J^-1]_11 + [J^-1]_22 through direct inversion of planar_fim.
inline double planar_crb_fim(const PlanarSensors& s) {
  const auto inv = checked_inverse(planar_fim(s));
  return static_cast<double>(inv(0, 0) + inv(1, 1));
}

/// Known-emission-time (TOA) counterpart: trace of the inverse 2x2 position block.
inline double planar_crb_toa(const PlanarSensors& s) {
  const Eigen::Matrix<long double, 2, 2> block = planar_fim(s).topLeftCorner<2, 2>();
  return static_cast<double>(checked_inverse(block).trace());
}

}  // namespace satcrb::planar
