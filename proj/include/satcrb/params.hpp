#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "satcrb/errors.hpp"

namespace satcrb {

/// Propagation speed in vacuum [km/s].
inline constexpr double kSpeedOfLight = 299792.458;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Earth, constellation and radiometric scalars. Lengths in km, angles in
/// radians. The timing model only ever needs the product eta*rho; the
/// received-signal-strength model also needs eta on its own (eta_split).
struct SystemParams {
  double r = 6371.0;                        ///< Earth radius [km]
  double h = 20000.0;                       ///< satellite altitude [km]
  double phi_l_max = deg_to_rad(60.0);      ///< max viewing angle from the local zenith [rad]
  double eta_rho = 6.4e13;                  ///< combined information scale
  int n_sats = 250;                         ///< constellation size N
  double c = kSpeedOfLight;                 ///< propagation speed [km/s]
  std::optional<double> eta_split;          ///< eta alone, when (eta, rho) are given separately

  double orbit_radius() const { return r + h; }
  double zeta() const { return std::cos(phi_l_max); }
  double eta() const;
  double rho() const;

  /// Throws InvalidConfig when a field is outside its domain.
  void validate() const;
};

inline double SystemParams::eta() const {
  if (!eta_split) throw InvalidConfig("model requires eta and rho separately (eta_split unset)");
  return *eta_split;
}

inline double SystemParams::rho() const { return eta_rho / eta(); }

inline void SystemParams::validate() const {
  auto fail = [](const std::string& what) { throw InvalidConfig("invalid parameters: " + what); };
  if (!(r > 0.0) || !std::isfinite(r)) fail("r must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) fail("h must be positive");
  if (!(phi_l_max > 0.0) || phi_l_max > std::numbers::pi / 2 + 1e-15)
    fail("phi_l_max must lie in (0, 90] degrees");
  if (!(eta_rho > 0.0) || !std::isfinite(eta_rho)) fail("eta_rho must be positive");
  if (n_sats < 1) fail("n_sats must be at least 1");
  if (!(c > 0.0)) fail("c must be positive");
  if (eta_split && !(*eta_split > 0.0)) fail("eta must be positive");
}

}  // namespace satcrb
