#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "satcrb/errors.hpp"
#include "satcrb/geometry.hpp"
#include "satcrb/params.hpp"

namespace satcrb {

struct CoverageResult {
  double p = 0.0;      ///< probability that one satellite is in the cup
  double p_cov = 0.0;  ///< probability that at least four are
};

/// Single-satellite visibility probability (1 - chi_max) / 2, evaluated as
/// sin^2(phi_e_max / 2) so it does not cancel for narrow cups.
inline double visibility_prob(const SystemParams& params) {
  params.validate();
  const double half = std::sin(0.5 * max_earth_angle(params));
  return half * half;
}

/// Equivalent distance form (h - D_max zeta) / (2R).
inline double visibility_prob_distance_form(const SystemParams& params) {
  params.validate();
  return (params.h - d_max(params) * params.zeta()) / (2.0 * params.orbit_radius());
}

/// P(Binomial(n, p) >= 4) computed in log space with compensated summation.
inline double prob_at_least_four(int n, double p) {
  if (!(p > 0.0) || n < 4) return 0.0;
  if (p >= 1.0) return 1.0;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  double sum = 0.0, comp = 0.0;
  for (int m = 0; m <= 3; ++m) {
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0) +
                            m * log_p + (n - m) * log_q;
    const double y = std::exp(log_term) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return std::clamp(1.0 - sum, 0.0, 1.0);
}

inline double coverage_prob(const SystemParams& params) {
  return prob_at_least_four(params.n_sats, visibility_prob(params));
}

inline CoverageResult coverage(const SystemParams& params) {
  const double p = visibility_prob(params);
  return {p, prob_at_least_four(params.n_sats, p)};
}

/// Smallest phi_l_max (bisection to 1e-4 rad) whose coverage reaches target.
inline double min_angle_for_coverage(SystemParams params, double target) {
  if (!(target > 0.0 && target < 1.0)) throw InvalidConfig("coverage target must lie in (0, 1)");
  auto covers = [&](double phi) {
    params.phi_l_max = phi;
    return coverage_prob(params) >= target;
  };
  double hi = std::numbers::pi / 2;
  if (!covers(hi)) throw Unachievable("coverage target not reached even at 90 degrees");
  double lo = 0.0;
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (covers(mid) ? hi : lo) = mid;
  }
  return hi;
}

inline constexpr double kMaxSearchHeight = 1e5;

/// Smallest altitude in (0, 1e5] km (bisection to 1 km) whose coverage reaches target.
inline double min_height_for_coverage(SystemParams params, double target) {
  if (!(target > 0.0 && target < 1.0)) throw InvalidConfig("coverage target must lie in (0, 1)");
  auto covers = [&](double h) {
    params.h = h;
    return coverage_prob(params) >= target;
  };
  double hi = kMaxSearchHeight;
  if (!covers(hi)) throw Unachievable("coverage target not reached at the maximal altitude");
  double lo = 0.0;
  while (hi - lo > 1.0) {
    const double mid = 0.5 * (lo + hi);
    (covers(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace satcrb
