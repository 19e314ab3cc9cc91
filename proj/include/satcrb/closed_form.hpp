#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include <quadmath.h>

#include "satcrb/errors.hpp"
#include "satcrb/fim.hpp"
#include "satcrb/geometry.hpp"
#include "satcrb/params.hpp"
#include "satcrb/quadrature.hpp"

namespace satcrb {

/// Per-satellite expectations over uniform sphere positions, each including
/// the visibility indicator. The K moments need eta and rho separately and
/// are NaN when the parameters only carry the product. Stored in extended
/// precision: for narrow cups the z bound assembled from these values
/// subtracts nearly equal products.
struct MomentSet {
  using value_type = long double;
  value_type m_k_sin2 = std::numeric_limits<value_type>::quiet_NaN();  ///< E[K sin^2(phi_l) 1]
  value_type m_k_cos2 = std::numeric_limits<value_type>::quiet_NaN();  ///< E[K cos^2(phi_l) 1]
  value_type m_l = 0;                                                  ///< E[L 1]
  value_type m_l_cos = 0;                                              ///< E[L cos(phi_l) 1]
  value_type m_l_sin2 = 0;                                             ///< E[L sin^2(phi_l) 1]
  value_type m_l_cos2 = 0;                                             ///< E[L cos^2(phi_l) 1]

  bool has_rss() const { return !std::isnan(m_k_sin2); }
};

/// Small- and large-altitude coefficients of the timing-only ACRB. Every
/// coefficient carries the 1/(eta rho N) factor.
struct LimitCoefficients {
  double alpha_xy = 0.0;  ///< lim_{h->0} ACRB_xy [km^2]
  double alpha_z = 0.0;   ///< lim_{h->0} ACRB_z [km^2]
  double beta_xy = 0.0;   ///< lim_{h->inf} ACRB_xy / h^2
  double beta_z = 0.0;    ///< lim_{h->inf} ACRB_z / h^2
};

namespace detail {

/// Quadruple precision. The z-bound formulas subtract terms that agree to
/// many digits when h is large or the cup is narrow; long double is not
/// enough there.
using real = __float128;

inline real sqrt_r(real x) { return sqrtq(x); }
inline real log1p_r(real x) { return log1pq(x); }
inline real sin_r(real x) { return sinq(x); }
inline real cos_r(real x) { return cosq(x); }

/// Cancellation-free building blocks shared by the closed forms.
struct CupTerms {
  real r, h, big_r, zeta, sin2;
  real dm;            ///< D_max
  real excess;        ///< D_max - h
  real log_ratio;     ///< log(D_max / h)
  real h_minus_dz;    ///< h - D_max zeta = R (1 - chi_max)

  explicit CupTerms(const SystemParams& p) {
    r = p.r;
    h = p.h;
    big_r = r + h;
    const real phi = p.phi_l_max;
    zeta = cos_r(phi);
    const real s = sin_r(phi);
    sin2 = s * s;
    const real half = sin_r(phi / 2);
    const real root = sqrt_r(big_r * big_r - r * r * sin2);
    excess = h * (r * 2 * half * half + r * r * sin2 / (big_r + root)) / (root + r * zeta);
    dm = h + excess;
    log_ratio = log1p_r(excess / h);
    h_minus_dz = excess * (dm + h) / (2 * r);
  }
};

inline double checked_bound(real value, const char* what) {
  const double v = static_cast<double>(value);
  if (!std::isfinite(v) || !(v > 0.0))
    throw DegenerateGeometry(std::string("closed-form ") + what + " is not finite and positive");
  return v;
}

}  // namespace detail

/// Closed-form moments of the per-satellite information terms.
inline MomentSet moment_integrals(const SystemParams& params) {
  params.validate();
  using detail::real;
  const detail::CupTerms t(params);
  const real er = params.eta_rho;
  const real r = t.r, h = t.h, big_r = t.big_r, dm = t.dm, lg = t.log_ratio;
  const real r2 = r * r, big_r2 = big_r * big_r;
  const real one_minus_chi = t.h_minus_dz / big_r;  // 1 - chi_max
  const real chi_max = 1 - one_minus_chi;

  MomentSet m;
  m.m_l = static_cast<long double>(er / (r * big_r) * lg);
  // E[L cos] = (eta rho / r^2)(1 - (R - r chi_max) / D_max), rearranged as
  // eta rho (D_max - h)(2r - (D_max - h)) / (2 r^2 R D_max).
  m.m_l_cos = static_cast<long double>(er * t.excess * (2 * r - t.excess) / (2 * r2 * big_r * dm));
  const real l_sin2 = 2 * er *
                      (lg * (big_r2 + r2) / (4 * r2 * r * big_r) -
                       one_minus_chi * (dm * dm + r * big_r * (1 + chi_max)) / (4 * r2 * dm * dm));
  m.m_l_sin2 = static_cast<long double>(l_sin2);
  m.m_l_cos2 = static_cast<long double>(er / (r * big_r) * lg - l_sin2);

  if (params.eta_split) {
    const real eta = *params.eta_split;
    const real rho = er / eta;
    const real diff = r2 - big_r2;
    const real inv_h2 = 1 / (h * h), inv_d2 = 1 / (dm * dm);
    const real pre = rho / (16 * r2 * r * big_r);
    m.m_k_sin2 = static_cast<long double>(
        pre * (4 * (2 * eta * (r2 + big_r2) - 1) * lg +
               (2 * eta * diff * diff - 4 * (r2 + big_r2)) * (inv_d2 - inv_h2) -
               4 * eta * r * big_r * one_minus_chi +
               diff * diff * (inv_d2 * inv_d2 - inv_h2 * inv_h2)));
    m.m_k_cos2 = static_cast<long double>(
        pre * (2 * diff * (eta * diff + 2) * (inv_h2 - inv_d2) - 4 * (2 * eta * (-diff) - 1) * lg +
               4 * eta * r * big_r * one_minus_chi +
               diff * diff * (inv_h2 * inv_h2 - inv_d2 * inv_d2)));
  }
  return m;
}

/// Independent quadrature oracle for moment_integrals: integrates the
/// per-satellite terms over the cup with an n-point Gauss-Legendre rule in
/// t = log D, where the 1/D^2 falloff becomes smooth. The cup edge comes from
/// the center/LT/satellite triangle rather than from the D_max expression.
inline MomentSet quadrature_moments(const SystemParams& params, std::size_t n_points = 128) {
  params.validate();
  if (n_points < 8) throw InvalidConfig("quadrature needs at least 8 nodes");
  const double r = params.r, h = params.h, big_r = params.orbit_radius();
  const double half = std::sin(0.5 * max_earth_angle(params));
  const double omega_max = 2.0 * half * half;
  const double d_edge = std::sqrt(h * h + 2.0 * r * big_r * omega_max);
  const bool rss = params.eta_split.has_value();
  const double eta = rss ? *params.eta_split : 0.0;
  const double rho = rss ? params.eta_rho / eta : 0.0;

  struct Point {
    double l, k, cos_l, sin2_l;
  };
  // omega = 1 - cos(phi_e) = (D^2 - h^2) / (2 r R); d omega = D^2 / (r R) dt.
  auto at = [&](double t) {
    const double d = std::exp(t);
    const double d2 = d * d;
    const double omega = (d - h) * (d + h) / (2.0 * r * big_r);
    const double jac = d2 / (r * big_r);
    Point p{};
    p.cos_l = (h - big_r * omega) / d;
    p.sin2_l = big_r * big_r * omega * (2.0 - omega) / d2;
    p.l = jac * 2.0 * params.eta_rho / d2;
    p.k = rss ? jac * 2.0 * rho / (d2 * d2) * (1.0 + eta * d2) : 0.0;
    return p;
  };
  const GaussLegendre rule(n_points);
  const double t0 = std::log(h), t1 = std::log(d_edge);
  auto expect = [&](auto f) { return 0.5 * rule.integrate([&](double t) { return f(at(t)); }, t0, t1); };

  MomentSet m;
  m.m_l = expect([](const Point& p) { return p.l; });
  m.m_l_cos = expect([](const Point& p) { return p.l * p.cos_l; });
  m.m_l_sin2 = expect([](const Point& p) { return p.l * p.sin2_l; });
  m.m_l_cos2 = expect([](const Point& p) { return p.l * p.cos_l * p.cos_l; });
  if (rss) {
    m.m_k_sin2 = expect([](const Point& p) { return p.k * p.sin2_l; });
    m.m_k_cos2 = expect([](const Point& p) { return p.k * p.cos_l * p.cos_l; });
  }
  return m;
}

/// Limit of N * CRB (timing + amplitude model), closed form.
inline BoundSet lcrb_tdoa_rss(const SystemParams& params) {
  params.validate();
  using detail::real;
  const detail::CupTerms t(params);
  const real eta = params.eta();
  const real rho = params.eta_rho / eta;
  const real r = t.r, h = t.h, big_r = t.big_r, dm = t.dm, lg = t.log_ratio;
  const real r2 = r * r, big_r2 = big_r * big_r, q = big_r2 - r2;
  const real h2 = h * h, d2 = dm * dm;
  const real quartic = (h2 * h2 - d2 * d2) / (d2 * d2 * h2 * h2);

  const real xy_den = 4 * (2 * eta * (big_r2 + r2) - 1) * lg +
                      2 * (eta * q * q - 2 * (big_r2 + r2)) * (h2 - d2) / (d2 * h2) -
                      4 * eta * r * t.h_minus_dz + q * q * quartic;
  const real cross = dm * (big_r + r * t.zeta) - q;
  const real z_den = 2 * q * (eta * q - 2) * (1 / h2 - 1 / d2) - 4 * (2 * eta * q - 1) * lg +
                     4 * eta * r * t.h_minus_dz - q * q * quartic -
                     16 * eta * cross * cross / (d2 * lg);
  return BoundSet::from_parts(detail::checked_bound(64 * big_r * r2 * r / (rho * xy_den), "LCRB_xy"),
                              detail::checked_bound(16 * big_r * r2 * r / (rho * z_den), "LCRB_z"));
}

/// Limit of N * CRB (timing-only model), closed form.
inline BoundSet lcrb_tdoa(const SystemParams& params) {
  params.validate();
  using detail::real;
  const detail::CupTerms t(params);
  const real er = params.eta_rho;
  const real r = t.r, h = t.h, big_r = t.big_r, dm = t.dm, lg = t.log_ratio;
  const real r2 = r * r;
  // R - r zeta^2 - zeta D_max
  const real tilt = r * t.sin2 + t.h_minus_dz;
  const real xy_den = er * (lg * (big_r * big_r + r2) / (8 * big_r * r2 * r) - tilt / (8 * big_r * r2));
  const real offset = big_r - (r * t.h_minus_dz + h * big_r) / dm;
  const real z_den = er * (tilt / (2 * big_r * r2) - h * (2 * r + h) / (2 * r2 * r * big_r) * lg -
                           offset * offset / (r2 * r * big_r * lg));
  return BoundSet::from_parts(detail::checked_bound(1 / xy_den, "LCRB_xy"),
                              detail::checked_bound(1 / z_den, "LCRB_z"));
}

inline BoundSet lcrb(Model model, const SystemParams& params) {
  return model == Model::tdoa ? lcrb_tdoa(params) : lcrb_tdoa_rss(params);
}

/// LCRB assembled from a MomentSet through the block-diagonal mean FIM:
/// xy = 4 / E[. sin^2], z = E[L] / (E[. cos^2] E[L] - E[L cos]^2).
inline BoundSet lcrb_from_moments(const MomentSet& m, Model model) {
  using value = MomentSet::value_type;
  const value sin2 = model == Model::tdoa ? m.m_l_sin2 : m.m_k_sin2;
  const value cos2 = model == Model::tdoa ? m.m_l_cos2 : m.m_k_cos2;
  const value xy = 4 / sin2;
  const value z = m.m_l / (cos2 * m.m_l - m.m_l_cos * m.m_l_cos);
  return BoundSet::from_parts(detail::checked_bound(xy, "LCRB_xy"), detail::checked_bound(z, "LCRB_z"));
}

/// Configuration-free approximation LCRB / N.
inline BoundSet acrb(const SystemParams& params, Model model = Model::tdoa) {
  const BoundSet l = lcrb(model, params);
  const double n = params.n_sats;
  return BoundSet::from_parts(l.xy / n, l.z / n);
}

/// alpha/beta coefficients of the timing-only ACRB for h -> 0 and h -> inf.
inline LimitCoefficients limit_coefficients(const SystemParams& params) {
  params.validate();
  using detail::real;
  const real phi = params.phi_l_max;
  const real r = params.r;
  const real scale = static_cast<real>(params.eta_rho) * params.n_sats;
  const real s = detail::sin_r(phi);
  const real sin2 = s * s;
  const real half = detail::sin_r(phi / 2);
  const real one_minus_zeta = 2 * half * half;
  const real zeta = detail::cos_r(phi);

  LimitCoefficients out;
  if (zeta <= 0) {
    // log(cos phi) -> -inf at the horizon.
    out.alpha_xy = 0.0;
    out.alpha_z = static_cast<double>(2 * r * r / (scale * sin2));
  } else {
    const real log_zeta = detail::log1p_r(-one_minus_zeta);
    out.alpha_xy = static_cast<double>(-8 * r * r / (scale * (2 * log_zeta + sin2)));
    out.alpha_z = static_cast<double>(
        2 * r * r / (scale * (sin2 + 2 * one_minus_zeta * one_minus_zeta / log_zeta)));
  }
  out.beta_xy = static_cast<double>(12 / (scale * (zeta + 2) * one_minus_zeta * one_minus_zeta));
  out.beta_z = static_cast<double>(12 / (scale * one_minus_zeta * one_minus_zeta * one_minus_zeta));
  return out;
}

/// alpha + beta h^2 approximation of the timing-only ACRB.
inline BoundSet aacrb(const SystemParams& params) {
  const LimitCoefficients k = limit_coefficients(params);
  const double h2 = params.h * params.h;
  return BoundSet::from_parts(k.alpha_xy + k.beta_xy * h2, k.alpha_z + k.beta_z * h2);
}

}  // namespace satcrb
