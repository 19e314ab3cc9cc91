#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "satcrb/errors.hpp"
#include "satcrb/geometry.hpp"
#include "satcrb/params.hpp"

namespace satcrb {

enum class Model { tdoa, tdoa_rss };

inline const char* to_string(Model m) { return m == Model::tdoa ? "tdoa" : "tdoa_rss"; }

/// 4x4 information matrix for gamma = (x, y, z, T0). T0 is carried in
/// distance units (c * T0), so every entry is in km^-2.
struct FisherMatrix {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();

  FisherMatrix& operator+=(const FisherMatrix& other) {
    m += other.m;
    return *this;
  }
};

/// Bounds on the horizontal, vertical and total squared error [km^2].
struct BoundSet {
  double xy = 0.0;
  double z = 0.0;
  double xyz = 0.0;

  static BoundSet from_parts(double xy, double z) { return {xy, z, xy + z}; }
};

/// Timing-only information scale L_i = 2 eta rho / D_i^2.
inline double timing_info(double d, const SystemParams& params) {
  return 2.0 * params.eta_rho / (d * d);
}

/// Timing plus amplitude information scale K_i = (2 rho / D^4)(1 + eta D^2).
inline double rss_info(double d, const SystemParams& params) {
  const double d2 = d * d;
  return 2.0 * params.rho() / (d2 * d2) + 2.0 * params.eta_rho / d2;
}

namespace detail {

inline void add_summand(Eigen::Matrix4d& j, const Eigen::Vector3d& v, double k_scale, double l_scale) {
  j.topLeftCorner<3, 3>().noalias() += k_scale * v * v.transpose();
  j.block<3, 1>(0, 3) -= l_scale * v;
  j.block<1, 3>(3, 0) -= l_scale * v.transpose();
  j(3, 3) += l_scale;
}

}  // namespace detail

/// Information matrix of the timing + amplitude model. Invisible satellites
/// contribute nothing; an empty visible set yields the zero matrix.
inline FisherMatrix fim_tdoa_rss(std::span<const SatelliteState> sats, const SystemParams& params) {
  FisherMatrix out;
  for (const auto& s : sats) {
    if (!s.visible) continue;
    detail::add_summand(out.m, s.direction(), rss_info(s.d, params), timing_info(s.d, params));
  }
  return out;
}

/// Information matrix of the timing-only model: sum of L_i u_i u_i^T with
/// u_i = (direction_i, -1).
inline FisherMatrix fim_tdoa(std::span<const SatelliteState> sats, const SystemParams& params) {
  FisherMatrix out;
  for (const auto& s : sats) {
    if (!s.visible) continue;
    const double l = timing_info(s.d, params);
    detail::add_summand(out.m, s.direction(), l, l);
  }
  return out;
}

inline FisherMatrix fim(Model model, std::span<const SatelliteState> sats, const SystemParams& params) {
  return model == Model::tdoa ? fim_tdoa(sats, params) : fim_tdoa_rss(sats, params);
}

inline constexpr double kMaxConditionNumber = 1e12;

/// 2-norm condition number of a symmetric matrix (infinite when not positive definite).
template <typename Scalar, int N>
double condition_number(const Eigen::Matrix<Scalar, N, N>& j) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, N, N>> eig(j, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const Scalar lo = ev.minCoeff();
  const Scalar hi = ev.maxCoeff();
  if (!(lo > 0)) return std::numeric_limits<double>::infinity();
  return static_cast<double>(hi / lo);
}

/// Inverts an information matrix behind the condition-number gate.
template <typename Scalar, int N>
Eigen::Matrix<Scalar, N, N> checked_inverse(const Eigen::Matrix<Scalar, N, N>& j) {
  if (!j.allFinite()) throw SingularInformation("information matrix has non-finite entries");
  Eigen::FullPivLU<Eigen::Matrix<Scalar, N, N>> lu(j);
  const Scalar det = lu.determinant();
  if (!(det > 0)) throw SingularInformation("information matrix has non-positive determinant");
  const double cond = condition_number(j);
  if (!(cond <= kMaxConditionNumber))
    throw SingularInformation("information matrix condition number " + std::to_string(cond) +
                              " exceeds 1e12");
  return lu.inverse();
}

/// CRB_xy = [J^-1]_11 + [J^-1]_22, CRB_z = [J^-1]_33.
inline BoundSet crb_from_fim(const FisherMatrix& j) {
  const Eigen::Matrix4d inv = checked_inverse(j.m);
  return BoundSet::from_parts(inv(0, 0) + inv(1, 1), inv(2, 2));
}

}  // namespace satcrb
