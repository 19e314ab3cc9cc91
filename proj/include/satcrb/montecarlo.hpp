#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "satcrb/closed_form.hpp"
#include "satcrb/coverage.hpp"
#include "satcrb/errors.hpp"
#include "satcrb/fim.hpp"
#include "satcrb/geometry.hpp"
#include "satcrb/parallel.hpp"
#include "satcrb/params.hpp"
#include "satcrb/random.hpp"

namespace satcrb {

/// Nearest-rank percentile (q in [0, 100]) of an ascending-sorted sample.
inline double nearest_rank(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

struct Percentiles {
  double p10 = 0.0;
  double median = 0.0;
  double p90 = 0.0;
};

inline Percentiles percentiles(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  return {nearest_rank(samples, 10.0), nearest_rank(samples, 50.0), nearest_rank(samples, 90.0)};
}

/// Empirical law of N * CRB over random constellations. Samples are stored
/// in trial order; singular draws are skipped and counted.
struct CrbDistribution {
  Model model = Model::tdoa;
  int n_sats = 0;
  int trials = 0;
  std::vector<double> samples_xy;
  std::vector<double> samples_z;
  int singular_count = 0;

  bool all_singular() const { return samples_xy.empty(); }
  Percentiles xy() const { return percentiles(samples_xy); }
  Percentiles z() const { return percentiles(samples_z); }
};

/// CRB of one random constellation; empty when the draw is unidentifiable.
/// Trial t of constellation size N always uses RNG stream (seed, N, t).
inline std::optional<BoundSet> trial_crb(const SystemParams& params, Model model, std::uint64_t seed,
                                         std::uint64_t trial) {
  const Constellation cons =
      sample_constellation(params, seed, static_cast<std::uint64_t>(params.n_sats), trial);
  const auto sats = visible_only(to_states(cons, params));
  if (sats.size() < 4) return std::nullopt;
  try {
    return crb_from_fim(fim(model, sats, params));
  } catch (const SingularInformation&) {
    return std::nullopt;
  }
}

inline CrbDistribution crb_distribution(const SystemParams& params, Model model, int trials,
                                        std::uint64_t seed) {
  params.validate();
  if (trials < 1) throw InvalidConfig("trials must be at least 1");
  std::vector<std::optional<BoundSet>> results(static_cast<std::size_t>(trials));
  parallel_for(results.size(), [&](std::size_t t) { results[t] = trial_crb(params, model, seed, t); });

  CrbDistribution out;
  out.model = model;
  out.n_sats = params.n_sats;
  out.trials = trials;
  const double n = params.n_sats;
  for (const auto& r : results) {
    if (!r) {
      ++out.singular_count;
      continue;
    }
    out.samples_xy.push_back(n * r->xy);
    out.samples_z.push_back(n * r->z);
  }
  return out;
}

struct ConvergenceRow {
  int n_sats = 0;
  Percentiles xy;
  Percentiles z;
  BoundSet lcrb;
  int singular_count = 0;
};

inline std::vector<ConvergenceRow> convergence_sweep(SystemParams params, Model model,
                                                     const std::vector<int>& n_list, int trials,
                                                     std::uint64_t seed) {
  if (n_list.empty()) throw InvalidConfig("n_list must not be empty");
  const BoundSet limit = lcrb(model, params);
  std::vector<ConvergenceRow> rows;
  rows.reserve(n_list.size());
  for (const int n : n_list) {
    params.n_sats = n;
    const CrbDistribution dist = crb_distribution(params, model, trials, seed);
    rows.push_back({n, dist.xy(), dist.z(), limit, dist.singular_count});
  }
  return rows;
}

enum class SweepAxis { h, phi_l_max };

struct SweepRow {
  double axis_value = 0.0;  ///< km for h, radians for phi_l_max
  Percentiles xy;           ///< of CRB (not N * CRB)
  Percentiles z;
  BoundSet acrb;
  double coverage_prob = 0.0;
  bool covered = false;  ///< coverage_prob >= 0.9
  int singular_count = 0;
};

inline constexpr double kCoverageGate = 0.9;

/// CRB percentiles along one parameter axis. Every grid point reuses the same
/// per-trial random streams, so neighbouring points see the same draws.
inline std::vector<SweepRow> parameter_sweep(SystemParams params, Model model, SweepAxis axis,
                                             const std::vector<double>& grid, int trials,
                                             std::uint64_t seed) {
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const double value : grid) {
    (axis == SweepAxis::h ? params.h : params.phi_l_max) = value;
    SweepRow row;
    row.axis_value = value;
    row.coverage_prob = coverage_prob(params);
    row.covered = row.coverage_prob >= kCoverageGate;
    row.acrb = acrb(params, model);
    const CrbDistribution dist = crb_distribution(params, model, trials, seed);
    const double n = params.n_sats;
    auto scale = [n](Percentiles p) { return Percentiles{p.p10 / n, p.median / n, p.p90 / n}; };
    row.xy = scale(dist.xy());
    row.z = scale(dist.z());
    row.singular_count = dist.singular_count;
    rows.push_back(row);
  }
  return rows;
}

/// Average per-satellite information summand, invisible positions counted as
/// zero. Positions follow a randomly shifted stratified lattice on the sphere:
/// cos(phi_e) in stratum i, azimuth on a golden-ratio sequence. Each point is
/// still marginally uniform, but the theta averages cancel far faster than
/// with independent draws.
inline Eigen::Matrix4d mean_fim(const SystemParams& params, Model model, int n_samples, std::uint64_t seed) {
  params.validate();
  if (n_samples < 1) throw InvalidConfig("n_samples must be positive");
  rng::Stream rs(seed, 0x6d65616e66696dULL);
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  const double shift = rs.uniform();
  const double n = n_samples;
  FisherMatrix sum;
  std::vector<SatelliteState> one(1);
  for (int i = 0; i < n_samples; ++i) {
    const double chi = -1.0 + 2.0 * (i + rs.uniform()) / n;
    const double frac = std::fmod(i * golden + shift, 1.0);
    one[0] = e_to_l(std::acos(std::clamp(chi, -1.0, 1.0)), params, 2.0 * std::numbers::pi * frac);
    sum += fim(model, one, params);
  }
  return sum.m / n;
}

/// Fraction of sampled constellations with at least four visible satellites.
inline double empirical_coverage(const SystemParams& params, int trials, std::uint64_t seed) {
  std::vector<char> hit(static_cast<std::size_t>(trials));
  parallel_for(hit.size(), [&](std::size_t t) {
    const Constellation cons =
        sample_constellation(params, seed, static_cast<std::uint64_t>(params.n_sats), t);
    int count = 0;
    for (const auto& s : cons.sats) count += e_to_l(s.phi_e, params).visible;
    hit[t] = count >= 4;
  });
  return static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / trials;
}

}  // namespace satcrb
