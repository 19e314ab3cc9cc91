#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "satcrb/closed_form.hpp"
#include "satcrb/config.hpp"
#include "satcrb/coverage.hpp"
#include "satcrb/errors.hpp"
#include "satcrb/ml.hpp"
#include "satcrb/montecarlo.hpp"
#include "satcrb/planar.hpp"
#include "satcrb/table.hpp"

namespace satcrb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitVerifyFailed = 4;

struct Grid {
  double from = 0.0;
  double to = 0.0;
  int points = 0;

  std::vector<double> values() const {
    if (points < 1) throw InvalidConfig("--points must be at least 1");
    if (points == 1) return {from};
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = from + (to - from) * i / (points - 1);
    return v;
  }
};

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    out.push_back(detail::to_number("list", item));
  }
  if (out.empty()) throw InvalidConfig("empty list '" + text + "'");
  return out;
}

inline Model parse_model(const std::string& s) {
  if (s == "tdoa") return Model::tdoa;
  if (s == "tdoa_rss") return Model::tdoa_rss;
  throw InvalidConfig("model must be tdoa or tdoa_rss");
}

inline MlMode parse_mode(const std::string& s) {
  if (s == "fix_z") return MlMode::fix_z;
  if (s == "full_3d") return MlMode::full_3d;
  throw InvalidConfig("mode must be fix_z or full_3d");
}

/// Writes to the configured output path, or to `out` when none is set.
inline void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.output_path, std::ios::binary);
  if (!file) throw InvalidConfig("cannot write '" + cfg.output_path + "'");
  file << text;
}

inline std::string render(const Table& t, OutputFormat f) {
  std::ostringstream ss;
  t.write(ss, f);
  return ss.str();
}

enum class Axis { h, phi };

inline Axis parse_axis(const std::string& s) {
  if (s == "h") return Axis::h;
  if (s == "phi") return Axis::phi;
  throw InvalidConfig("axis must be h or phi");
}

inline Grid default_grid(Axis axis) { return axis == Axis::h ? Grid{500.0, 40000.0, 80} : Grid{5.0, 90.0, 80}; }

/// Sets the swept parameter; phi values are in degrees.
inline void set_axis(SystemParams& p, Axis axis, double value) {
  if (axis == Axis::h) p.h = value;
  else p.phi_l_max = deg_to_rad(value);
}

inline int cmd_bounds(const RunConfig& cfg, Axis axis, const Grid& grid, Model model, std::ostream& out) {
  Table t({"axis_value", "lcrb_xy", "lcrb_z", "acrb_xy", "acrb_z", "aacrb_xy", "aacrb_z", "alpha_xy", "alpha_z",
           "beta_xy", "beta_z", "coverage_prob", "covered"});
  for (const double v : grid.values()) {
    SystemParams p = cfg.params;
    set_axis(p, axis, v);
    p.validate();
    const BoundSet l = lcrb(model, p);
    const BoundSet a = acrb(p, model);
    const BoundSet aa = aacrb(p);
    const LimitCoefficients k = limit_coefficients(p);
    const double cov = coverage_prob(p);
    t.add_row({v, l.xy, l.z, a.xy, a.z, aa.xy, aa.z, k.alpha_xy, k.alpha_z, k.beta_xy, k.beta_z, cov,
               cov >= kCoverageGate});
  }
  emit(cfg, out, render(t, cfg.format));
  return kExitOk;
}

inline int cmd_montecarlo(const RunConfig& cfg, Model model, int trials, const std::vector<int>& n_list,
                          std::optional<Axis> axis, const Grid& grid, std::ostream& out) {
  if (!axis) {
    Table t({"N", "median_xy", "p10_xy", "p90_xy", "median_z", "p10_z", "p90_z", "lcrb_xy", "lcrb_z",
             "singular_count"});
    for (const auto& r : convergence_sweep(cfg.params, model, n_list, trials, cfg.seed))
      t.add_row({static_cast<long long>(r.n_sats), r.xy.median, r.xy.p10, r.xy.p90, r.z.median, r.z.p10, r.z.p90,
                 r.lcrb.xy, r.lcrb.z, static_cast<long long>(r.singular_count)});
    emit(cfg, out, render(t, cfg.format));
    return kExitOk;
  }
  std::vector<double> values = grid.values();
  std::vector<double> internal = values;
  if (*axis == Axis::phi)
    for (double& v : internal) v = deg_to_rad(v);
  const auto rows = parameter_sweep(cfg.params, model, *axis == Axis::h ? SweepAxis::h : SweepAxis::phi_l_max,
                                    internal, trials, cfg.seed);
  Table t({"axis_value", "median_xy", "p10_xy", "p90_xy", "median_z", "p10_z", "p90_z", "acrb_xy", "acrb_z",
           "coverage_prob", "covered", "singular_count"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    t.add_row({values[i], r.xy.median, r.xy.p10, r.xy.p90, r.z.median, r.z.p10, r.z.p90, r.acrb.xy, r.acrb.z,
               r.coverage_prob, r.covered, static_cast<long long>(r.singular_count)});
  }
  emit(cfg, out, render(t, cfg.format));
  return kExitOk;
}

enum class CoverageQuery { prob, min_angle, min_height };

inline CoverageQuery parse_query(const std::string& s) {
  if (s == "prob") return CoverageQuery::prob;
  if (s == "min_angle") return CoverageQuery::min_angle;
  if (s == "min_height") return CoverageQuery::min_height;
  throw InvalidConfig("query must be prob, min_angle or min_height");
}

inline int cmd_coverage(const RunConfig& cfg, CoverageQuery query, double target, std::ostream& out) {
  const SystemParams& p = cfg.params;
  nlohmann::ordered_json j;
  j["query"] = query == CoverageQuery::prob ? "prob" : query == CoverageQuery::min_angle ? "min_angle" : "min_height";
  j["n_sats"] = p.n_sats;
  j["r"] = p.r;
  j["h"] = p.h;
  j["phi_l_max"] = rad_to_deg(p.phi_l_max);
  if (query == CoverageQuery::prob) {
    const CoverageResult c = coverage(p);
    j["p"] = c.p;
    j["p_cov"] = c.p_cov;
  } else {
    j["target"] = target;
    if (query == CoverageQuery::min_angle) {
      const double phi = min_angle_for_coverage(p, target);
      SystemParams q = p;
      q.phi_l_max = phi;
      j["min_angle"] = rad_to_deg(phi);
      j["p_cov"] = coverage_prob(q);
    } else {
      const double h = min_height_for_coverage(p, target);
      SystemParams q = p;
      q.h = h;
      j["min_height"] = h;
      j["p_cov"] = coverage_prob(q);
    }
  }
  emit(cfg, out, j.dump(2) + "\n");
  return kExitOk;
}

inline int cmd_ml(const RunConfig& cfg, const std::vector<double>& snr_db, int trials, MlMode mode,
                  std::ostream& out) {
  const MlScenario sc = reference_scenario(cfg.params);
  const auto rows = mse_experiment(sc, cfg.signal, snr_db, trials, cfg.seed, mode);
  Table t({"snr_db", "mse_xy", "mse_xyz", "crb_xy", "crb_xyz"});
  for (const auto& r : rows) t.add_row({r.snr_db, r.mse_xy, r.mse_xyz, r.crb_xy, r.crb_xyz});
  emit(cfg, out, render(t, cfg.format));
  return kExitOk;
}

namespace detail {

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline double max_moment_error(const MomentSet& a, const MomentSet& b) {
  double e = std::max({rel(a.m_l, b.m_l), rel(a.m_l_cos, b.m_l_cos), rel(a.m_l_sin2, b.m_l_sin2),
                       rel(a.m_l_cos2, b.m_l_cos2)});
  if (a.has_rss() && b.has_rss()) e = std::max({e, rel(a.m_k_sin2, b.m_k_sin2), rel(a.m_k_cos2, b.m_k_cos2)});
  return e;
}

inline double max_bound_error(const BoundSet& a, const BoundSet& b) { return std::max(rel(a.xy, b.xy), rel(a.z, b.z)); }

inline planar::PlanarSensors random_planar(rng::Stream& rs, double c) {
  planar::PlanarSensors s;
  const int m = 3 + static_cast<int>(rs.uniform() * 6.0);
  for (int i = 0; i < m; ++i) {
    s.angles.push_back(rs.uniform(0.0, 2.0 * std::numbers::pi));
    s.distances.push_back(rs.uniform(1.0, 10.0));
  }
  s.gamma = rs.uniform(1.0, 4.0);
  s.w_e = rs.uniform(1e5, 1e7);
  s.rho = rs.uniform(1.0, 100.0);
  s.c = c;
  return s;
}

}  // namespace detail

/// Runs the cross-oracle checks. `perturb` scales eta_rho in the closed-form
/// side of each comparison only, which must make the checks fail.
inline int cmd_verify(const RunConfig& cfg, double perturb, std::ostream& out) {
  using detail::max_bound_error;
  using detail::max_moment_error;
  std::ostringstream log;
  bool all = true;
  auto check = [&](const std::string& name, double value, double tol) {
    const bool ok = value < tol;
    all = all && ok;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %-26s value=%.6e tol=%.1e\n", ok ? "PASS" : "FAIL", name.c_str(), value, tol);
    log << buf;
  };

  SystemParams base = cfg.params;
  if (!base.eta_split) base.eta_split = 1e3;
  SystemParams shifted = base;
  shifted.eta_rho *= perturb;

  check("moments_vs_quadrature", max_moment_error(moment_integrals(shifted), quadrature_moments(base)), 1e-8);
  const MomentSet moments = moment_integrals(base);
  check("lcrb_tdoa_routes", max_bound_error(lcrb_tdoa(shifted), lcrb_from_moments(moments, Model::tdoa)), 1e-9);
  check("lcrb_tdoa_rss_routes",
        max_bound_error(lcrb_tdoa_rss(shifted), lcrb_from_moments(moments, Model::tdoa_rss)), 1e-9);
  check("visibility_forms", detail::rel(visibility_prob(base), visibility_prob_distance_form(base)), 1e-12);

  SystemParams big = base;
  big.n_sats = 2000;
  const CrbDistribution dist = crb_distribution(big, Model::tdoa, 200, cfg.seed);
  const BoundSet limit = lcrb_tdoa(shifted);
  check("montecarlo_median_xy", detail::rel(dist.xy().median, limit.xy), 0.05);
  check("montecarlo_median_z", detail::rel(dist.z().median, limit.z), 0.05);

  rng::Stream rs(cfg.seed, 0x706c616e6172ULL);
  double planar_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    planar::PlanarSensors s = detail::random_planar(rs, base.c);
    const double fim_route = planar::planar_crb_fim(s);
    s.rho *= perturb;
    planar_err = std::max(planar_err, detail::rel(planar::planar_crb_closed(s), fim_route));
  }
  check("planar_closed_vs_fim", planar_err, 1e-10);

  SignalConfig sig = cfg.signal;
  check("decoupling", decoupling_check(reference_scenario(base), sig), 1e-3);

  log << (all ? "verify: all checks passed\n" : "verify: FAILED\n");
  emit(cfg, out, log.str());
  return all ? kExitOk : kExitVerifyFailed;
}

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"satcrb: localization bounds for random satellite constellations"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path, format, model = "tdoa";
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "flat key=value or JSON configuration file");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "csv or json");

  std::string axis_text, n_list_text = "250,500,1000,2000,4000", query_text = "prob", snr_text = "0,5,10,15,20,25,30,35,40",
                                  mode_text = "full_3d";
  std::optional<double> from, to;
  std::optional<int> points;
  int trials = 200;
  double target = 0.9, perturb = 1.0;

  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--axis", axis_text, "sweep axis: h [km] or phi [deg]");
    sub->add_option("--from", from, "first grid value");
    sub->add_option("--to", to, "last grid value");
    sub->add_option("--points", points, "number of grid points");
  };

  CLI::App* bounds = app.add_subcommand("bounds", "closed-form bounds along h or phi_l_max");
  add_grid(bounds);
  bounds->add_option("--model", model, "tdoa or tdoa_rss");

  CLI::App* mc = app.add_subcommand("montecarlo", "random-constellation CRB statistics");
  add_grid(mc);
  mc->add_option("--model", model, "tdoa or tdoa_rss");
  mc->add_option("--trials", trials, "constellations per point");
  mc->add_option("--n-list", n_list_text, "comma-separated constellation sizes");

  CLI::App* cov = app.add_subcommand("coverage", "coverage probability and inverse design queries");
  cov->add_option("--query", query_text, "prob, min_angle or min_height");
  cov->add_option("--target", target, "target coverage probability");

  CLI::App* ml = app.add_subcommand("ml", "maximum-likelihood MSE against the CRB");
  ml->add_option("--snr", snr_text, "comma-separated Es/N0 values [dB]");
  ml->add_option("--trials", trials, "trials per SNR point");
  ml->add_option("--mode", mode_text, "fix_z or full_3d");

  CLI::App* verify = app.add_subcommand("verify", "run the cross-oracle checks");
  verify->add_option("--perturb-eta-rho", perturb, "scale eta_rho in one path only")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!out_path.empty()) cfg.output_path = out_path;
    if (!format.empty()) cfg.format = parse_format(format);
    if (trials < 1) throw InvalidConfig("--trials must be positive");

    auto grid_for = [&](Axis axis) {
      Grid g = default_grid(axis);
      if (from) g.from = *from;
      if (to) g.to = *to;
      if (points) g.points = *points;
      return g;
    };

    if (*bounds) {
      const Axis axis = axis_text.empty() ? Axis::h : parse_axis(axis_text);
      return cmd_bounds(cfg, axis, grid_for(axis), parse_model(model), out);
    }
    if (*mc) {
      std::vector<int> n_list;
      for (const double v : parse_list(n_list_text)) {
        if (v < 1 || v != std::floor(v)) throw InvalidConfig("--n-list entries must be positive integers");
        n_list.push_back(static_cast<int>(v));
      }
      std::optional<Axis> axis;
      if (!axis_text.empty()) axis = parse_axis(axis_text);
      return cmd_montecarlo(cfg, parse_model(model), trials, n_list, axis, grid_for(axis.value_or(Axis::h)), out);
    }
    if (*cov) return cmd_coverage(cfg, parse_query(query_text), target, out);
    if (*ml) return cmd_ml(cfg, parse_list(snr_text), trials, parse_mode(mode_text), out);
    if (*verify) return cmd_verify(cfg, perturb, out);
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDegenerate;
  }
  return kExitUsage;
}

}  // namespace satcrb::cli
