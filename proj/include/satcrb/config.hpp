#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "satcrb/errors.hpp"
#include "satcrb/params.hpp"
#include "satcrb/signal.hpp"

namespace satcrb {

enum class OutputFormat { csv, json };

struct RunConfig {
  SystemParams params;
  SignalConfig signal;
  std::uint64_t seed = 1;
  std::string output_path;  ///< empty writes to stdout
  OutputFormat format = OutputFormat::csv;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double to_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidConfig("config key '" + key + "': '" + text + "' is not a number");
  }
}

inline std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size() || text.find('-') != std::string::npos) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidConfig("config key '" + key + "': '" + text + "' is not an unsigned integer");
  }
}

}  // namespace detail

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw InvalidConfig("format must be csv or json, got '" + s + "'");
}

/// Applies one key. Angles are given in degrees.
inline void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  using detail::to_number;
  if (key == "r") cfg.params.r = to_number(key, value);
  else if (key == "h") cfg.params.h = to_number(key, value);
  else if (key == "phi_l_max") cfg.params.phi_l_max = deg_to_rad(to_number(key, value));
  else if (key == "eta_rho") cfg.params.eta_rho = to_number(key, value);
  else if (key == "eta") cfg.params.eta_split = to_number(key, value);
  else if (key == "n_sats") {
    const auto n = detail::to_unsigned(key, value);
    if (n < 1 || n > 100000000) throw InvalidConfig("n_sats out of range");
    cfg.params.n_sats = static_cast<int>(n);
  } else if (key == "c") {
    cfg.params.c = to_number(key, value);
    cfg.signal.c = cfg.params.c;
  } else if (key == "seed") cfg.seed = detail::to_unsigned(key, value);
  else if (key == "output_path") cfg.output_path = value;
  else if (key == "format") cfg.format = parse_format(value);
  else if (key == "pulse") cfg.signal.pulse = parse_pulse(value);
  else if (key == "pulse_width") cfg.signal.pulse_width = to_number(key, value);
  else if (key == "sample_rate") cfg.signal.sample_rate = to_number(key, value);
  else if (key == "obs_window") cfg.signal.obs_window = to_number(key, value);
  else if (key == "n0") cfg.signal.n0 = to_number(key, value);
  else if (key == "es_max") cfg.signal.es_max = to_number(key, value);
  else throw InvalidConfig("unknown config key '" + key + "'");
}

/// Parses either flat `key = value` lines (# starts a comment) or a JSON
/// object with the same keys.
inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  const std::string body = detail::trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidConfig(std::string("malformed JSON config: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
      if (value.is_string()) apply_config_value(cfg, key, value.get<std::string>());
      else if (value.is_number()) apply_config_value(cfg, key, value.dump());
      else throw InvalidConfig("config key '" + key + "' must be a number or string");
    }
  } else {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw InvalidConfig("config line " + std::to_string(lineno) + ": expected key = value");
      apply_config_value(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
  }
  cfg.params.validate();
  cfg.signal.validate();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace satcrb
