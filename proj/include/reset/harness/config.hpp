#pragma once

// Experiment configuration: an INI-style file with [algorithm],
// [environment] and [output] sections. Every key can be overridden from the
// command line.
//
//   [algorithm]
//   name = reset+hedge          ; reset+hedge | reset+ogd | hedge | ogd
//   [environment]
//   kind = experts              ; experts | quadratic
//   horizon = 1024
//   segments = 1,129,513,769    ; segment start trials (sigma list)
//   experts = 10
//   gap = 0.25
//   dimension = 2
//   drift = 0,0.05              ; one rate per segment
//   scale = 0.25
//   seed = 1                    ; or: seeds = 1..20
//   [output]
//   dir = out
//   assert_bounds = false

#include <charconv>
#include <fstream>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace reset::harness {

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Algorithm { ResetHedge, ResetOgd, Hedge, Ogd };
enum class EnvironmentKind { Experts, Quadratic };

struct Config {
  Algorithm algorithm = Algorithm::ResetHedge;
  EnvironmentKind environment = EnvironmentKind::Experts;
  std::uint64_t horizon = 1024;
  /// Segment start trials; empty means a single segment.
  std::vector<std::uint64_t> segment_starts;
  std::size_t experts = 10;
  double gap = 0.25;
  std::size_t dimension = 2;
  std::vector<double> drift;  // empty means zero drift everywhere
  double scale = 0.25;
  std::uint64_t first_seed = 1;
  std::uint64_t last_seed = 1;
  std::string out_dir;
  bool assert_bounds = false;
  /// Multiplies every envelope before the assert_bounds comparison.
  double envelope_scale = 1.0;
};

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ResetHedge: return "reset+hedge";
    case Algorithm::ResetOgd: return "reset+ogd";
    case Algorithm::Hedge: return "hedge";
    case Algorithm::Ogd: return "ogd";
  }
  return "?";
}

inline std::string to_string(EnvironmentKind e) {
  return e == EnvironmentKind::Experts ? "experts" : "quadratic";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "reset+hedge") return Algorithm::ResetHedge;
  if (s == "reset+ogd") return Algorithm::ResetOgd;
  if (s == "hedge") return Algorithm::Hedge;
  if (s == "ogd") return Algorithm::Ogd;
  throw ConfigError("unknown algorithm '" + s + "'");
}

inline EnvironmentKind parse_environment(const std::string& s) {
  if (s == "experts") return EnvironmentKind::Experts;
  if (s == "quadratic") return EnvironmentKind::Quadratic;
  throw ConfigError("unknown environment '" + s + "'");
}

inline std::uint64_t parse_uint(const std::string& s) {
  std::uint64_t value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected an integer, got '" + s + "'");
  return value;
}

inline double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("expected a number, got '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("expected a boolean, got '" + s + "'");
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream stream(s);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("empty entry in list '" + s + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

inline std::vector<std::uint64_t> parse_uint_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(s)) out.push_back(parse_uint(item));
  return out;
}

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_double(item));
  return out;
}

/// "k" or "k..m" (inclusive).
inline std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const auto k = parse_uint(s);
    return {k, k};
  }
  const auto lo = parse_uint(s.substr(0, dots));
  const auto hi = parse_uint(s.substr(dots + 2));
  if (hi < lo) throw ConfigError("seed range '" + s + "' is empty");
  return {lo, hi};
}

/// Applies one `section.key = value` setting.
inline void apply_setting(Config& config, const std::string& key, const std::string& value) {
  if (key == "algorithm.name") config.algorithm = parse_algorithm(value);
  else if (key == "environment.kind") config.environment = parse_environment(value);
  else if (key == "environment.horizon") config.horizon = parse_uint(value);
  else if (key == "environment.segments") config.segment_starts = parse_uint_list(value);
  else if (key == "environment.experts") config.experts = parse_uint(value);
  else if (key == "environment.gap") config.gap = parse_double(value);
  else if (key == "environment.dimension") config.dimension = parse_uint(value);
  else if (key == "environment.drift") config.drift = parse_double_list(value);
  else if (key == "environment.scale") config.scale = parse_double(value);
  else if (key == "environment.seed" || key == "environment.seeds") {
    std::tie(config.first_seed, config.last_seed) = parse_seed_range(value);
  } else if (key == "output.dir") config.out_dir = value;
  else if (key == "output.assert_bounds") config.assert_bounds = parse_bool(value);
  else if (key == "output.envelope_scale") {
    config.envelope_scale = parse_double(value);
    if (!(config.envelope_scale > 0.0)) throw ConfigError("envelope_scale must be positive");
  }
  else throw ConfigError("unknown configuration key '" + key + "'");
}

inline Config parse_config(std::istream& in, Config config = {}) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, value] : body) apply_setting(config, section + "." + key, value.data());
  }
  return config;
}

inline Config parse_config_file(const std::string& path, Config config = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, std::move(config));
}

}  // namespace reset::harness
