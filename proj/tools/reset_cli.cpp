// Command-line driver.
//
//   reset_cli run [--config file] [--T n] [--algo a] [--env e] [--segments s1,s2,...]
//                 [--seed k | --seeds k..m] [--assert-bounds] [--out-dir dir] ...
//   reset_cli decompose --T n --from q --to s
//   reset_cli constants
//
// Exit codes: 0 ok, 2 configuration error, 3 bound violation (--assert-bounds).

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reset/harness/config.hpp"
#include "reset/harness/experiment.hpp"
#include "reset/segtree.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitViolation = 3;

struct RunFlags {
  std::string config_path;
  std::optional<std::uint64_t> horizon;
  std::optional<std::string> algorithm;
  std::optional<std::string> environment;
  std::optional<std::string> segments;
  std::optional<std::string> seed;
  std::optional<std::string> seeds;
  std::optional<std::string> experts;
  std::optional<std::string> gap;
  std::optional<std::string> dimension;
  std::optional<std::string> drift;
  std::optional<std::string> scale;
  std::optional<std::string> out_dir;
  bool assert_bounds = false;
  std::vector<std::string> settings;
};

reset::harness::Config build_config(const RunFlags& f) {
  using namespace reset::harness;
  Config config;
  if (!f.config_path.empty()) config = parse_config_file(f.config_path);
  auto set = [&](const char* key, const std::optional<std::string>& v) {
    if (v) apply_setting(config, key, *v);
  };
  if (f.horizon) config.horizon = *f.horizon;
  set("algorithm.name", f.algorithm);
  set("environment.kind", f.environment);
  set("environment.segments", f.segments);
  set("environment.seed", f.seed);
  set("environment.seeds", f.seeds);
  set("environment.experts", f.experts);
  set("environment.gap", f.gap);
  set("environment.dimension", f.dimension);
  set("environment.drift", f.drift);
  set("environment.scale", f.scale);
  set("output.dir", f.out_dir);
  if (f.assert_bounds) config.assert_bounds = true;
  for (const auto& kv : f.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value");
    apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

int run_command(const RunFlags& flags) {
  using namespace reset::harness;
  Config config;
  try {
    config = build_config(flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  int status = kExitOk;
  for (auto seed = config.first_seed; seed <= config.last_seed; ++seed) {
    RunReport report;
    try {
      report = run_experiment(config, seed);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfig;
    }
    std::printf("seed=%llu T=%llu switching_regret=%.6f envelope=%.6f static_regret=%.6f",
                static_cast<unsigned long long>(seed),
                static_cast<unsigned long long>(config.horizon), report.switching_regret_true,
                report.switching_envelope, report.static_regret_total);
    if (report.dynamic_regret) std::printf(" dynamic_regret=%.6f", *report.dynamic_regret);
    std::printf("\n");
    if (!config.out_dir.empty()) write_outputs(report, config.out_dir);
    if (!report.violations.empty()) {
      nlohmann::json record = {{"seed", seed}, {"violations", report_json(report)["violations"]}};
      std::cerr << record.dump() << "\n";
      status = kExitViolation;
    }
  }
  return status;
}

int decompose_command(std::uint64_t horizon, std::uint64_t from, std::uint64_t to) {
  using namespace reset::segtree;
  std::vector<Vertex> vertices;
  try {
    vertices = fundamental_decomposition(from, to, horizon);
  } catch (const reset::ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  std::printf("height,first,last\n");
  std::uint64_t covered = 0;
  for (const auto& v : vertices) {
    std::printf("%u,%llu,%llu\n", v.height, static_cast<unsigned long long>(v.first),
                static_cast<unsigned long long>(v.last));
    covered += v.size();
  }
  const auto length = to - from + 1;
  const double lhs = block_sqrt_sum(vertices);
  const double rhs = kConstants.c * std::sqrt(static_cast<double>(length));
  std::printf("length=%llu covered=%llu\n", static_cast<unsigned long long>(length),
              static_cast<unsigned long long>(covered));
  std::printf("sum_sqrt_block=%.15g c_sqrt_length=%.15g holds=%s\n", lhs, rhs,
              lhs <= rhs ? "true" : "false");
  return kExitOk;
}

int constants_command() {
  const auto& k = reset::segtree::kConstants;
  std::printf("c     = %.15f\n", k.c);
  std::printf("d     = %.15f\n", k.d);
  std::printf("alpha = %.15f\n", k.alpha);
  std::printf("xi    = %.15f\n", k.xi);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Switching-regret experiments for the RESET meta-algorithm"};
  app.require_subcommand(1);

  RunFlags flags;
  auto* run = app.add_subcommand("run", "Run seeded experiments and write CSV/JSON reports");
  run->add_option("--config", flags.config_path, "INI configuration file");
  run->add_option("--T", flags.horizon, "Number of trials");
  run->add_option("--algo", flags.algorithm, "reset+hedge | reset+ogd | hedge | ogd");
  run->add_option("--env", flags.environment, "experts | quadratic");
  run->add_option("--segments", flags.segments, "Comma-separated segment start trials");
  run->add_option("--seed", flags.seed, "Single seed");
  run->add_option("--seeds", flags.seeds, "Inclusive seed range k..m");
  run->add_option("--experts", flags.experts, "Number of experts");
  run->add_option("--gap", flags.gap, "Best-expert loss gap in (0, 0.5]");
  run->add_option("--dimension", flags.dimension, "Quadratic environment dimension");
  run->add_option("--drift", flags.drift, "Comma-separated per-segment drift rates");
  run->add_option("--scale", flags.scale, "Quadratic loss scale");
  run->add_option("--out-dir", flags.out_dir, "Directory for CSV/JSON outputs");
  run->add_flag("--assert-bounds", flags.assert_bounds, "Exit 3 if a regret bound is violated");
  run->add_option("--set", flags.settings, "Override any config key: section.key=value");

  std::uint64_t horizon = 0;
  std::uint64_t from = 0;
  std::uint64_t to = 0;
  auto* decompose = app.add_subcommand("decompose", "Print the dyadic decomposition of a segment");
  decompose->add_option("--T", horizon, "Horizon (power of two)")->required();
  decompose->add_option("--from", from, "First trial")->required();
  decompose->add_option("--to", to, "Last trial")->required();

  auto* constants = app.add_subcommand("constants", "Print the bound constants c, d, alpha, xi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (run->parsed()) return run_command(flags);
  if (decompose->parsed()) return decompose_command(horizon, from, to);
  if (constants->parsed()) return constants_command();
  return kExitConfig;
}
