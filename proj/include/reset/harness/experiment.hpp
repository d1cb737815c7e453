#pragma once

// End-to-end runs: build the adversary, play the configured learner through
// the query -> loss -> update protocol, and compute every regret quantity
// together with its theoretical envelope.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reset/base.hpp"
#include "reset/domain.hpp"
#include "reset/harness/config.hpp"
#include "reset/harness/environment.hpp"
#include "reset/regret.hpp"
#include "reset/reset.hpp"
#include "reset/segment.hpp"
#include "reset/segtree.hpp"

namespace reset::harness {

struct TimingStats {
  double mean_ns = 0.0;
  double max_ns = 0.0;
  double total_ms = 0.0;
};

struct PlayResult {
  Trace trace;
  TimingStats timing;
};

/// Drives any learner exposing query()/update() through `losses`.
template <class Player>
PlayResult drive(Player& player, const ActionSet& set, const std::vector<LossFunction>& losses) {
  using Clock = std::chrono::steady_clock;
  PlayResult result{Trace(set), {}};
  double total_ns = 0.0;
  for (const auto& loss : losses) {
    const auto start = Clock::now();
    Action action = player.query();
    player.update(loss);
    const double ns = std::chrono::duration<double, std::nano>(Clock::now() - start).count();
    total_ns += ns;
    result.timing.max_ns = std::max(result.timing.max_ns, ns);
    result.trace.append(std::move(action), loss);
  }
  if (!losses.empty()) result.timing.mean_ns = total_ns / static_cast<double>(losses.size());
  result.timing.total_ms = total_ns * 1e-6;
  return result;
}

inline bool uses_reset(Algorithm a) { return a == Algorithm::ResetHedge || a == Algorithm::ResetOgd; }
inline bool uses_hedge(Algorithm a) { return a == Algorithm::ResetHedge || a == Algorithm::Hedge; }

/// Plays `algorithm` over a stream whose length is a power of two.
inline PlayResult play(Algorithm algorithm, const ActionSet& set, double gradient_bound,
                       const std::vector<LossFunction>& losses) {
  const auto horizon = static_cast<std::uint64_t>(losses.size());
  switch (algorithm) {
    case Algorithm::ResetHedge: {
      Reset learner(horizon, HedgeFactory{set});
      return drive(learner, set, losses);
    }
    case Algorithm::ResetOgd: {
      Reset learner(horizon, OgdFactory{set, gradient_bound});
      return drive(learner, set, losses);
    }
    case Algorithm::Hedge: {
      Hedge learner(set, horizon);
      return drive(learner, set, losses);
    }
    case Algorithm::Ogd: {
      OnlineGradientDescent learner(set, gradient_bound, horizon);
      return drive(learner, set, losses);
    }
  }
  throw ConfigError("unknown algorithm");
}

/// Appends identically-zero linear losses up to the next power of two.
inline std::vector<LossFunction> pad_to_power_of_two(std::vector<LossFunction> losses,
                                                     std::size_t dimension) {
  const auto target = std::bit_ceil(losses.size());
  while (losses.size() < target) losses.push_back(LossFunction::zero(dimension));
  return losses;
}

struct SegmentReport {
  Segment segment;
  double static_regret;
  std::optional<double> path_length;
};

struct Violation {
  std::string bound;
  double measured;
  double envelope;
};

struct RunReport {
  Config config;
  std::uint64_t seed = 0;
  std::uint64_t padded_horizon = 0;
  Segmentation segmentation = Segmentation::whole(1);
  Trace trace = Trace(ActionSet::simplex(1));
  double gamma = 0.0;

  std::vector<double> cumulative_loss;
  std::vector<double> cumulative_regret_true;  // against the per-segment hindsight optimum
  double switching_regret_true = 0.0;
  double static_regret_total = 0.0;
  std::vector<SegmentReport> per_segment;
  double switching_envelope = 0.0;  // (c gamma + d) sum sqrt|I_k|
  double static_envelope = 0.0;     // gamma sqrt(T)

  // Drifting-quadratic runs only.
  std::optional<ComparatorSequence> comparators;
  std::optional<double> dynamic_regret;
  std::optional<double> dynamic_split_envelope;   // sum_k sqrt((1 + P_k) |I_k|)
  std::optional<double> dynamic_single_envelope;  // sqrt((1 + P) T)

  TimingStats timing;
  std::vector<Violation> violations;
};

inline Segmentation segmentation_for(const Config& config) {
  if (config.horizon == 0) throw ConfigError("horizon must be positive");
  if (config.segment_starts.empty()) return Segmentation::whole(config.horizon);
  auto boundaries = config.segment_starts;
  if (boundaries.back() != config.horizon + 1) boundaries.push_back(config.horizon + 1);
  try {
    return Segmentation::from_boundaries(std::move(boundaries));
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("segments: ") + e.what());
  }
}

inline EnvironmentSpec environment_for(const Config& config, std::uint64_t seed) {
  auto segmentation = segmentation_for(config);
  if (config.environment == EnvironmentKind::Experts) {
    return {PiecewiseExperts{config.experts, std::move(segmentation), config.gap}, seed};
  }
  auto drift = config.drift.empty() ? std::vector<double>(segmentation.size(), 0.0) : config.drift;
  if (drift.size() != segmentation.size()) throw ConfigError("need one drift rate per segment");
  return {DriftingQuadratic{config.dimension, std::move(segmentation), std::move(drift),
                            config.scale},
          seed};
}

/// Subgradient norm bound of the environment's loss family.
inline double gradient_bound_for(const EnvironmentSpec& spec) {
  if (const auto* e = std::get_if<PiecewiseExperts>(&spec.variant)) {
    return linear_gradient_bound(e->experts);
  }
  const auto& q = std::get<DriftingQuadratic>(spec.variant);
  return quadratic_gradient_bound(q.scale, quadratic_action_set(q.dimension));
}

inline RunReport run_experiment(const Config& config, std::uint64_t seed) {
  if (config.environment == EnvironmentKind::Quadratic && uses_hedge(config.algorithm)) {
    throw ConfigError("Hedge needs the experts environment");
  }
  if (config.environment == EnvironmentKind::Quadratic && config.scale * 4.0 > 1.0) {
    // Unit ball, D = 2: larger scales let the clamp bind and the hindsight
    // comparator is no longer computed exactly.
    throw ConfigError("quadratic scale must not exceed 0.25");
  }
  RunReport report;
  report.config = config;
  report.seed = seed;

  std::vector<LossFunction> losses;
  const EnvironmentSpec spec = [&] {
    try {
      EnvironmentSpec built = environment_for(config, seed);
      if (const auto* e = std::get_if<PiecewiseExperts>(&built.variant)) {
        losses = gen_piecewise_experts(*e, seed);
      } else {
        auto stream = gen_drifting_quadratic(std::get<DriftingQuadratic>(built.variant), seed);
        losses = std::move(stream.losses);
        report.comparators = std::move(stream.minimisers);
      }
      return built;
    } catch (const ContractViolation& e) {
      throw ConfigError(e.what());
    }
  }();
  const ActionSet set = action_set_for(spec);
  const double gradient_bound = gradient_bound_for(spec);
  report.gamma = uses_hedge(config.algorithm) ? HedgeFactory{set}.gamma()
                                              : OgdFactory{set, gradient_bound}.gamma();
  report.segmentation = spec.segmentation();

  auto padded = pad_to_power_of_two(losses, set.dimension());
  report.padded_horizon = padded.size();
  PlayResult played = play(config.algorithm, set, gradient_bound, padded);
  report.timing = played.timing;

  // Zero padding changes no comparator difference, so regrets are taken on
  // the requested prefix.
  report.trace = Trace(set);
  for (std::uint64_t t = 1; t <= config.horizon; ++t) {
    const auto& rec = played.trace.at(t);
    report.trace.append(rec.action, rec.loss);
  }
  const Trace& trace = report.trace;

  const ComparatorSequence hindsight = hindsight_comparator(trace, report.segmentation);
  double cum_loss = 0.0;
  double cum_regret = 0.0;
  for (std::uint64_t t = 1; t <= trace.horizon(); ++t) {
    const auto& rec = trace.at(t);
    cum_loss += rec.value;
    cum_regret += rec.value - rec.loss.eval(hindsight[t - 1]);
    report.cumulative_loss.push_back(cum_loss);
    report.cumulative_regret_true.push_back(cum_regret);
  }

  for (const auto& segment : report.segmentation.segments()) {
    SegmentReport seg{segment, static_regret(trace, segment), std::nullopt};
    if (report.comparators) seg.path_length = path_length(*report.comparators, segment);
    report.switching_regret_true += seg.static_regret;
    report.per_segment.push_back(seg);
  }
  report.static_regret_total = static_regret(trace, {1, trace.horizon()});

  const auto lengths = report.segmentation.lengths();
  report.switching_envelope = segtree::switching_bound(lengths, report.gamma);
  report.static_envelope = report.gamma * std::sqrt(static_cast<double>(trace.horizon()));

  if (report.comparators) {
    report.dynamic_regret = dynamic_regret(trace, *report.comparators);
    double split = 0.0;
    for (const auto& seg : report.per_segment) {
      split += std::sqrt((1.0 + *seg.path_length) * static_cast<double>(seg.segment.length()));
    }
    report.dynamic_split_envelope = split;
    const double whole = path_length(*report.comparators, {1, trace.horizon()});
    report.dynamic_single_envelope =
        std::sqrt((1.0 + whole) * static_cast<double>(trace.horizon()));
  }

  if (config.assert_bounds) {
    const double k = config.envelope_scale;
    if (uses_reset(config.algorithm)) {
      if (report.switching_regret_true > k * report.switching_envelope) {
        report.violations.push_back(
            {"switching", report.switching_regret_true, k * report.switching_envelope});
      }
    } else if (report.static_regret_total > k * report.static_envelope) {
      report.violations.push_back({"static", report.static_regret_total, k * report.static_envelope});
    }
  }
  return report;
}

// ---------------------------------------------------------------- output

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// trial,loss,cum_loss,cum_regret_true_seg with 17 significant digits.
inline std::string trace_csv(const RunReport& report) {
  std::string out = "trial,loss,cum_loss,cum_regret_true_seg\n";
  for (std::uint64_t t = 1; t <= report.trace.horizon(); ++t) {
    out += std::to_string(t) + ',' + format_real(report.trace.at(t).value) + ',' +
           format_real(report.cumulative_loss[t - 1]) + ',' +
           format_real(report.cumulative_regret_true[t - 1]) + '\n';
  }
  return out;
}

inline nlohmann::json vector_json(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Vector vector_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline nlohmann::json config_json(const Config& c, std::uint64_t seed) {
  return {{"algorithm", to_string(c.algorithm)},
          {"environment", to_string(c.environment)},
          {"horizon", c.horizon},
          {"segments", c.segment_starts},
          {"experts", c.experts},
          {"gap", c.gap},
          {"dimension", c.dimension},
          {"drift", c.drift},
          {"scale", c.scale},
          {"seed", seed},
          {"assert_bounds", c.assert_bounds},
          {"envelope_scale", c.envelope_scale}};
}

inline nlohmann::json report_json(const RunReport& r) {
  nlohmann::json regrets = {{"switching_true_segmentation", r.switching_regret_true},
                            {"static_whole_horizon", r.static_regret_total},
                            {"total_loss", r.cumulative_loss.empty() ? 0.0 : r.cumulative_loss.back()}};
  nlohmann::json envelopes = {{"gamma", r.gamma},
                              {"switching", r.switching_envelope},
                              {"static", r.static_envelope}};
  if (r.dynamic_regret) {
    regrets["dynamic"] = *r.dynamic_regret;
    envelopes["dynamic_split"] = *r.dynamic_split_envelope;
    envelopes["dynamic_single"] = *r.dynamic_single_envelope;
  }
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& s : r.per_segment) {
    nlohmann::json entry = {{"first", s.segment.first},
                            {"last", s.segment.last},
                            {"length", s.segment.length()},
                            {"static_regret", s.static_regret}};
    if (s.path_length) entry["path_length"] = *s.path_length;
    segments.push_back(entry);
  }
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"bound", v.bound}, {"measured", v.measured}, {"envelope", v.envelope}});
  }
  return {{"config", config_json(r.config, r.seed)},
          {"padded_horizon", r.padded_horizon},
          {"regrets", regrets},
          {"envelopes", envelopes},
          {"per_segment", segments},
          {"violations", violations},
          {"timing",
           {{"mean_ns_per_trial", r.timing.mean_ns},
            {"max_ns_per_trial", r.timing.max_ns},
            {"total_ms", r.timing.total_ms}}}};
}

/// Full trace (action set, played actions and loss functions) so every
/// regret can be recomputed offline.
inline nlohmann::json trace_json(const Trace& trace) {
  const auto& set = trace.action_set();
  nlohmann::json set_json;
  if (set.is_simplex()) {
    set_json = {{"kind", "simplex"}, {"dimension", set.dimension()}};
  } else {
    set_json = {{"kind", "ball"}, {"center", vector_json(set.as_ball().center)},
                {"radius", set.as_ball().radius}};
  }
  nlohmann::json records = nlohmann::json::array();
  for (const auto& rec : trace.records()) {
    nlohmann::json loss;
    if (rec.loss.is_linear()) {
      loss = {{"kind", "linear"}, {"g", vector_json(rec.loss.as_linear().g)}};
    } else {
      loss = {{"kind", "quadratic"}, {"a", vector_json(rec.loss.as_quadratic().a)},
              {"scale", rec.loss.as_quadratic().scale}};
    }
    records.push_back({{"action", vector_json(rec.action)}, {"loss", loss}});
  }
  return {{"action_set", set_json}, {"records", records}};
}

inline Trace trace_from_json(const nlohmann::json& j) {
  const auto& s = j.at("action_set");
  ActionSet set = s.at("kind") == "simplex"
                      ? ActionSet::simplex(s.at("dimension").get<std::size_t>())
                      : ActionSet::ball(vector_from_json(s.at("center")), s.at("radius").get<double>());
  Trace trace(set);
  for (const auto& rec : j.at("records")) {
    const auto& l = rec.at("loss");
    LossFunction loss = l.at("kind") == "linear"
                            ? LossFunction::linear(vector_from_json(l.at("g")))
                            : LossFunction::clamped_quadratic(vector_from_json(l.at("a")),
                                                              l.at("scale").get<double>());
    trace.append(vector_from_json(rec.at("action")), std::move(loss));
  }
  return trace;
}

struct OutputPaths {
  std::filesystem::path csv;
  std::filesystem::path report;
  std::filesystem::path trace;
  std::optional<std::filesystem::path> violation;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

inline OutputPaths write_outputs(const RunReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string stem = "seed" + std::to_string(r.seed);
  OutputPaths paths{dir / ("trace_" + stem + ".csv"), dir / ("report_" + stem + ".json"),
                    dir / ("trace_" + stem + ".json"), std::nullopt};
  write_file(paths.csv, trace_csv(r));
  write_file(paths.report, report_json(r).dump(2) + "\n");
  write_file(paths.trace, trace_json(r.trace).dump() + "\n");
  if (!r.violations.empty()) {
    paths.violation = dir / ("violation_" + stem + ".json");
    nlohmann::json record = {{"seed", r.seed}, {"violations", report_json(r)["violations"]}};
    write_file(*paths.violation, record.dump(2) + "\n");
  }
  return paths;
}

}  // namespace reset::harness
