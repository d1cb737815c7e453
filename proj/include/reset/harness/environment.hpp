#pragma once

// Synthetic non-stationary adversaries.
//
// Draw order (fixed; traces depend on it bit for bit):
//   experts:   one best-expert index per segment in segment order, then for
//              each trial t and each expert j in index order one uniform.
//   quadratic: d normals and one uniform for the start point, then d normals
//              per trial t = 1..T-1 for the step direction.

#include <cmath>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "reset/domain.hpp"
#include "reset/harness/rng.hpp"
#include "reset/regret.hpp"
#include "reset/segment.hpp"

namespace reset::harness {

/// Experts problem whose best expert switches at each segment boundary. The
/// best expert of a segment loses with probability 0.5 - gap, every other
/// expert with probability 0.5.
struct PiecewiseExperts {
  std::size_t experts;
  Segmentation segmentation;
  double gap;
};

/// Clamped quadratics min(1, scale ||x - a_t||^2) over the unit ball whose
/// minimiser a_t takes random-direction steps of length drift[k] during
/// segment k (then projected back into the ball).
struct DriftingQuadratic {
  std::size_t dimension;
  Segmentation segmentation;
  std::vector<double> drift;
  double scale;
};

struct EnvironmentSpec {
  std::variant<PiecewiseExperts, DriftingQuadratic> variant;
  std::uint64_t seed = 0;

  const Segmentation& segmentation() const {
    return std::visit([](const auto& v) -> const Segmentation& { return v.segmentation; }, variant);
  }
  std::uint64_t horizon() const { return segmentation().horizon(); }
};

inline ActionSet experts_action_set(std::size_t experts) { return ActionSet::simplex(experts); }

inline ActionSet quadratic_action_set(std::size_t dimension) {
  return ActionSet::ball(Vector::Zero(static_cast<Eigen::Index>(dimension)), 1.0);
}

inline ActionSet action_set_for(const EnvironmentSpec& spec) {
  if (const auto* e = std::get_if<PiecewiseExperts>(&spec.variant)) {
    return experts_action_set(e->experts);
  }
  return quadratic_action_set(std::get<DriftingQuadratic>(spec.variant).dimension);
}

inline std::vector<LossFunction> gen_piecewise_experts(const PiecewiseExperts& env,
                                                       std::uint64_t seed) {
  detail::require(env.experts >= 1, "experts environment needs at least one expert");
  detail::require(env.gap > 0.0 && env.gap <= 0.5, "gap must lie in (0, 0.5]");
  Rng rng(seed);
  const auto& seg = env.segmentation;
  // Consecutive segments get different best experts whenever N > 1.
  std::vector<std::size_t> best(seg.size());
  for (std::size_t k = 0; k < seg.size(); ++k) {
    if (k == 0 || env.experts == 1) {
      best[k] = rng.index(env.experts);
    } else {
      const auto other = rng.index(env.experts - 1);
      best[k] = other >= best[k - 1] ? other + 1 : other;
    }
  }
  std::vector<LossFunction> losses;
  losses.reserve(seg.horizon());
  for (std::uint64_t t = 1; t <= seg.horizon(); ++t) {
    const std::size_t b = best[seg.segment_of(t)];
    Vector g(static_cast<Eigen::Index>(env.experts));
    for (std::size_t j = 0; j < env.experts; ++j) {
      const double p = j == b ? 0.5 - env.gap : 0.5;
      g[static_cast<Eigen::Index>(j)] = rng.bernoulli(p) ? 1.0 : 0.0;
    }
    losses.push_back(LossFunction::linear(std::move(g)));
  }
  return losses;
}

struct QuadraticStream {
  std::vector<LossFunction> losses;
  ComparatorSequence minimisers;  // T+1 entries, the last repeating a_T
};

inline QuadraticStream gen_drifting_quadratic(const DriftingQuadratic& env, std::uint64_t seed) {
  detail::require(env.dimension >= 1, "quadratic environment needs dimension >= 1");
  detail::require(env.drift.size() == env.segmentation.size(),
                  "need exactly one drift rate per segment");
  for (double d : env.drift) {
    detail::require(std::isfinite(d) && d >= 0.0 && d <= 2.0, "drift rates must lie in [0, 2]");
  }
  const ActionSet set = quadratic_action_set(env.dimension);
  detail::require(std::isfinite(env.scale) && env.scale > 0.0, "scale must be positive");
  const auto dim = static_cast<Eigen::Index>(env.dimension);
  Rng rng(seed);
  auto direction = [&] {
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal();
    const double n = v.norm();
    return n > 0.0 ? Vector(v / n) : Vector(Vector::Unit(dim, 0));
  };

  const std::uint64_t horizon = env.segmentation.horizon();
  QuadraticStream out;
  out.minimisers.reserve(horizon + 1);
  const Vector start_dir = direction();
  const double start_radius = 0.5 * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
  out.minimisers.push_back(set.project(start_radius * start_dir));
  for (std::uint64_t t = 1; t < horizon; ++t) {
    const double step = env.drift[env.segmentation.segment_of(t)];
    const Vector dir = direction();
    out.minimisers.push_back(set.project(out.minimisers.back() + step * dir));
  }
  out.minimisers.push_back(out.minimisers.back());
  out.losses.reserve(horizon);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    out.losses.push_back(LossFunction::clamped_quadratic(out.minimisers[t - 1], env.scale));
  }
  return out;
}

}  // namespace reset::harness
