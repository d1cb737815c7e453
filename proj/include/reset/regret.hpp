#pragma once

// Regret accounting over a recorded trace: best fixed action in hindsight on
// a segment, static regret R(I), switching regret over a segmentation,
// dynamic regret against a comparator sequence, and path length.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "reset/domain.hpp"
#include "reset/segment.hpp"

namespace reset {

struct TraceRecord {
  Action action;
  LossFunction loss;
  double value;  // loss.eval(action)
};

/// Per-trial record of played actions and revealed losses.
class Trace {
 public:
  explicit Trace(ActionSet set) : set_(std::move(set)) {}

  void append(Action action, LossFunction loss) {
    detail::require(loss.valid_on(set_), "trace: loss not admissible on the action set");
    const double value = loss.eval(action);
    records_.push_back({std::move(action), std::move(loss), value});
  }

  std::uint64_t horizon() const { return records_.size(); }
  const ActionSet& action_set() const { return set_; }
  /// 1-based access.
  const TraceRecord& at(std::uint64_t trial) const { return records_.at(trial - 1); }
  const std::vector<TraceRecord>& records() const { return records_; }

  double played_loss(const Segment& segment) const {
    check(segment);
    double total = 0.0;
    for (auto t = segment.first; t <= segment.last; ++t) total += at(t).value;
    return total;
  }

  void check(const Segment& segment) const {
    detail::require(segment.first >= 1 && segment.first <= segment.last, "empty segment");
    detail::require(segment.last <= horizon(), "segment exceeds the trace");
  }

 private:
  ActionSet set_;
  std::vector<TraceRecord> records_;
};

/// epsilon_1 .. epsilon_{T+1}; element t-1 holds epsilon_t.
using ComparatorSequence = std::vector<Action>;

struct Comparator {
  Action action;
  double loss;
};

/// Objective slack of the numerical hindsight solver.
inline constexpr double kHindsightTolerance = 1e-6;

namespace detail {

inline Comparator best_vertex(const Trace& trace, const Segment& segment) {
  Vector totals = Vector::Zero(static_cast<Eigen::Index>(trace.action_set().dimension()));
  for (auto t = segment.first; t <= segment.last; ++t) totals += trace.at(t).loss.as_linear().g;
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < totals.size(); ++j) {
    if (totals[j] < totals[best]) best = j;
  }
  Action vertex = Vector::Zero(totals.size());
  vertex[best] = 1.0;
  return {std::move(vertex), totals[best]};
}

inline double segment_objective(const Trace& trace, const Segment& segment, const Vector& x) {
  double total = 0.0;
  for (auto t = segment.first; t <= segment.last; ++t) total += trace.at(t).loss.eval(x);
  return total;
}

// Projected subgradient descent with normalised steps D / sqrt(k) from `x`.
// Keeps the first best iterate.
inline Comparator descend(const Trace& trace, const Segment& segment, Vector x) {
  const auto& set = trace.action_set();
  Comparator best{x, segment_objective(trace, segment, x)};
  const double diameter = set.diameter();
  const std::uint64_t iterations = 10 * segment.length();
  for (std::uint64_t k = 1; k <= iterations; ++k) {
    Vector g = Vector::Zero(x.size());
    for (auto t = segment.first; t <= segment.last; ++t) g += trace.at(t).loss.subgradient(x);
    const double norm = g.norm();
    if (norm == 0.0) break;
    x = set.project(x - (diameter / std::sqrt(static_cast<double>(k))) * (g / norm));
    const double value = segment_objective(trace, segment, x);
    if (value < best.loss) best = {x, value};
  }
  return best;
}

// Warm start at the projected scale-weighted mean of the quadratic
// minimisers, which is exact when no clamp binds on the set. If some clamp
// can bind the objective is not convex, so the best projected minimiser is
// tried as a second start.
inline Comparator projected_descent(const Trace& trace, const Segment& segment) {
  const auto& set = trace.action_set();
  const double diameter = set.diameter();
  Vector weighted = Vector::Zero(static_cast<Eigen::Index>(set.dimension()));
  double weight = 0.0;
  bool clamp_can_bind = false;
  for (auto t = segment.first; t <= segment.last; ++t) {
    const auto& loss = trace.at(t).loss;
    if (!loss.is_quadratic()) continue;
    const auto& q = loss.as_quadratic();
    weighted += q.scale * q.a;
    weight += q.scale;
    clamp_can_bind = clamp_can_bind || q.scale * diameter * diameter > 1.0;
  }
  Comparator best = descend(trace, segment, weight > 0.0 ? set.project(weighted / weight) : set.center());
  if (!clamp_can_bind) return best;

  Vector start;
  double start_value = std::numeric_limits<double>::infinity();
  for (auto t = segment.first; t <= segment.last; ++t) {
    const auto& loss = trace.at(t).loss;
    if (!loss.is_quadratic()) continue;
    Vector candidate = set.project(loss.as_quadratic().a);
    const double value = segment_objective(trace, segment, candidate);
    if (value < start_value) {
      start_value = value;
      start = std::move(candidate);
    }
  }
  Comparator other = descend(trace, segment, std::move(start));
  if (other.loss < best.loss) best = std::move(other);
  return best;
}

}  // namespace detail

/// Minimiser of the segment's cumulative loss over the action set. Exact
/// (lowest-index vertex) for linear losses on the simplex, otherwise
/// numerical: within kHindsightTolerance while scale * D^2 <= 1, a best
/// effort upper bound once the clamp can bind.
inline Comparator best_in_hindsight(const Trace& trace, const Segment& segment) {
  trace.check(segment);
  bool all_linear = true;
  for (auto t = segment.first; t <= segment.last && all_linear; ++t) {
    all_linear = trace.at(t).loss.is_linear();
  }
  if (all_linear && trace.action_set().is_simplex()) return detail::best_vertex(trace, segment);
  return detail::projected_descent(trace, segment);
}

inline double static_regret(const Trace& trace, const Segment& segment) {
  return trace.played_loss(segment) - best_in_hindsight(trace, segment).loss;
}

inline double switching_regret(const Trace& trace, const Segmentation& segmentation) {
  detail::require(segmentation.horizon() == trace.horizon(),
                  "segmentation does not cover the trace");
  double total = 0.0;
  for (const auto& segment : segmentation.segments()) total += static_regret(trace, segment);
  return total;
}

/// Piecewise-constant comparator equal to the hindsight-best action on each
/// segment; epsilon_{T+1} repeats epsilon_T.
inline ComparatorSequence hindsight_comparator(const Trace& trace,
                                               const Segmentation& segmentation) {
  detail::require(segmentation.horizon() == trace.horizon(),
                  "segmentation does not cover the trace");
  ComparatorSequence out;
  out.reserve(trace.horizon() + 1);
  for (const auto& segment : segmentation.segments()) {
    const Action best = best_in_hindsight(trace, segment).action;
    for (auto t = segment.first; t <= segment.last; ++t) out.push_back(best);
  }
  out.push_back(out.back());
  return out;
}

inline double dynamic_regret(const Trace& trace, const ComparatorSequence& comparators) {
  detail::require(comparators.size() == trace.horizon() + 1,
                  "comparator sequence must hold T+1 actions");
  double total = 0.0;
  for (std::uint64_t t = 1; t <= trace.horizon(); ++t) {
    const auto& rec = trace.at(t);
    total += rec.value - rec.loss.eval(comparators[t - 1]);
  }
  return total;
}

/// sum over t in the segment of ||epsilon_{t+1} - epsilon_t||_2.
inline double path_length(const ComparatorSequence& comparators, const Segment& segment) {
  detail::require(segment.first >= 1 && segment.first <= segment.last, "empty segment");
  detail::require(segment.last + 1 <= comparators.size(), "comparator sequence too short");
  double total = 0.0;
  for (auto t = segment.first; t <= segment.last; ++t) {
    total += (comparators[t] - comparators[t - 1]).norm();
  }
  return total;
}

}  // namespace reset
