#pragma once

// Base learners. A base learner is constructed for a known horizon (the
// number of trials it will be run for) and then driven by alternating
// query()/update() calls. Constructing a fresh instance plays the role of
// INITIALISE.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <memory>
#include <string>

#include "reset/domain.hpp"

namespace reset {

template <class L>
concept BaseLearner = std::move_constructible<L> && std::is_move_assignable_v<L> &&
                      requires(L learner, const L& view, const LossFunction& loss) {
                        { view.query() } -> std::convertible_to<Action>;
                        learner.update(loss);
                        { view.horizon() } -> std::convertible_to<std::uint64_t>;
                        { view.trials_consumed() } -> std::convertible_to<std::uint64_t>;
                      };

/// Callable producing a freshly initialised learner for a given horizon.
template <class F>
concept LearnerFactory = requires(const F& factory, std::uint64_t horizon) {
  { factory(horizon) } -> BaseLearner;
};

namespace detail {

// Shared lifecycle bookkeeping: one query must precede each update, and at
// most `horizon` updates may be applied.
class Lifecycle {
 public:
  explicit Lifecycle(std::uint64_t horizon) : horizon_(horizon) {
    require(horizon >= 1, "learner horizon must be at least 1");
  }

  std::uint64_t horizon() const { return horizon_; }
  std::uint64_t consumed() const { return consumed_; }

  void on_query() const {
    if (consumed_ >= horizon_) throw HorizonExhausted("learner queried past its horizon");
    queried_ = true;
  }

  void on_update() {
    if (!queried_) throw LifecycleError("update without a preceding query");
    queried_ = false;
    ++consumed_;
  }

 private:
  std::uint64_t horizon_;
  std::uint64_t consumed_ = 0;
  mutable bool queried_ = false;
};

}  // namespace detail

/// Projected online gradient descent with the fixed step D / (G sqrt(horizon)),
/// which gives regret at most D*G*sqrt(horizon) over the horizon.
class OnlineGradientDescent {
 public:
  OnlineGradientDescent(ActionSet set, double gradient_bound, std::uint64_t horizon)
      : set_(std::move(set)), lifecycle_(horizon), current_(set_.center()) {
    detail::require(std::isfinite(gradient_bound) && gradient_bound > 0.0,
                    "gradient bound must be positive");
    step_size_ = set_.diameter() / (gradient_bound * std::sqrt(static_cast<double>(horizon)));
  }

  const Action& query() const {
    lifecycle_.on_query();
    return current_;
  }

  void update(const LossFunction& loss) {
    lifecycle_.on_update();
    current_ = set_.project(current_ - step_size_ * loss.subgradient(current_));
  }

  double step_size() const { return step_size_; }
  const ActionSet& action_set() const { return set_; }
  std::uint64_t horizon() const { return lifecycle_.horizon(); }
  std::uint64_t trials_consumed() const { return lifecycle_.consumed(); }

 private:
  ActionSet set_;
  detail::Lifecycle lifecycle_;
  Action current_;
  double step_size_ = 0.0;
};

/// Exponential weights over the vertices of the simplex with rate
/// sqrt(8 ln(N) / horizon); regret at most sqrt(horizon ln(N) / 2).
///
/// Weights are recomputed from cumulative losses on every query, shifted by
/// the minimum so the largest exponent is zero.
class Hedge {
 public:
  Hedge(const ActionSet& set, std::uint64_t horizon) : lifecycle_(horizon) {
    detail::require(set.is_simplex(), "Hedge requires a simplex action set");
    const auto n = set.dimension();
    cumulative_ = Vector::Zero(static_cast<Eigen::Index>(n));
    rate_ = std::sqrt(8.0 * std::log(static_cast<double>(n)) / static_cast<double>(horizon));
  }

  Action query() const {
    lifecycle_.on_query();
    return weights();
  }

  void update(const LossFunction& loss) {
    detail::require(loss.is_linear(), "Hedge requires linear losses");
    detail::require(loss.dimension() == static_cast<std::size_t>(cumulative_.size()),
                    "Hedge: loss dimension mismatch");
    lifecycle_.on_update();
    cumulative_ += loss.as_linear().g;
  }

  /// Current probability vector without touching the lifecycle.
  Action weights() const {
    const double best = cumulative_.minCoeff();
    Vector w = (-rate_ * (cumulative_.array() - best)).exp().matrix();
    return w / w.sum();
  }

  double rate() const { return rate_; }
  const Vector& cumulative_losses() const { return cumulative_; }
  std::uint64_t horizon() const { return lifecycle_.horizon(); }
  std::uint64_t trials_consumed() const { return lifecycle_.consumed(); }

 private:
  detail::Lifecycle lifecycle_;
  Vector cumulative_;
  double rate_ = 0.0;
};

struct OgdFactory {
  ActionSet set;
  double gradient_bound;

  OnlineGradientDescent operator()(std::uint64_t horizon) const {
    return OnlineGradientDescent(set, gradient_bound, horizon);
  }
  /// Regret constant: R([L]) <= gamma * sqrt(L).
  double gamma() const { return set.diameter() * gradient_bound; }
};

struct HedgeFactory {
  ActionSet set;

  Hedge operator()(std::uint64_t horizon) const { return Hedge(set, horizon); }
  double gamma() const { return std::sqrt(std::log(static_cast<double>(set.dimension())) / 2.0); }
};

/// Call counters shared by every `Counted` learner built from one factory.
struct CallCounters {
  std::uint64_t initialisations = 0;
  std::uint64_t queries = 0;
  std::uint64_t updates = 0;
  std::int64_t live = 0;
};

/// Instrumented learner: forwards to `L` and records every call.
template <BaseLearner L>
class Counted {
 public:
  Counted(L inner, std::shared_ptr<CallCounters> counters)
      : inner_(std::move(inner)), counters_(std::move(counters)) {
    ++counters_->initialisations;
    ++counters_->live;
  }
  Counted(const Counted& other) : inner_(other.inner_), counters_(other.counters_) {
    ++counters_->live;
  }
  Counted(Counted&& other) noexcept : inner_(std::move(other.inner_)), counters_(other.counters_) {
    ++counters_->live;
  }
  Counted& operator=(const Counted&) = default;
  Counted& operator=(Counted&& other) noexcept {
    inner_ = std::move(other.inner_);
    return *this;
  }
  ~Counted() { --counters_->live; }

  decltype(auto) query() const {
    ++counters_->queries;
    return inner_.query();
  }
  void update(const LossFunction& loss) {
    ++counters_->updates;
    inner_.update(loss);
  }
  std::uint64_t horizon() const { return inner_.horizon(); }
  std::uint64_t trials_consumed() const { return inner_.trials_consumed(); }
  const L& inner() const { return inner_; }

 private:
  L inner_;
  std::shared_ptr<CallCounters> counters_;
};

template <LearnerFactory F>
struct CountingFactory {
  F inner;
  std::shared_ptr<CallCounters> counters = std::make_shared<CallCounters>();

  auto operator()(std::uint64_t horizon) const {
    return Counted<decltype(inner(horizon))>(inner(horizon), counters);
  }
};

}  // namespace reset
