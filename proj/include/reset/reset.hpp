#pragma once

// The RESET meta-algorithm. Level i in {0..tau} (tau = log2 T) runs a base
// learner of horizon 2^i that restarts every 2^i trials. Each level i >= 1
// also carries a mixing weight mu^i, a two-expert Hedge weight between its
// own base action w^i and the propagating action z^{i-1} of the level below:
//
//   z^0 = w^0,   z^i = mu^i w^i + (1 - mu^i) z^{i-1},   x_t = z^tau.
//
// Level 0 has no mixing weight since z^0 never reads one.

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "reset/base.hpp"
#include "reset/domain.hpp"

namespace reset {

inline bool is_power_of_two(std::uint64_t n) { return std::has_single_bit(n); }

/// Two-expert exponential-weights step with rate sqrt(2 ln 2 / horizon):
///   psi = rho e^{-a eta} / (rho e^{-a eta} + (1 - rho) e^{-b eta}).
/// Both exponentials are scaled by e^{min(a,b) eta} first.
inline double psi(double rho, double a, double b, std::uint64_t horizon) {
  detail::require(rho >= 0.0 && rho <= 1.0, "psi: weight must lie in [0,1]");
  detail::require(horizon >= 1, "psi: horizon must be at least 1");
  detail::require(std::isfinite(a) && std::isfinite(b), "psi: losses must be finite");
  if (rho == 0.0 || rho == 1.0) return rho;
  const double eta = std::sqrt(2.0 * std::numbers::ln2 / static_cast<double>(horizon));
  const double floor = std::min(a, b);
  const double first = rho * std::exp(-(a - floor) * eta);
  const double second = (1.0 - rho) * std::exp(-(b - floor) * eta);
  return first / (first + second);
}

/// Coefficient of each base action in x_t given mixing weights for levels
/// 1..tau (index 0 of `mixing` is level 1):
///   c_i = mu^i prod_{j>i} (1 - mu^j),  c_0 = prod_{j>=1} (1 - mu^j).
inline std::vector<double> coefficients_from_mixing(std::span<const double> mixing) {
  const std::size_t levels = mixing.size() + 1;
  std::vector<double> coefficients(levels);
  double tail = 1.0;
  for (std::size_t i = levels - 1; i >= 1; --i) {
    const double mu = mixing[i - 1];
    coefficients[i] = mu * tail;
    tail *= 1.0 - mu;
  }
  coefficients[0] = tail;
  return coefficients;
}

template <LearnerFactory F>
class Reset {
 public:
  using Learner = std::remove_cvref_t<std::invoke_result_t<const F&, std::uint64_t>>;

  Reset(std::uint64_t horizon, F factory) : horizon_(horizon), factory_(std::move(factory)) {
    detail::require(horizon >= 1 && is_power_of_two(horizon),
                    "RESET horizon must be a power of two");
    const auto levels = static_cast<std::size_t>(std::countr_zero(horizon)) + 1;
    learners_.reserve(levels);
    for (std::size_t i = 0; i < levels; ++i) learners_.push_back(factory_(level_horizon(i)));
    mixing_.assign(levels - 1, 0.5);
    base_actions_.resize(levels);
    propagating_.resize(levels);
  }

  /// Plays trial t: queries every level and returns x_t = z^tau.
  const Action& query() {
    if (trial_ > horizon_) throw HorizonExhausted("RESET queried past its horizon");
    if (queried_) throw LifecycleError("RESET queried twice in one trial");
    for (std::size_t i = 0; i < levels(); ++i) base_actions_[i] = learners_[i].query();
    propagating_[0] = base_actions_[0];
    for (std::size_t i = 1; i < levels(); ++i) {
      const double mu = mixing_[i - 1];
      propagating_[i] = mu * base_actions_[i] + (1.0 - mu) * propagating_[i - 1];
    }
    queried_ = true;
    return propagating_.back();
  }

  /// Ends trial t. Levels whose period divides t restart; the others take a
  /// psi step on their mixing weight and pass the loss to their learner.
  void update(const LossFunction& loss) {
    if (trial_ > horizon_) throw HorizonExhausted("RESET updated past its horizon");
    if (!queried_) throw LifecycleError("RESET update without a preceding query");
    for (std::size_t i = 0; i < levels(); ++i) {
      const std::uint64_t period = level_horizon(i);
      if (trial_ % period == 0) {
        if (i > 0) mixing_[i - 1] = 0.5;
        learners_[i] = factory_(period);
      } else {
        // i >= 1 here: the period of level 0 divides every trial.
        mixing_[i - 1] = psi(mixing_[i - 1], loss.eval(base_actions_[i]),
                             loss.eval(propagating_[i - 1]), period);
        learners_[i].update(loss);
      }
    }
    queried_ = false;
    ++trial_;
  }

  /// Weight of each base action in the most recent x_t.
  std::vector<double> mixing_coefficients() const {
    if (!queried_) throw LifecycleError("mixing coefficients need a query for the current trial");
    return coefficients_from_mixing(mixing_);
  }

  std::uint64_t horizon() const { return horizon_; }
  std::size_t levels() const { return learners_.size(); }
  /// 1-based index of the trial to be played next.
  std::uint64_t trial() const { return trial_; }
  bool has_pending_query() const { return queried_; }

  static std::uint64_t level_horizon(std::size_t level) { return std::uint64_t{1} << level; }

  /// mu^level for level >= 1.
  double mixing_weight(std::size_t level) const {
    detail::require(level >= 1 && level < levels(), "mixing weights exist for levels 1..tau");
    return mixing_[level - 1];
  }
  std::span<const double> mixing_weights() const { return mixing_; }
  const Learner& learner(std::size_t level) const { return learners_.at(level); }
  std::span<const Action> base_actions() const { return base_actions_; }
  std::span<const Action> propagating_actions() const { return propagating_; }

 private:
  std::uint64_t horizon_;
  F factory_;
  std::vector<Learner> learners_;
  std::vector<double> mixing_;
  std::vector<Action> base_actions_;
  std::vector<Action> propagating_;
  std::uint64_t trial_ = 1;
  bool queried_ = false;
};

}  // namespace reset
