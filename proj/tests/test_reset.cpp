#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "reset/reset.hpp"
#include "reset/segtree.hpp"

namespace {

using namespace reset;

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// Learner that always plays a fixed action chosen from its horizon, so each
// level of RESET has a distinct, predictable base action.
class FixedLearner {
 public:
  FixedLearner(Action action, std::uint64_t horizon) : action_(std::move(action)), horizon_(horizon) {}
  const Action& query() const { return action_; }
  void update(const LossFunction&) { ++consumed_; }
  std::uint64_t horizon() const { return horizon_; }
  std::uint64_t trials_consumed() const { return consumed_; }

 private:
  Action action_;
  std::uint64_t horizon_;
  std::uint64_t consumed_ = 0;
};

// Level i plays the i-th vertex of the simplex.
struct VertexPerLevel {
  std::size_t n;
  FixedLearner operator()(std::uint64_t horizon) const {
    Action e = Vector::Zero(static_cast<Eigen::Index>(n));
    e[std::countr_zero(horizon)] = 1.0;
    return FixedLearner(e, horizon);
  }
};

struct SameAction {
  Action action;
  FixedLearner operator()(std::uint64_t horizon) const { return FixedLearner(action, horizon); }
};

static_assert(BaseLearner<FixedLearner>);
static_assert(LearnerFactory<VertexPerLevel>);

LossFunction random_linear(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector g(static_cast<Eigen::Index>(n));
  for (auto& x : g) x = unit(rng);
  return LossFunction::linear(g);
}

TEST(Psi, EqualLossesLeaveWeightUnchanged) {
  for (double rho : {0.0, 0.1, 0.5, 0.93, 1.0}) EXPECT_NEAR(psi(rho, 0.37, 0.37, 9), rho, 1e-15);
}

TEST(Psi, DegenerateWeightIsFixed) { EXPECT_EQ(psi(1.0, 0.9, 0.1, 4), 1.0); }

TEST(Psi, MatchesHighPrecisionValue) {
  // mpmath, 60 digits: psi(0.5, 0, 1, 1) with rate sqrt(2 ln 2).
  EXPECT_NEAR(psi(0.5, 0.0, 1.0, 1), 0.76448179940357119043, 1e-15);
}

TEST(Psi, RejectsWeightOutsideUnitInterval) {
  EXPECT_THROW(psi(-0.1, 0, 0, 1), ContractViolation);
  EXPECT_THROW(psi(1.1, 0, 0, 1), ContractViolation);
  EXPECT_THROW(psi(0.5, 0, 0, 0), ContractViolation);
}

TEST(Psi, StableFormMatchesDirectFormula) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double rho = unit(rng);
    const double a = unit(rng);
    const double b = unit(rng);
    const std::uint64_t horizon = 1 + i % 100;
    const double eta = std::sqrt(2.0 * std::log(2.0) / static_cast<double>(horizon));
    const double direct = rho * std::exp(-a * eta) /
                          (rho * std::exp(-a * eta) + (1 - rho) * std::exp(-b * eta));
    const double value = psi(rho, a, b, horizon);
    EXPECT_NEAR(value, direct, 1e-14);
    if (a < b && rho > 0 && rho < 1) {
      EXPECT_GT(value, rho);
    }
    if (a > b && rho > 0 && rho < 1) {
      EXPECT_LT(value, rho);
    }
  }
}

TEST(Psi, IteratesToTwoPointExponentialWeights) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int seq = 0; seq < 200; ++seq) {
    const std::uint64_t horizon = 1 + seq % 64;
    const double eta = std::sqrt(2.0 * std::log(2.0) / static_cast<double>(horizon));
    double rho = 0.5;
    double sum_a = 0.0;
    double sum_b = 0.0;
    for (std::uint64_t t = 0; t < horizon; ++t) {
      const double a = unit(rng);
      const double b = unit(rng);
      rho = psi(rho, a, b, horizon);
      sum_a += a;
      sum_b += b;
      EXPECT_NEAR(rho, oracle::two_point_posterior(sum_a, sum_b, eta), 1e-12);
    }
  }
}

TEST(ResetNew, SingleLevel) {
  Reset r(1, HedgeFactory{ActionSet::simplex(3)});
  EXPECT_EQ(r.levels(), 1u);
  EXPECT_EQ(r.learner(0).horizon(), 1u);
  EXPECT_TRUE(r.mixing_weights().empty());
}

TEST(ResetNew, EightTrialsHaveFourLevels) {
  Reset r(8, HedgeFactory{ActionSet::simplex(3)});
  ASSERT_EQ(r.levels(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(r.learner(i).horizon(), std::uint64_t{1} << i);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(r.mixing_weight(i), 0.5);
  EXPECT_EQ(r.trial(), 1u);
}

TEST(ResetNew, RejectsNonPowerOfTwo) {
  EXPECT_THROW(Reset(6, HedgeFactory{ActionSet::simplex(3)}), ContractViolation);
  EXPECT_THROW(Reset(0, HedgeFactory{ActionSet::simplex(3)}), ContractViolation);
}

TEST(ResetQuery, SingleLevelIsTheBaseLearner) {
  const auto set = ActionSet::simplex(4);
  Reset r(1, OgdFactory{set, 1.0});
  OnlineGradientDescent ogd(set, 1.0, 1);
  EXPECT_EQ(r.query(), ogd.query());
}

TEST(ResetQuery, IdenticalBaseActionsPassThrough) {
  const Action w = vec({0.1, 0.6, 0.3});
  Reset r(16, SameAction{w});
  std::mt19937_64 rng(3);
  for (int t = 0; t < 16; ++t) {
    EXPECT_LT((r.query() - w).norm(), 1e-15);
    r.update(random_linear(rng, 3));
  }
}

TEST(ResetQuery, ThreeLevelsWithEqualWeights) {
  Reset r(4, VertexPerLevel{3});
  const Action x = r.query();
  EXPECT_DOUBLE_EQ(x[0], 0.25);
  EXPECT_DOUBLE_EQ(x[1], 0.25);
  EXPECT_DOUBLE_EQ(x[2], 0.5);
}

TEST(ResetQuery, LifecycleErrors) {
  Reset r(2, HedgeFactory{ActionSet::simplex(2)});
  EXPECT_THROW(r.update(LossFunction::zero(2)), LifecycleError);
  EXPECT_THROW((void)r.mixing_coefficients(), LifecycleError);
  (void)r.query();
  EXPECT_THROW((void)r.query(), LifecycleError);
  r.update(LossFunction::zero(2));
  (void)r.query();
  r.update(LossFunction::zero(2));
  EXPECT_THROW((void)r.query(), HorizonExhausted);
  EXPECT_THROW(r.update(LossFunction::zero(2)), HorizonExhausted);
}

TEST(ResetUpdate, ResetsAtTrialFourOfEight) {
  Reset r(8, VertexPerLevel{4});
  const auto loss = LossFunction::linear(vec({0.9, 0.1, 0.4, 0.2}));
  for (int t = 1; t <= 3; ++t) {
    (void)r.query();
    r.update(loss);
  }
  (void)r.query();
  const double mu3 = r.mixing_weight(3);
  const double expected = psi(mu3, loss.eval(r.base_actions()[3]),
                              loss.eval(r.propagating_actions()[2]), 8);
  r.update(loss);
  for (std::size_t i = 0; i <= 2; ++i) EXPECT_EQ(r.learner(i).trials_consumed(), 0u) << i;
  EXPECT_EQ(r.mixing_weight(1), 0.5);
  EXPECT_EQ(r.mixing_weight(2), 0.5);
  EXPECT_EQ(r.learner(3).trials_consumed(), 4u);
  EXPECT_EQ(r.mixing_weight(3), expected);
  EXPECT_NE(r.mixing_weight(3), 0.5);
}

TEST(ResetUpdate, EverythingResetsAtTheHorizon) {
  Reset r(8, VertexPerLevel{4});
  const auto loss = LossFunction::linear(vec({0.9, 0.1, 0.4, 0.2}));
  for (int t = 1; t <= 8; ++t) {
    (void)r.query();
    r.update(loss);
  }
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(r.learner(i).trials_consumed(), 0u);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(r.mixing_weight(i), 0.5);
}

TEST(ResetUpdate, EqualLossesKeepMixingWeight) {
  Reset r(8, SameAction{vec({0.5, 0.5})});
  (void)r.query();
  r.update(LossFunction::linear(vec({0.3, 0.8})));
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(r.mixing_weight(i), 0.5);
}

TEST(MixingCoefficients, ProductExpansion) {
  const double half[] = {0.5, 0.5};
  const auto c = coefficients_from_mixing(half);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_DOUBLE_EQ(c[0], 0.25);
  EXPECT_DOUBLE_EQ(c[1], 0.25);
  EXPECT_DOUBLE_EQ(c[2], 0.5);

  const double top[] = {0.3, 0.8, 1.0};
  const auto d = coefficients_from_mixing(top);
  EXPECT_EQ(d[3], 1.0);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_EQ(d[1], 0.0);
  EXPECT_EQ(d[2], 0.0);
}

TEST(MixingCoefficients, SumToOneForRandomWeights) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> mu(1 + i % 20);
    for (auto& m : mu) m = unit(rng);
    const auto c = coefficients_from_mixing(mu);
    double sum = 0.0;
    for (double x : c) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

// A full run on random experts losses: x_t stays on the simplex, its
// coefficient expansion reconstructs it, the mixing weights stay strictly
// inside (0, 1), and every level follows the dyadic reset schedule.
TEST(ResetRun, StructuralInvariantsAndResetSchedule) {
  constexpr std::uint64_t kHorizon = 64;
  constexpr std::size_t kExperts = 5;
  const auto set = ActionSet::simplex(kExperts);
  Reset r(kHorizon, HedgeFactory{set});
  std::mt19937_64 rng(17);
  const std::size_t levels = r.levels();

  for (std::uint64_t t = 1; t <= kHorizon; ++t) {
    // Start of trial t: each level i is at offset (t-1) mod 2^i of its block.
    for (std::size_t i = 0; i < levels; ++i) {
      const std::uint64_t period = std::uint64_t{1} << i;
      EXPECT_EQ(r.learner(i).horizon(), period);
      EXPECT_EQ(r.learner(i).trials_consumed(), (t - 1) % period);
      if (i >= 1 && (t - 1) % period == 0) {
        EXPECT_EQ(r.mixing_weight(i), 0.5);
      }
    }

    const Action x = r.query();
    ASSERT_TRUE(set.contains(x, 1e-9));
    const auto c = r.mixing_coefficients();
    Vector rebuilt = Vector::Zero(kExperts);
    double sum = 0.0;
    for (std::size_t i = 0; i < levels; ++i) {
      rebuilt += c[i] * r.base_actions()[i];
      sum += c[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_LT((rebuilt - x).lpNorm<Eigen::Infinity>(), 1e-12);

    const auto loss = random_linear(rng, kExperts);
    std::vector<double> expected(levels, 0.5);
    for (std::size_t i = 1; i < levels; ++i) {
      if (t % (std::uint64_t{1} << i) != 0) {
        expected[i] = psi(r.mixing_weight(i), loss.eval(r.base_actions()[i]),
                          loss.eval(r.propagating_actions()[i - 1]), std::uint64_t{1} << i);
      }
    }
    r.update(loss);
    for (std::size_t i = 1; i < levels; ++i) {
      EXPECT_EQ(r.mixing_weight(i), expected[i]);
      EXPECT_GT(r.mixing_weight(i), 0.0);
      EXPECT_LT(r.mixing_weight(i), 1.0);
    }
  }
}

// The same schedule phrased over segment-tree vertices: every vertex v starts
// a fresh learner of horizon 2^h(v) with weight 1/2 at its leftmost leaf and
// runs undisturbed until its rightmost leaf.
TEST(ResetRun, EveryTreeVertexRunsOneUninterruptedInstance) {
  constexpr std::uint64_t kHorizon = 64;
  const auto set = ActionSet::simplex(3);
  Reset r(kHorizon, HedgeFactory{set});
  std::mt19937_64 rng(5);
  // fresh[i][t]: level i was fresh (0 trials consumed, weight 1/2) at the
  // start of trial t; consumed[i][t]: trials consumed at the start of t.
  std::vector<std::vector<std::uint64_t>> consumed(r.levels(), std::vector<std::uint64_t>(kHorizon + 1));
  std::vector<std::vector<double>> weight(r.levels(), std::vector<double>(kHorizon + 1, 0.5));
  for (std::uint64_t t = 1; t <= kHorizon; ++t) {
    for (std::size_t i = 0; i < r.levels(); ++i) {
      consumed[i][t] = r.learner(i).trials_consumed();
      if (i > 0) weight[i][t] = r.mixing_weight(i);
    }
    (void)r.query();
    r.update(random_linear(rng, 3));
  }
  for (const auto& v : oracle::all_vertices(kHorizon)) {
    EXPECT_EQ(consumed[v.height][v.first], 0u);
    EXPECT_EQ(weight[v.height][v.first], 0.5);
    for (auto t = v.first; t <= v.last; ++t) EXPECT_EQ(consumed[v.height][t], t - v.first);
  }
}

TEST(ResetRun, PerTrialWorkIsOneCallPerLevel) {
  constexpr std::uint64_t kHorizon = 256;
  CountingFactory<HedgeFactory> factory{HedgeFactory{ActionSet::simplex(4)}};
  auto counters = factory.counters;
  Reset r(kHorizon, factory);
  const auto levels = static_cast<std::uint64_t>(r.levels());
  EXPECT_EQ(counters->live, static_cast<std::int64_t>(levels));
  std::mt19937_64 rng(9);
  for (std::uint64_t t = 1; t <= kHorizon; ++t) {
    const auto before = *counters;
    (void)r.query();
    r.update(random_linear(rng, 4));
    EXPECT_EQ(counters->queries - before.queries, levels);
    EXPECT_EQ((counters->updates - before.updates) +
                  (counters->initialisations - before.initialisations),
              levels);
    EXPECT_EQ(counters->live, static_cast<std::int64_t>(levels));
  }
}

}  // namespace
