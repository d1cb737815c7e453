// Minimal use of the library: RESET over Hedge on a four-expert problem
// whose best expert changes halfway through.

#include <cstdio>

#include "reset/regret.hpp"
#include "reset/reset.hpp"

int main() {
  using namespace reset;
  constexpr std::uint64_t kHorizon = 256;
  const ActionSet experts = ActionSet::simplex(4);
  Reset learner(kHorizon, HedgeFactory{experts});
  Trace trace(experts);

  for (std::uint64_t t = 1; t <= kHorizon; ++t) {
    const Action x = learner.query();
    Vector g = Vector::Ones(4);
    g[t <= kHorizon / 2 ? 0 : 3] = 0.0;
    const auto loss = LossFunction::linear(g);
    learner.update(loss);
    trace.append(x, loss);
  }

  const auto halves = Segmentation::from_lengths({kHorizon / 2, kHorizon / 2});
  std::printf("loss=%.3f  R(whole)=%.3f  R(two halves)=%.3f\n", trace.played_loss({1, kHorizon}),
              static_regret(trace, {1, kHorizon}), switching_regret(trace, halves));
  return 0;
}
