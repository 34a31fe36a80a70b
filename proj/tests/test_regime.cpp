// Regret-growth regime on the tiny hard instance. Kept apart from the unit
// suite because it is an empirical property of the learner, not a contract
// of any single function.

#include <cmath>

#include "doctest.h"
#include "mvplab/harness.hpp"
#include "mvplab/solver.hpp"
#include "oracles.hpp"

using namespace mvplab;

TEST_CASE("tiny instance enters the logarithmic regime") {
  const auto inst = fixtures::tiny_instance();
  const auto sol = optimal_values(inst.mdp);
  const std::uint64_t K = 100000;
  std::vector<RegretTrace> traces;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RunConfig rc;
    rc.K = K;
    rc.delta = 0.1;
    rc.seed = seed;
    rc.diagnostics = {false, false};
    traces.push_back(run_experiment(inst.mdp, sol, rc));
  }
  const auto summary = aggregate_seeds(traces);
  const auto fit = fit_log_regression(summary.mean_cum_regret, K / 2, K);
  CHECK(fit.r_squared >= 0.9);
  const double at_k = summary.mean_cum_regret[K - 1] / std::sqrt(double(K));
  const double at_quarter = summary.mean_cum_regret[K / 4 - 1] / std::sqrt(double(K / 4));
  CHECK(at_k < at_quarter);
}
