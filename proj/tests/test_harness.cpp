#include <cmath>

#include "doctest.h"
#include "mvplab/envs.hpp"
#include "mvplab/errors.hpp"
#include "mvplab/harness.hpp"
#include "mvplab/solver.hpp"
#include "oracles.hpp"

using namespace mvplab;

namespace {

RegretTrace synthetic_trace(std::vector<double> cum, std::uint64_t seed = 0, const std::string& env = "x") {
  RegretTrace t;
  t.K = cum.size();
  t.seed = seed;
  t.env_id = env;
  double prev = 0.0;
  for (std::size_t i = 0; i < cum.size(); ++i) {
    t.records.push_back({i + 1, cum[i] - prev, cum[i], 0, 0.0, 0.0});
    prev = cum[i];
  }
  return t;
}

RunConfig config(std::uint64_t K, std::uint64_t seed) {
  RunConfig rc;
  rc.K = K;
  rc.delta = 0.1;
  rc.seed = seed;
  return rc;
}

}  // namespace

TEST_CASE("run_experiment") {
  SUBCASE("chain has zero regret") {
    const auto mdp = make_chain(3);
    const auto trace = run_experiment(mdp, optimal_values(mdp), config(200, 1));
    REQUIRE(trace.records.size() == 200);
    for (const auto& r : trace.records) CHECK(r.instant_regret == 0.0);
  }

  SUBCASE("episode 1 runs the all-zero policy") {
    const auto inst = fixtures::tiny_instance();
    const auto sol = optimal_values(inst.mdp);
    const auto trace = run_experiment(inst.mdp, sol, config(1, 3));
    const double expected = sol.v0_star - policy_evaluation(inst.mdp, DeterministicPolicy(2, 3)).v0;
    CHECK(trace.records.at(0).instant_regret == expected);
  }

  SUBCASE("trace invariants and determinism") {
    const auto mdp = make_random_mdp(3, 2, 3, 0.6, 13);
    const auto sol = optimal_values(mdp);
    const auto a = run_experiment(mdp, sol, config(1000, 42));
    const auto b = run_experiment(mdp, sol, config(1000, 42));
    double sum = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      const auto& r = a.records[i];
      CHECK(r.k == i + 1);
      CHECK(r.instant_regret >= -1e-9);
      sum += r.instant_regret;
      CHECK(std::abs(r.cum_regret - sum) <= 1e-9);
      CHECK(r.cum_regret >= prev - 1e-12);
      prev = r.cum_regret;
      CHECK(r.cum_regret == b.records[i].cum_regret);
      CHECK(r.min_q_slack == b.records[i].min_q_slack);
      CHECK(r.max_surplus == b.records[i].max_surplus);
    }
    const auto& d = mdp.dims();
    for (int h = 0; h < d.H; ++h) {
      std::uint64_t n = 0;
      for (int s = 0; s < d.S; ++s)
        for (int act = 0; act < d.A; ++act) n += a.final_counts[d.sa(h, s, act)];
      CHECK(n == 1000);
    }
    CHECK(a.final_snapshot.q_table == b.final_snapshot.q_table);
  }
}

TEST_CASE("surpluses") {
  const auto inst = fixtures::tiny_instance();
  const auto& mdp = inst.mdp;
  const auto& d = mdp.dims();

  SUBCASE("saturated snapshot at a zero-reward pair") {
    LearnerSnapshot snap{d, std::vector<double>(d.num_sa(), 2.0), std::vector<double>(d.num_hs_terminal(), 2.0),
                         std::vector<std::uint64_t>(d.num_sa(), 0)};
    for (int s = 0; s < d.S; ++s) snap.v_table[d.hs(d.H, s)] = 0.0;
    const auto e = surpluses(mdp, snap);
    // Main state at h = 0: reward 0, every successor has V = 2.
    CHECK(e[d.sa(0, 0, 0)] == doctest::Approx(0.0).epsilon(1e-15));
  }

  SUBCASE("fresh snapshot gives minus the mean reward") {
    LearnerSnapshot snap{d, std::vector<double>(d.num_sa(), 0.0), std::vector<double>(d.num_hs_terminal(), 0.0),
                         std::vector<std::uint64_t>(d.num_sa(), 0)};
    const auto e = surpluses(mdp, snap);
    for (int h = 0; h < d.H; ++h)
      for (int s = 0; s < d.S; ++s)
        for (int a = 0; a < d.A; ++a) CHECK(e[d.sa(h, s, a)] == -mdp.reward(h, s, a).mean());
  }

  SUBCASE("dimension mismatch") {
    LearnerSnapshot snap{Dims{1, 1, 1}, {0.0}, {0.0, 0.0}, {0}};
    CHECK_THROWS_AS(surpluses(mdp, snap), ValidationError);
  }
}

TEST_CASE("converged chain surplus equals the 1/n bonus term") {
  const auto mdp = make_chain(3);
  MvpLearner l(mdp.dims(), 20000, 0.1);
  Rng rng(0);
  for (int k = 0; k < 2000; ++k) l.update(sample_trajectory(mdp, l.greedy_policy(), rng));
  const auto e = surpluses(mdp, l.snapshot());
  const double expected = 10.0 * 3 * l.iota() / 2000.0;
  CHECK(l.q(0, 0, 0) < 3.0);
  for (double v : e) CHECK(v == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("clip") {
  CHECK(clip(5, 3) == 5);
  CHECK(clip(2, 3) == 0);
  CHECK(clip(3, 3) == 3);
  CHECK(clip(-1, 0) == 0);
}

TEST_CASE("clipped surpluses") {
  SUBCASE("tiny instance thresholds from the closed form") {
    const auto inst = fixtures::tiny_instance();
    const auto sol = optimal_values(inst.mdp);
    const auto profile = variance_profile(inst.mdp, sol);
    const auto& d = inst.mdp.dims();
    std::vector<double> surplus(d.num_sa());
    for (std::size_t i = 0; i < surplus.size(); ++i) surplus[i] = 0.02 * static_cast<double>(i);
    const auto rep = clipped_surpluses(surplus, sol, profile);
    // delta_min = 0.1, H = 2, min(H^2, var_max_c_future) = 1.
    for (int h = 0; h < d.H; ++h) {
      for (int s = 0; s < d.S; ++s) {
        for (int a = 0; a < d.A; ++a) {
          const std::size_t i = d.sa(h, s, a);
          const double threshold = (1.0 / 6.0) * 0.1 * (sol.var(h, s, a) / 1.0 + 0.5);
          CHECK(std::abs(rep.threshold[i] - threshold) <= 1e-12);
          CHECK((rep.clipped[i] == 0.0 || rep.clipped[i] == rep.raw[i]));
          if (surplus[i] < threshold) CHECK(rep.clipped[i] == 0.0);
        }
      }
    }
  }

  SUBCASE("zero-variance MDP reduces to c4 * delta_min / H") {
    const Dims d{2, 1, 2};
    const TabularMdp mdp(d, std::vector<TransitionRow>(d.num_sa(), TransitionRow{{0, 1.0}}),
                         {FiniteRewardDist::constant(0.5), FiniteRewardDist::constant(0.2),
                          FiniteRewardDist::constant(0.5), FiniteRewardDist::constant(0.1)},
                         {1.0});
    const auto sol = optimal_values(mdp);
    const auto profile = variance_profile(mdp, sol);
    const auto rep = clipped_surpluses(std::vector<double>(4, 1.0), sol, profile, 0.25);
    for (double t : rep.threshold) CHECK(t == doctest::Approx(0.25 * 0.3 / 2).epsilon(1e-14));
  }

  SUBCASE("no gaps") {
    const auto mdp = make_chain(2);
    const auto sol = optimal_values(mdp);
    CHECK_THROWS_WITH_AS(clipped_surpluses({0.0, 0.0}, sol, variance_profile(mdp, sol)),
                         doctest::Contains("no-gaps"), DomainError);
  }
}

TEST_CASE("fit_log_regression") {
  std::vector<double> log3(2000), constant(2000, 4.0), linear(1000);
  for (std::size_t i = 0; i < log3.size(); ++i) log3[i] = 3.0 * std::log(double(i + 1));
  for (std::size_t i = 0; i < linear.size(); ++i) linear[i] = double(i + 1);

  const auto a = fit_log_regression(log3, 1000, 2000);
  CHECK(a.slope == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(std::abs(a.r_squared - 1.0) <= 1e-9);

  const auto b = fit_log_regression(constant, 1, 2000);
  CHECK(b.slope == 0.0);
  CHECK(b.r_squared == 0.0);

  // Negative control, frozen from an independent least-squares computation.
  const auto c = fit_log_regression(linear, 500, 1000);
  CHECK(c.slope == doctest::Approx(727.036188847991).epsilon(1e-10));
  CHECK(c.intercept == doctest::Approx(-4049.037204619481).epsilon(1e-10));
  CHECK(c.r_squared == doctest::Approx(0.992112471150457).epsilon(1e-10));
  CHECK(c.r_squared < 1.0);

  CHECK_THROWS_AS(fit_log_regression(linear, 1, 5), ValidationError);
  CHECK_THROWS_AS(fit_log_regression(linear, 0, 100), ValidationError);
  CHECK_THROWS_AS(fit_log_regression(linear, 10, 1001), ValidationError);
}

TEST_CASE("aggregate_seeds") {
  const auto t = synthetic_trace({1, 2, 3, 4, 10});
  const auto same = aggregate_seeds({t, t});
  for (double s : same.stddev_cum_regret) CHECK(s == 0.0);

  const auto u = synthetic_trace({1, 2, 3, 4, 20}, 1);
  const auto two = aggregate_seeds({t, u});
  CHECK(two.mean_cum_regret.back() == 15.0);
  CHECK(two.stddev_cum_regret.back() == doctest::Approx(std::sqrt(50.0)));
  CHECK(two.violation_rate == 0.0);

  auto v = u;
  v.records[2].optimism_violation_count = 1;
  CHECK(aggregate_seeds({t, v}).violation_rate == 0.5);

  CHECK_THROWS_AS(aggregate_seeds({t, synthetic_trace({1, 2, 3})}), ValidationError);
  CHECK_THROWS_AS(aggregate_seeds({t, synthetic_trace({1, 2, 3, 4, 5}, 2, "y")}), ValidationError);
  CHECK_THROWS_AS(aggregate_seeds({}), ValidationError);
}

TEST_CASE("optimism violation rate across 20 seeds") {
  const auto inst = fixtures::tiny_instance();
  const auto sol = optimal_values(inst.mdp);
  std::vector<RegretTrace> traces;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rc = config(5000, seed);
    rc.diagnostics.surplus = false;
    traces.push_back(run_experiment(inst.mdp, sol, rc));
  }
  CHECK(aggregate_seeds(traces).violation_rate <= 0.55);
}

TEST_CASE("variance tail check") {
  const auto chain = make_chain(3);
  const auto chain_sol = optimal_values(chain);
  CHECK(variance_tail_check(chain, chain_sol, DeterministicPolicy(3, 1), 1000, 0.1, 0).exceedance_rate == 0.0);

  const auto inst = fixtures::tiny_instance();
  const auto sol = optimal_values(inst.mdp);
  const auto profile = variance_profile(inst.mdp, sol);
  const auto tc = variance_tail_check(inst.mdp, sol, sol.policy(), 10000, 0.1, 7);
  CHECK(tc.exceedance_rate <= 0.1);
  CHECK(tc.min_sum >= 0.0);
  CHECK(tc.max_sum <= 2 * profile.q_star_max);
  CHECK(tc.threshold == doctest::Approx(160.0 * 4 * std::log(4.0 * 3 / 0.1)));
}

TEST_CASE("exact policy values match Monte Carlo returns") {
  const auto inst = fixtures::tiny_instance();
  const auto policies = oracle::all_policies(2, 3, 2);
  for (std::size_t idx : {0u, 5u, 17u, 40u, 63u}) {
    const auto& pi = policies[idx];
    const double exact = policy_evaluation(inst.mdp, pi).v0;
    Rng rng(1000 + idx);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      double ret = 0.0;
      for (const auto& st : sample_trajectory(inst.mdp, pi, rng).steps) ret += st.reward;
      sum += ret;
      sq += ret * ret;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean - exact) <= 4 * se);
  }
}
