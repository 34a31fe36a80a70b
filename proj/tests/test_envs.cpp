#include <cmath>

#include "doctest.h"
#include "mvplab/envs.hpp"
#include "mvplab/errors.hpp"
#include "mvplab/solver.hpp"
#include "oracles.hpp"

using namespace mvplab;

namespace {

double kl_lhs(double x) { return (0.5 - x) * (0.5 - x) / (x * (1 - x)); }
double kl_rhs(double x) { return x * std::log(2 * x) + (1 - x) * std::log(2 - 2 * x); }

// Grid-calibrated: max over the separation grid of H * Var*(main state) is
// 0.2495 (independent DP), frozen here as 0.25.
constexpr double kMainStateVarConstant = 0.25;

}  // namespace

TEST_CASE("tiny instance construction") {
  const auto inst = fixtures::tiny_instance();
  const auto& meta = inst.meta;
  const auto& mdp = inst.mdp;
  CHECK(mdp.num_states() == 3);
  CHECK(mdp.init_dist() == std::vector<double>{1.0, 0.0, 0.0});
  CHECK(meta.p(0, 0, 0) == 0.5);
  CHECK(meta.p(0, 0, 1) == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(meta.p(1, 0, 0) == 0.5);
  CHECK(meta.p(1, 0, 1) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(mdp.reward(1, 1, 0).max_value() == 2.0);

  // Main-state row: self-loop 1 - 1/(LH), bandit 1/(LSH).
  double self = 0.0, to_bandit = 0.0;
  for (const auto& succ : mdp.transition(0, 0, 1)) {
    if (succ.next == 0) self += succ.prob;
    if (succ.next == 1) to_bandit += succ.prob;
  }
  CHECK(self == doctest::Approx(7.0 / 8.0).epsilon(1e-15));
  CHECK(to_bandit == doctest::Approx(1.0 / 8.0).epsilon(1e-15));
  CHECK(mdp.transition(0, 1, 1).size() == 1);
  CHECK(mdp.transition(0, 1, 1)[0].next == meta.terminal_state());
  CHECK(validate_mdp(mdp).empty());
}

TEST_CASE("construction fidelity on assorted specs") {
  std::vector<LowerBoundSpec> specs{fixtures::tiny_spec(), fixtures::regret_spec(), fixtures::grid_spec(8, 16)};
  specs.push_back({3, 3, 4, 9.0, {}});
  for (int g = 0; g < 12; ++g) {
    for (double gap : {0.9, 0.0, 2.5}) specs.back().gaps.push_back(gap * ((g % 3) + 1) / 3.0);
  }
  for (const auto& spec : specs) {
    const auto inst = make_lower_bound_instance(spec);
    const auto& meta = inst.meta;
    const auto& mdp = inst.mdp;
    REQUIRE(validate_mdp(mdp).empty());
    const auto sol = optimal_values(mdp);
    const double sqrt_l = std::sqrt(spec.L);

    // sigma is a bijection and every group holds a zero.
    std::vector<int> seen(spec.gaps.size(), 0);
    for (int idx : meta.sigma) ++seen[idx];
    for (int c : seen) CHECK(c == 1);

    for (int h = 0; h < spec.H; ++h) {
      for (int i = 0; i < spec.S; ++i) {
        bool has_zero = false;
        for (int a = 0; a < spec.A; ++a) {
          const double gap = meta.gap_of(h, i, a, spec.gaps);
          has_zero |= gap == 0.0;
          const double p = meta.p(h, i, a);
          CHECK(p == doctest::Approx(0.5 - gap / (4 * sqrt_l)).epsilon(1e-15));
          CHECK(p >= 0.25);
          CHECK(p <= 0.5);
          const int s = meta.bandit_state(i);
          CHECK(std::abs(sol.gap(h, s, a) - gap / 4) <= 1e-12);
          CHECK(std::abs(sol.var(h, s, a) - p * (1 - p) * spec.L) <= 1e-12);
        }
        CHECK(has_zero);
      }
    }

    const auto marg = state_marginals(mdp, sol.policy());
    const double lsh = spec.L * spec.S * spec.H;
    for (int h = 0; h < spec.H; ++h) {
      for (int i = 0; i < spec.S; ++i) {
        CHECK(std::abs(meta.d(h, i) - marg[h + 1][meta.bandit_state(i)]) <= 1e-12);
        CHECK(meta.d(h, i) <= 1 / lsh + 1e-15);
        CHECK(meta.d(h, i) >= 1 / (std::exp(1.0) * lsh));
      }
    }
  }
}

TEST_CASE("separation grid") {
  for (int H : {8, 16, 32}) {
    for (double L : {1.0, 4.0, 16.0}) {
      const auto inst = make_lower_bound_instance(fixtures::grid_spec(H, L));
      const auto sol = optimal_values(inst.mdp);
      const auto fut = future_conditional_variance(inst.mdp, sol);
      CHECK(fut.max_reachable >= 3.0 / 16.0 * L);
      CHECK(var_max_unconditional(inst.mdp, sol) <= 3.0);
      for (int h = 0; h < H; ++h) {
        for (int a = 0; a < 2; ++a) CHECK(sol.var(h, 0, a) <= kMainStateVarConstant / H);
      }
    }
  }
}

TEST_CASE("kl inequality on a 1001-point grid") {
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = 0.001 + 0.998 * i / 1000.0;
    worst = std::max(worst, kl_rhs(x) - kl_lhs(x));
  }
  CHECK(worst <= 1e-12);
  CHECK(kl_lhs(0.5) == 0.0);
  CHECK(kl_rhs(0.5) == doctest::Approx(0.0));
  CHECK(kl_lhs(0.25) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(kl_rhs(0.25) == doctest::Approx(0.13081).epsilon(1e-4));
}

TEST_CASE("spec validation") {
  auto spec = fixtures::tiny_spec();
  spec.gaps[1] = 2.0;  // sqrt(L) = 2
  CHECK_THROWS_WITH_AS(make_lower_bound_instance(spec), doctest::Contains("Delta_i < sqrt(L)"), ValidationError);

  spec = fixtures::tiny_spec();
  spec.gaps = {0.1, 0.4, 0.0, 0.8};
  CHECK_THROWS_AS(make_lower_bound_instance(spec), ValidationError);

  spec = fixtures::tiny_spec();
  spec.L = 5.0;  // > H^2
  CHECK_THROWS_AS(make_lower_bound_instance(spec), ValidationError);
  spec.L = 0.5;
  CHECK_THROWS_AS(make_lower_bound_instance(spec), ValidationError);

  spec = fixtures::tiny_spec();
  spec.gaps.pop_back();
  CHECK_THROWS_AS(make_lower_bound_instance(spec), ValidationError);

  spec = fixtures::tiny_spec();
  spec.gaps[1] = -0.1;
  CHECK_THROWS_AS(make_lower_bound_instance(spec), ValidationError);
}

TEST_CASE("random MDP generator") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto mdp = make_random_mdp(1 + seed % 4, 1 + seed % 3, 1 + seed % 5, 0.1 + 0.009 * seed, seed);
    CHECK(validate_mdp(mdp).empty());
  }
  const auto a = make_random_mdp(3, 2, 3, 0.5, 7);
  const auto b = make_random_mdp(3, 2, 3, 0.5, 7);
  CHECK(max_total_reward(a) <= 3.0);
  CHECK(a.init_dist() == b.init_dist());
  for (std::size_t i = 0; i < a.dims().num_sa(); ++i) {
    REQUIRE(a.transitions()[i].size() == b.transitions()[i].size());
    for (std::size_t j = 0; j < a.transitions()[i].size(); ++j) {
      CHECK(a.transitions()[i][j].next == b.transitions()[i][j].next);
      CHECK(a.transitions()[i][j].prob == b.transitions()[i][j].prob);
    }
    REQUIRE(a.rewards()[i].atoms().size() == b.rewards()[i].atoms().size());
    for (std::size_t j = 0; j < a.rewards()[i].atoms().size(); ++j) {
      CHECK(a.rewards()[i].atoms()[j].value == b.rewards()[i].atoms()[j].value);
      CHECK(a.rewards()[i].atoms()[j].prob == b.rewards()[i].atoms()[j].prob);
    }
  }
  CHECK_THROWS_AS(make_random_mdp(0, 1, 1, 0.5, 0), ValidationError);
  CHECK_THROWS_AS(make_random_mdp(1, 1, 1, 0.0, 0), ValidationError);
}

TEST_CASE("chain") {
  const auto mdp = make_chain(3);
  const auto sol = optimal_values(mdp);
  CHECK(sol.v0_star == 1.0);
  for (double v : sol.per_step_var) CHECK(v == 0.0);
  CHECK_THROWS_AS(make_chain(0), ValidationError);
}
