#pragma once

// Exact dynamic programming for optimal values, policy values, suboptimality
// gaps, and the per-step / total variance quantities, plus brute-force
// policy-enumeration oracles used to cross-check them.

#include <cstdint>
#include <optional>
#include <vector>

#include "mvplab/mdp.hpp"

namespace mvplab {

inline constexpr double kGapTolerance = 1e-9;
inline constexpr double kReachTolerance = 1e-15;
inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

struct Site {
  int h = 0;
  int s = 0;
  int a = 0;

  friend bool operator==(const Site&, const Site&) = default;
};

struct OptimalSolution {
  Dims dims;
  std::vector<double> q_star;        // Dims::sa
  std::vector<double> v_star;        // Dims::hs, H + 1 levels (level H is zero)
  double v0_star = 0.0;
  std::vector<double> gaps;          // Dims::sa
  std::optional<double> delta_min;   // absent when z_sub is empty
  std::vector<Site> z_opt;
  std::vector<Site> z_sub;
  std::vector<double> per_step_var;  // Dims::sa

  double q(int h, int s, int a) const { return q_star[dims.sa(h, s, a)]; }
  double v(int h, int s) const { return v_star[dims.hs(h, s)]; }
  double gap(int h, int s, int a) const { return gaps[dims.sa(h, s, a)]; }
  double var(int h, int s, int a) const { return per_step_var[dims.sa(h, s, a)]; }
  /// Greedy optimal policy (lowest index among maximizers).
  DeterministicPolicy policy() const;
};

struct PolicyValue {
  std::vector<double> v;  // Dims::hs, H + 1 levels
  double v0 = 0.0;
};

struct VarianceProfile {
  double var_max = 0.0;
  std::vector<double> w_table;  // Dims::hs, H + 1 levels
  double var_max_c_future = 0.0;
  std::optional<double> var_max_c_exact;
  double q_star_max = 0.0;
};

struct ConditionalVariance {
  double past = 0.0;    // expected variance accumulated before step h
  double future = 0.0;  // expected variance from step h through H-1
  double total() const { return past + future; }
};

/// Backward induction with V_H = 0. Ties resolve to the lowest action index.
OptimalSolution optimal_values(const TabularMdp& mdp);

PolicyValue policy_evaluation(const TabularMdp& mdp, const DeterministicPolicy& policy);

/// Max over policies of the expected sum of per-step variances from the start.
double var_max_unconditional(const TabularMdp& mdp, const OptimalSolution& sol);

/// W_h(s) = max_a [Var*_h(s,a) + E W_{h+1}] and its max over reachable (h, s).
struct FutureVariance {
  std::vector<double> w_table;
  double max_reachable = 0.0;
};
FutureVariance future_conditional_variance(const TabularMdp& mdp, const OptimalSolution& sol);

/// Expected total variance under `policy` conditioned on s_h = s, split into
/// the part before step h and the part from step h on. Throws DomainError
/// when P[s_h = s] <= kReachTolerance.
ConditionalVariance conditional_variance_parts(const TabularMdp& mdp, const OptimalSolution& sol,
                                               const DeterministicPolicy& policy, int h, int s);

inline double conditional_total_variance(const TabularMdp& mdp, const OptimalSolution& sol,
                                         const DeterministicPolicy& policy, int h, int s) {
  return conditional_variance_parts(mdp, sol, policy, h, s).total();
}

/// E^pi[sum_h Var*_h(s_h, a_h)] from the initial distribution.
double expected_total_variance(const TabularMdp& mdp, const OptimalSolution& sol,
                               const DeterministicPolicy& policy);

/// Builds the full profile; the enumeration oracle runs only when
/// `with_exact` is set (and may throw EnumerationTooLarge).
VarianceProfile variance_profile(const TabularMdp& mdp, const OptimalSolution& sol,
                                 bool with_exact = false,
                                 std::uint64_t cap = kDefaultEnumerationCap);

/// Number of deterministic Markov policies, saturating at UINT64_MAX.
std::uint64_t policy_count(const Dims& dims);

/// Calls `fn(policy)` for every deterministic Markov policy in mixed-radix
/// order. Throws EnumerationTooLarge past `cap`.
template <class Fn>
void for_each_policy(const Dims& dims, std::uint64_t cap, Fn&& fn);

double brute_force_optimal(const TabularMdp& mdp, std::uint64_t cap = kDefaultEnumerationCap);
double brute_force_var_max_unconditional(const TabularMdp& mdp, const OptimalSolution& sol,
                                         std::uint64_t cap = kDefaultEnumerationCap);
double brute_force_var_max_conditional(const TabularMdp& mdp, const OptimalSolution& sol,
                                       std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace mvplab

#include "mvplab/detail/enumerate.hpp"
