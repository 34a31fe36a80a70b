#include "mvplab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvplab/errors.hpp"

namespace mvplab {

namespace {

double expect(const TransitionRow& row, const std::vector<double>& table, const Dims& d, int level) {
  double e = 0.0;
  for (const auto& succ : row) e += succ.prob * table[d.hs(level, succ.next)];
  return e;
}

// Variance of r + V(s') with r and s' drawn independently.
double step_variance(const TabularMdp& mdp, const std::vector<double>& v, int h, int s, int a) {
  const Dims& d = mdp.dims();
  const auto& row = mdp.transition(h, s, a);
  const double ev = expect(row, v, d, h + 1);
  double var_next = 0.0;
  for (const auto& succ : row) {
    const double dev = v[d.hs(h + 1, succ.next)] - ev;
    var_next += succ.prob * dev * dev;
  }
  return mdp.reward(h, s, a).variance() + var_next;
}

double initial_expectation(const TabularMdp& mdp, const std::vector<double>& table) {
  double e = 0.0;
  for (int s = 0; s < mdp.num_states(); ++s) e += mdp.init_dist()[s] * table[mdp.dims().hs(0, s)];
  return e;
}

// Backward recursion of a policy's expected sum of a per-site quantity.
std::vector<double> policy_backward(const TabularMdp& mdp, const DeterministicPolicy& policy,
                                    const std::vector<double>& per_site) {
  const Dims& d = mdp.dims();
  std::vector<double> v(d.num_hs_terminal(), 0.0);
  for (int h = d.H - 1; h >= 0; --h) {
    for (int s = 0; s < d.S; ++s) {
      const int a = policy.action(h, s);
      v[d.hs(h, s)] = per_site[d.sa(h, s, a)] + expect(mdp.transition(h, s, a), v, d, h + 1);
    }
  }
  return v;
}

// Maximizing backward recursion of a per-site quantity.
std::vector<double> optimal_backward(const TabularMdp& mdp, const std::vector<double>& per_site) {
  const Dims& d = mdp.dims();
  std::vector<double> v(d.num_hs_terminal(), 0.0);
  for (int h = d.H - 1; h >= 0; --h) {
    for (int s = 0; s < d.S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < d.A; ++a) {
        best = std::max(best, per_site[d.sa(h, s, a)] + expect(mdp.transition(h, s, a), v, d, h + 1));
      }
      v[d.hs(h, s)] = best;
    }
  }
  return v;
}

std::vector<double> mean_rewards(const TabularMdp& mdp) {
  std::vector<double> r;
  r.reserve(mdp.rewards().size());
  for (const auto& dist : mdp.rewards()) r.push_back(dist.mean());
  return r;
}

}  // namespace

DeterministicPolicy OptimalSolution::policy() const {
  DeterministicPolicy pi(dims.H, dims.S);
  for (int h = 0; h < dims.H; ++h) {
    for (int s = 0; s < dims.S; ++s) {
      int best = 0;
      for (int a = 1; a < dims.A; ++a) {
        if (q(h, s, a) > q(h, s, best)) best = a;
      }
      pi.set_action(h, s, best);
    }
  }
  return pi;
}

OptimalSolution optimal_values(const TabularMdp& mdp) {
  const Dims& d = mdp.dims();
  OptimalSolution sol;
  sol.dims = d;
  sol.q_star.assign(d.num_sa(), 0.0);
  sol.v_star.assign(d.num_hs_terminal(), 0.0);
  sol.gaps.assign(d.num_sa(), 0.0);
  sol.per_step_var.assign(d.num_sa(), 0.0);

  for (int h = d.H - 1; h >= 0; --h) {
    for (int s = 0; s < d.S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < d.A; ++a) {
        const double q = mdp.reward(h, s, a).mean() +
                         expect(mdp.transition(h, s, a), sol.v_star, d, h + 1);
        sol.q_star[d.sa(h, s, a)] = q;
        best = std::max(best, q);
      }
      sol.v_star[d.hs(h, s)] = best;
    }
  }
  sol.v0_star = initial_expectation(mdp, sol.v_star);

  for (int h = 0; h < d.H; ++h) {
    for (int s = 0; s < d.S; ++s) {
      for (int a = 0; a < d.A; ++a) {
        const std::size_t i = d.sa(h, s, a);
        const double gap = sol.v_star[d.hs(h, s)] - sol.q_star[i];
        sol.gaps[i] = gap;
        sol.per_step_var[i] = step_variance(mdp, sol.v_star, h, s, a);
        if (gap > kGapTolerance) {
          sol.z_sub.push_back({h, s, a});
          sol.delta_min = sol.delta_min ? std::min(*sol.delta_min, gap) : gap;
        } else {
          sol.z_opt.push_back({h, s, a});
        }
      }
    }
  }
  return sol;
}

PolicyValue policy_evaluation(const TabularMdp& mdp, const DeterministicPolicy& policy) {
  PolicyValue out;
  out.v = policy_backward(mdp, policy, mean_rewards(mdp));
  out.v0 = initial_expectation(mdp, out.v);
  return out;
}

double var_max_unconditional(const TabularMdp& mdp, const OptimalSolution& sol) {
  return initial_expectation(mdp, optimal_backward(mdp, sol.per_step_var));
}

FutureVariance future_conditional_variance(const TabularMdp& mdp, const OptimalSolution& sol) {
  const Dims& d = mdp.dims();
  FutureVariance out;
  out.w_table = optimal_backward(mdp, sol.per_step_var);
  const auto reach = reachable_cells(mdp);
  for (int h = 0; h < d.H; ++h) {
    for (int s = 0; s < d.S; ++s) {
      if (reach[d.hs(h, s)]) out.max_reachable = std::max(out.max_reachable, out.w_table[d.hs(h, s)]);
    }
  }
  return out;
}

double expected_total_variance(const TabularMdp& mdp, const OptimalSolution& sol,
                               const DeterministicPolicy& policy) {
  return initial_expectation(mdp, policy_backward(mdp, policy, sol.per_step_var));
}

namespace {

// Forward occupancy alpha and variance-weighted occupancy beta, where
// beta_t(x) = E[ sum_{t' < t} Var_{t'} ; s_t = x ].
struct ForwardMoments {
  std::vector<double> alpha;  // Dims::hs over levels 0..H-1
  std::vector<double> beta;
};

ForwardMoments forward_moments(const TabularMdp& mdp, const OptimalSolution& sol,
                               const DeterministicPolicy& policy) {
  const Dims& d = mdp.dims();
  ForwardMoments fm;
  const std::size_t n = static_cast<std::size_t>(d.H) * d.S;
  fm.alpha.assign(n, 0.0);
  fm.beta.assign(n, 0.0);
  for (int s = 0; s < d.S; ++s) fm.alpha[d.hs(0, s)] = mdp.init_dist()[s];
  for (int t = 0; t + 1 < d.H; ++t) {
    for (int x = 0; x < d.S; ++x) {
      const double al = fm.alpha[d.hs(t, x)];
      const double be = fm.beta[d.hs(t, x)];
      if (al == 0.0 && be == 0.0) continue;
      const int a = policy.action(t, x);
      const double carried = be + al * sol.var(t, x, a);
      for (const auto& succ : mdp.transition(t, x, a)) {
        fm.alpha[d.hs(t + 1, succ.next)] += al * succ.prob;
        fm.beta[d.hs(t + 1, succ.next)] += carried * succ.prob;
      }
    }
  }
  return fm;
}

}  // namespace

ConditionalVariance conditional_variance_parts(const TabularMdp& mdp, const OptimalSolution& sol,
                                               const DeterministicPolicy& policy, int h, int s) {
  const Dims& d = mdp.dims();
  if (h < 0 || h >= d.H || s < 0 || s >= d.S) throw ValidationError("(h, s) out of range");
  const auto fm = forward_moments(mdp, sol, policy);
  const double alpha = fm.alpha[d.hs(h, s)];
  if (alpha <= kReachTolerance) {
    throw DomainError("unreachable: P[s_h = s] <= 1e-15 under the given policy");
  }
  const auto future = policy_backward(mdp, policy, sol.per_step_var);
  return {fm.beta[d.hs(h, s)] / alpha, future[d.hs(h, s)]};
}

VarianceProfile variance_profile(const TabularMdp& mdp, const OptimalSolution& sol,
                                 bool with_exact, std::uint64_t cap) {
  VarianceProfile p;
  auto fv = future_conditional_variance(mdp, sol);
  p.w_table = std::move(fv.w_table);
  p.var_max_c_future = fv.max_reachable;
  p.var_max = initial_expectation(mdp, p.w_table);
  for (double v : sol.per_step_var) p.q_star_max = std::max(p.q_star_max, v);
  if (with_exact) p.var_max_c_exact = brute_force_var_max_conditional(mdp, sol, cap);
  return p;
}

std::uint64_t policy_count(const Dims& dims) {
  std::uint64_t total = 1;
  const std::uint64_t cells = static_cast<std::uint64_t>(dims.H) * dims.S;
  for (std::uint64_t i = 0; i < cells; ++i) {
    if (total > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(dims.A)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= static_cast<std::uint64_t>(dims.A);
  }
  return total;
}

double brute_force_optimal(const TabularMdp& mdp, std::uint64_t cap) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_policy(mdp.dims(), cap, [&](const DeterministicPolicy& pi) {
    best = std::max(best, policy_evaluation(mdp, pi).v0);
  });
  return best;
}

double brute_force_var_max_unconditional(const TabularMdp& mdp, const OptimalSolution& sol,
                                         std::uint64_t cap) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_policy(mdp.dims(), cap, [&](const DeterministicPolicy& pi) {
    best = std::max(best, expected_total_variance(mdp, sol, pi));
  });
  return best;
}

double brute_force_var_max_conditional(const TabularMdp& mdp, const OptimalSolution& sol,
                                       std::uint64_t cap) {
  const Dims& d = mdp.dims();
  double best = 0.0;
  for_each_policy(d, cap, [&](const DeterministicPolicy& pi) {
    const auto fm = forward_moments(mdp, sol, pi);
    const auto future = policy_backward(mdp, pi, sol.per_step_var);
    for (int h = 0; h < d.H; ++h) {
      for (int s = 0; s < d.S; ++s) {
        const double alpha = fm.alpha[d.hs(h, s)];
        if (alpha <= kReachTolerance) continue;
        best = std::max(best, fm.beta[d.hs(h, s)] / alpha + future[d.hs(h, s)]);
      }
    }
  });
  return best;
}

}  // namespace mvplab
