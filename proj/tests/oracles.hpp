#pragma once

// Test-only oracles. They enumerate state paths explicitly and never call
// the library's DP routines, so they check those routines independently.

#include <cmath>
#include <functional>
#include <vector>

#include "mvplab/envs.hpp"
#include "mvplab/mdp.hpp"

namespace oracle {

using mvplab::DeterministicPolicy;
using mvplab::TabularMdp;

/// Visits every state path s_0..s_{H-1} with positive probability under
/// `policy`, passing the path and its probability.
inline void for_each_path(const TabularMdp& mdp, const DeterministicPolicy& policy,
                          const std::function<void(const std::vector<int>&, double)>& fn) {
  const int H = mdp.horizon();
  std::vector<int> path(H);
  std::function<void(int, double)> rec = [&](int h, double prob) {
    if (h == H) {
      fn(path, prob);
      return;
    }
    if (h == 0) {
      for (int s = 0; s < mdp.num_states(); ++s) {
        if (mdp.init_dist()[s] <= 0.0) continue;
        path[0] = s;
        rec(1, mdp.init_dist()[s]);
      }
      return;
    }
    const int prev = path[h - 1];
    for (const auto& succ : mdp.transition(h - 1, prev, policy.action(h - 1, prev))) {
      if (succ.prob <= 0.0) continue;
      path[h] = succ.next;
      rec(h + 1, prob * succ.prob);
    }
  };
  rec(0, 1.0);
}

/// E[sum_h site_value(h, s_h, pi_h(s_h))] by path enumeration.
inline double path_expectation(const TabularMdp& mdp, const DeterministicPolicy& policy,
                               const std::function<double(int, int, int)>& site_value) {
  double total = 0.0;
  for_each_path(mdp, policy, [&](const std::vector<int>& path, double prob) {
    double sum = 0.0;
    for (int h = 0; h < mdp.horizon(); ++h) sum += site_value(h, path[h], policy.action(h, path[h]));
    total += prob * sum;
  });
  return total;
}

/// E[sum_h site_value | s_cond_h = cond_s]; returns NaN when unreachable.
inline double conditional_path_expectation(const TabularMdp& mdp, const DeterministicPolicy& policy,
                                           const std::function<double(int, int, int)>& site_value, int cond_h,
                                           int cond_s) {
  double num = 0.0, den = 0.0;
  for_each_path(mdp, policy, [&](const std::vector<int>& path, double prob) {
    if (path[cond_h] != cond_s) return;
    double sum = 0.0;
    for (int h = 0; h < mdp.horizon(); ++h) sum += site_value(h, path[h], policy.action(h, path[h]));
    num += prob * sum;
    den += prob;
  });
  return den > 0.0 ? num / den : std::nan("");
}

/// All deterministic Markov policies, in an order independent of the library.
inline std::vector<DeterministicPolicy> all_policies(int H, int S, int A) {
  std::vector<DeterministicPolicy> out;
  const int cells = H * S;
  std::vector<int> table(cells, 0);
  while (true) {
    out.emplace_back(H, S, table);
    int c = cells - 1;
    while (c >= 0 && table[c] == A - 1) table[c--] = 0;
    if (c < 0) break;
    ++table[c];
  }
  return out;
}

/// Optimal value Q*/V* by exhaustive maximization over policies of path
/// expectations of mean rewards.
inline double best_value(const TabularMdp& mdp) {
  double best = -1e300;
  for (const auto& pi : all_policies(mdp.horizon(), mdp.num_states(), mdp.num_actions())) {
    best = std::max(best, path_expectation(mdp, pi, [&](int h, int s, int a) { return mdp.reward(h, s, a).mean(); }));
  }
  return best;
}

}  // namespace oracle

namespace fixtures {

/// S=1, A=2, H=2, L=4 with gap groups {0, 0.4} and {0, 0.8}.
inline mvplab::LowerBoundSpec tiny_spec() { return {1, 2, 2, 4.0, {0.0, 0.4, 0.0, 0.8}}; }

inline mvplab::LowerBoundInstance tiny_instance() { return mvplab::make_lower_bound_instance(tiny_spec()); }

/// S=2, A=2, every group {0, 0.2}.
inline mvplab::LowerBoundSpec grid_spec(int H, double L) {
  mvplab::LowerBoundSpec spec{2, 2, H, L, {}};
  for (int g = 0; g < 2 * H; ++g) {
    spec.gaps.push_back(0.0);
    spec.gaps.push_back(0.2);
  }
  return spec;
}

/// S=2, A=3, H=8, L=4, every group {0, 0.2, 0.4}.
inline mvplab::LowerBoundSpec regret_spec() {
  mvplab::LowerBoundSpec spec{2, 3, 8, 4.0, {}};
  for (int g = 0; g < 2 * 8; ++g) {
    spec.gaps.push_back(0.0);
    spec.gaps.push_back(0.2);
    spec.gaps.push_back(0.4);
  }
  return spec;
}

}  // namespace fixtures
