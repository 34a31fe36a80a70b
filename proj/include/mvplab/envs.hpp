#pragma once

#include <cstdint>
#include <vector>

#include "mvplab/mdp.hpp"

namespace mvplab {

/// Parameters of the hard-instance family: S bandit states reached from a
/// main state, each step/bandit-state pair carrying its own A-armed
/// Bernoulli bandit with reward sqrt(L).
struct LowerBoundSpec {
  int S = 1;
  int A = 2;
  int H = 2;
  double L = 1.0;
  std::vector<double> gaps;  // S * A * H entries
};

/// Bandit-state index i (0-based) maps to MDP state i + 1; state 0 is the
/// main state and state S + 1 the terminal state.
struct LowerBoundMeta {
  int S = 0;
  int A = 0;
  int H = 0;
  double L = 0.0;
  /// sigma[(h * S + i) * A + a] = index into spec.gaps.
  std::vector<int> sigma;
  /// Success probability of the sqrt(L) outcome, same indexing as sigma.
  std::vector<double> p_table;
  /// d_table[h * S + i]: probability of occupying bandit state i at step
  /// h + 1 (0-based), starting from the main state at step 0.
  std::vector<double> d_table;

  static int main_state() { return 0; }
  int bandit_state(int i) const { return i + 1; }
  int terminal_state() const { return S + 1; }
  double p(int h, int i, int a) const { return p_table[(static_cast<std::size_t>(h) * S + i) * A + a]; }
  double gap_of(int h, int i, int a, const std::vector<double>& gaps) const {
    return gaps[sigma[(static_cast<std::size_t>(h) * S + i) * A + a]];
  }
  double d(int h, int i) const { return d_table[static_cast<std::size_t>(h) * S + i]; }
};

/// Throws ValidationError naming the violated assumption.
void check_lower_bound_spec(const LowerBoundSpec& spec);

struct LowerBoundInstance {
  TabularMdp mdp;
  LowerBoundMeta meta;
};

LowerBoundInstance make_lower_bound_instance(const LowerBoundSpec& spec);

/// Random sparse instance. `sparsity` in (0, 1] is the expected fraction of
/// states in each transition row's support (at least one successor).
/// Rewards are rescaled so every path's total is at most H.
TabularMdp make_random_mdp(int S, int A, int H, double sparsity, std::uint64_t seed);

/// One state, one action, reward 1 at the last step.
TabularMdp make_chain(int H);

}  // namespace mvplab
