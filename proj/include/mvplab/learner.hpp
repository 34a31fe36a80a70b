#pragma once

// Monotonic Value Propagation: a model-based optimistic learner that keeps
// empirical reward moments and transition counts per (h, s, a), adds a
// three-term Bernstein-style bonus, and recomputes every Q row of each level
// after every episode.

#include <cstdint>
#include <vector>

#include "mvplab/mdp.hpp"

namespace mvplab {

struct MvpConstants {
  double c1 = 2.0;
  double c2 = 2.0;
  double c3 = 10.0;
};

/// Closed-form bonus. `next_value_var` is the empirical variance of the next
/// level's value under the empirical transition, `reward_var` the empirical
/// reward variance; both are ignored (treated as 0) when n = 0.
double mvp_bonus(const MvpConstants& c, std::uint64_t n, double next_value_var, double reward_var,
                 double H, double iota);

/// Copy of the tables a diagnostic needs; decoupled from the live learner.
struct LearnerSnapshot {
  Dims dims;
  std::vector<double> q_table;           // Dims::sa
  std::vector<double> v_table;           // Dims::hs, H + 1 levels
  std::vector<std::uint64_t> counts;     // Dims::sa

  double q(int h, int s, int a) const { return q_table[dims.sa(h, s, a)]; }
  double v(int h, int s) const { return v_table[dims.hs(h, s)]; }
};

class MvpLearner {
 public:
  /// Throws ValidationError unless K >= 1, delta in (0, 1) and iota > 0.
  MvpLearner(Dims dims, std::uint64_t K, double delta, MvpConstants constants = {});

  const Dims& dims() const { return dims_; }
  double iota() const { return iota_; }
  std::uint64_t episodes() const { return K_; }
  double delta() const { return delta_; }
  const MvpConstants& constants() const { return constants_; }

  /// argmax_a Q_h(s, a), ties to the lowest index.
  DeterministicPolicy greedy_policy() const;

  /// Bonus at (h, s, a) from the current statistics and the current V_{h+1}.
  double bonus(int h, int s, int a) const;

  /// Folds one episode into the statistics and recomputes Q and V level by
  /// level from h = H-1 down to 0. Throws ValidationError on a length mismatch.
  void update(const Trajectory& trajectory);

  std::uint64_t count(int h, int s, int a) const { return counts_[dims_.sa(h, s, a)]; }
  std::uint64_t successor_count(int h, int s, int a, int next) const {
    return successor_counts_[dims_.sa(h, s, a) * dims_.S + next];
  }
  double reward_sum(int h, int s, int a) const { return reward_sum_[dims_.sa(h, s, a)]; }
  double reward_sq_sum(int h, int s, int a) const { return reward_sq_sum_[dims_.sa(h, s, a)]; }
  double q(int h, int s, int a) const { return q_table_[dims_.sa(h, s, a)]; }
  double v(int h, int s) const { return v_table_[dims_.hs(h, s)]; }

  const std::vector<double>& q_table() const { return q_table_; }
  const std::vector<double>& v_table() const { return v_table_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  LearnerSnapshot snapshot() const { return {dims_, q_table_, v_table_, counts_}; }

 private:
  void recompute_level(int h);
  double next_value_mean(int h, int s, int a) const;
  double next_value_variance(int h, int s, int a) const;

  Dims dims_;
  std::uint64_t K_;
  double delta_;
  MvpConstants constants_;
  double iota_;

  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> successor_counts_;  // Dims::sa * S + next
  std::vector<std::vector<int>> support_;        // observed successors per (h, s, a)
  std::vector<double> reward_sum_;
  std::vector<double> reward_sq_sum_;
  std::vector<double> q_table_;
  std::vector<double> v_table_;
};

}  // namespace mvplab
