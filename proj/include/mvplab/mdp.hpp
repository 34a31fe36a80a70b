#pragma once

// Finite-horizon, time-inhomogeneous tabular MDPs with finite-support rewards.
//
// Steps are 0-based throughout the library: step h = 0 is the first decision
// of an episode and h = H - 1 the last. Tables indexed by (h, s) that carry a
// terminal level (values, visitation marginals) have H + 1 levels.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mvplab {

struct Dims {
  int H = 0;
  int S = 0;
  int A = 0;

  std::size_t sa(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * S + s) * A + a;
  }
  std::size_t hs(int h, int s) const { return static_cast<std::size_t>(h) * S + s; }
  std::size_t num_sa() const { return static_cast<std::size_t>(H) * S * A; }
  /// Number of (h, s) cells including the terminal level h = H.
  std::size_t num_hs_terminal() const { return static_cast<std::size_t>(H + 1) * S; }

  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Seeded random stream; every stochastic routine draws from one of these.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) built from the top 53 bits, so streams are
  /// identical across standard libraries.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

struct RewardAtom {
  double value = 0.0;
  double prob = 0.0;
};

class FiniteRewardDist {
 public:
  FiniteRewardDist() = default;
  explicit FiniteRewardDist(std::vector<RewardAtom> atoms) : atoms_(std::move(atoms)) {}

  static FiniteRewardDist constant(double value) { return FiniteRewardDist({{value, 1.0}}); }
  static FiniteRewardDist bernoulli(double value, double p) {
    return FiniteRewardDist({{value, p}, {0.0, 1.0 - p}});
  }

  const std::vector<RewardAtom>& atoms() const { return atoms_; }
  double mean() const;
  double second_moment() const;
  /// Centered second moment; never negative.
  double variance() const;
  /// Largest atom value with positive probability (0 for an empty atom list).
  double max_value() const;

 private:
  std::vector<RewardAtom> atoms_;
};

struct Successor {
  int next = 0;
  double prob = 0.0;
};

using TransitionRow = std::vector<Successor>;

class TabularMdp {
 public:
  TabularMdp() = default;
  /// Tables are indexed by Dims::sa. Throws ValidationError on size mismatch;
  /// stochasticity and reward-range defects are left to validate_mdp.
  TabularMdp(Dims dims, std::vector<TransitionRow> transitions,
             std::vector<FiniteRewardDist> rewards, std::vector<double> init_dist);

  const Dims& dims() const { return dims_; }
  int horizon() const { return dims_.H; }
  int num_states() const { return dims_.S; }
  int num_actions() const { return dims_.A; }

  const TransitionRow& transition(int h, int s, int a) const { return transitions_[dims_.sa(h, s, a)]; }
  const FiniteRewardDist& reward(int h, int s, int a) const { return rewards_[dims_.sa(h, s, a)]; }
  const std::vector<double>& init_dist() const { return init_dist_; }

  const std::vector<TransitionRow>& transitions() const { return transitions_; }
  const std::vector<FiniteRewardDist>& rewards() const { return rewards_; }

 private:
  Dims dims_;
  std::vector<TransitionRow> transitions_;
  std::vector<FiniteRewardDist> rewards_;
  std::vector<double> init_dist_;
};

class DeterministicPolicy {
 public:
  DeterministicPolicy() = default;
  /// All-zero action table.
  DeterministicPolicy(int H, int S) : H_(H), S_(S), actions_(static_cast<std::size_t>(H) * S, 0) {}
  DeterministicPolicy(int H, int S, std::vector<int> actions);

  int horizon() const { return H_; }
  int num_states() const { return S_; }
  int action(int h, int s) const { return actions_[static_cast<std::size_t>(h) * S_ + s]; }
  void set_action(int h, int s, int a) { actions_[static_cast<std::size_t>(h) * S_ + s] = a; }
  const std::vector<int>& table() const { return actions_; }

  friend bool operator==(const DeterministicPolicy&, const DeterministicPolicy&) = default;

 private:
  int H_ = 0;
  int S_ = 0;
  std::vector<int> actions_;
};

struct Step {
  int state = 0;
  int action = 0;
  double reward = 0.0;

  friend bool operator==(const Step&, const Step&) = default;
};

/// Exactly H steps; the state after the final step is not recorded.
struct Trajectory {
  std::vector<Step> steps;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct Violation {
  int h = -1;  // -1 when the check is not tied to a site
  int s = -1;
  int a = -1;
  std::string check;
  std::string detail;
};

inline constexpr double kStochasticTol = 1e-12;
inline constexpr double kPathRewardTol = 1e-9;

/// Empty iff every structural invariant and the bounded-total-reward
/// assumption hold. Violations are data; this never throws.
std::vector<Violation> validate_mdp(const TabularMdp& mdp);

/// Largest achievable sum of reward atoms along any supported path from the
/// support of the initial distribution.
double max_total_reward(const TabularMdp& mdp);

/// Draw an index from a probability vector (last index absorbs rounding slack).
int sample_index(const std::vector<double>& probs, Rng& rng);

Trajectory sample_trajectory(const TabularMdp& mdp, const DeterministicPolicy& policy, Rng& rng);

/// State occupancy under `policy` for every level 0..H. Level H is the
/// distribution after the final transition.
std::vector<std::vector<double>> state_marginals(const TabularMdp& mdp,
                                                 const DeterministicPolicy& policy);

/// (h, s) cells reachable under some policy (union of supported edges over all
/// actions), for levels 0..H-1, indexed by Dims::hs.
std::vector<bool> reachable_cells(const TabularMdp& mdp);

}  // namespace mvplab
