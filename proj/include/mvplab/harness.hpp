#pragma once

// Seeded MVP runs with exact per-episode regret, plus the white-box
// diagnostics (optimism slack, surpluses, clipping) and the statistics used
// to judge regret growth.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvplab/learner.hpp"
#include "mvplab/mdp.hpp"
#include "mvplab/solver.hpp"

namespace mvplab {

inline constexpr double kOptimismTolerance = 1e-9;

struct Diagnostics {
  bool optimism = true;
  bool surplus = true;
};

struct RunConfig {
  std::uint64_t K = 1;
  double delta = 0.1;
  std::uint64_t seed = 0;
  MvpConstants constants{};
  Diagnostics diagnostics{};
  std::string env_id;
};

/// One row per episode. Diagnostic columns describe the tables produced by
/// this episode's update, i.e. the tables the next policy is built from.
struct EpisodeRecord {
  std::uint64_t k = 0;  // 1-based
  double instant_regret = 0.0;
  double cum_regret = 0.0;
  std::uint64_t optimism_violation_count = 0;
  double min_q_slack = 0.0;
  double max_surplus = 0.0;
};

struct RegretTrace {
  std::vector<EpisodeRecord> records;
  Dims dims;
  std::vector<std::uint64_t> final_counts;  // n_h^K(s, a), Dims::sa
  LearnerSnapshot final_snapshot;
  std::uint64_t seed = 0;
  std::uint64_t K = 0;
  double delta = 0.0;
  std::string env_id;

  bool any_violation() const;
};

/// Deterministic in (mdp, config). Parameter errors surface from MvpLearner.
RegretTrace run_experiment(const TabularMdp& mdp, const OptimalSolution& solution, const RunConfig& config);

/// E_h(s, a) = Q_h(s, a) - (r_h(s, a) + E_{P}[V_{h+1}]) under the true model.
std::vector<double> surpluses(const TabularMdp& mdp, const LearnerSnapshot& snapshot);

/// value * 1{value >= threshold}
inline double clip(double value, double threshold) { return value >= threshold ? value : 0.0; }

struct SurplusReport {
  Dims dims;
  std::vector<double> raw;
  std::vector<double> clipped;
  std::vector<double> threshold;
};

inline constexpr double kDefaultClipConstant = 1.0 / 6.0;

/// Threshold c4 * delta_min * (Var*_h(s,a) / min(H^2, var_max_c) + 1/H); the
/// variance ratio is taken as 0 when min(H^2, var_max_c) is 0. `var_max_c`
/// defaults to the profile's future-conditional value. Throws DomainError
/// ("no-gaps") when the solution has no suboptimal actions.
SurplusReport clipped_surpluses(const std::vector<double>& surplus, const OptimalSolution& solution,
                                const VarianceProfile& profile, double c4 = kDefaultClipConstant,
                                std::optional<double> var_max_c = std::nullopt);

struct LogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares of cum_regret(k) against log k for k in [first_k, last_k]
/// (1-based, inclusive). A constant response yields slope 0 and R^2 = 0.
/// Throws ValidationError for windows outside [1, K] or with < 10 points.
LogFit fit_log_regression(const std::vector<double>& cum_regret, std::uint64_t first_k, std::uint64_t last_k);
LogFit fit_log_regression(const RegretTrace& trace, std::uint64_t first_k, std::uint64_t last_k);

struct SeedSummary {
  std::uint64_t K = 0;
  std::string env_id;
  std::vector<std::uint64_t> seeds;
  std::vector<double> mean_cum_regret;
  std::vector<double> stddev_cum_regret;  // sample stddev; 0 for a single run
  double violation_rate = 0.0;            // fraction of runs with any violation
};

/// Throws ValidationError on mismatched K or environment.
SeedSummary aggregate_seeds(const std::vector<RegretTrace>& traces);

struct TailCheck {
  double threshold = 0.0;
  double exceedance_rate = 0.0;
  double min_sum = 0.0;
  double max_sum = 0.0;
};

/// Fraction of sampled trajectories whose summed per-step variance
/// Var*_h(s_h, a_h) exceeds 160 H^2 log(4 (H + 1) / delta).
TailCheck variance_tail_check(const TabularMdp& mdp, const OptimalSolution& solution,
                              const DeterministicPolicy& policy, std::uint64_t num_samples, double delta,
                              std::uint64_t seed);

}  // namespace mvplab
