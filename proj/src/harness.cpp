#include "mvplab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvplab/errors.hpp"

namespace mvplab {

bool RegretTrace::any_violation() const {
  return std::any_of(records.begin(), records.end(),
                     [](const EpisodeRecord& r) { return r.optimism_violation_count > 0; });
}

std::vector<double> surpluses(const TabularMdp& mdp, const LearnerSnapshot& snapshot) {
  const Dims& d = mdp.dims();
  if (!(snapshot.dims == d)) throw ValidationError("snapshot dimensions do not match the MDP");
  std::vector<double> out(d.num_sa(), 0.0);
  for (int h = 0; h < d.H; ++h) {
    for (int s = 0; s < d.S; ++s) {
      for (int a = 0; a < d.A; ++a) {
        double backup = mdp.reward(h, s, a).mean();
        for (const auto& succ : mdp.transition(h, s, a)) backup += succ.prob * snapshot.v(h + 1, succ.next);
        out[d.sa(h, s, a)] = snapshot.q(h, s, a) - backup;
      }
    }
  }
  return out;
}

RegretTrace run_experiment(const TabularMdp& mdp, const OptimalSolution& solution, const RunConfig& config) {
  const Dims& d = mdp.dims();
  MvpLearner learner(d, config.K, config.delta, config.constants);
  Rng rng(config.seed);

  RegretTrace trace;
  trace.dims = d;
  trace.seed = config.seed;
  trace.K = config.K;
  trace.delta = config.delta;
  trace.env_id = config.env_id;
  trace.records.reserve(config.K);

  double cum = 0.0;
  for (std::uint64_t k = 1; k <= config.K; ++k) {
    const auto policy = learner.greedy_policy();
    const double instant = solution.v0_star - policy_evaluation(mdp, policy).v0;
    cum += instant;
    learner.update(sample_trajectory(mdp, policy, rng));

    EpisodeRecord rec;
    rec.k = k;
    rec.instant_regret = instant;
    rec.cum_regret = cum;
    if (config.diagnostics.optimism) {
      double slack = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < d.num_sa(); ++i) {
        const double diff = learner.q_table()[i] - solution.q_star[i];
        slack = std::min(slack, diff);
        if (diff < -kOptimismTolerance) ++rec.optimism_violation_count;
      }
      rec.min_q_slack = slack;
    }
    if (config.diagnostics.surplus) {
      const auto e = surpluses(mdp, learner.snapshot());
      rec.max_surplus = *std::max_element(e.begin(), e.end());
    }
    trace.records.push_back(rec);
  }
  trace.final_counts = learner.counts();
  trace.final_snapshot = learner.snapshot();
  return trace;
}

SurplusReport clipped_surpluses(const std::vector<double>& surplus, const OptimalSolution& solution,
                                const VarianceProfile& profile, double c4, std::optional<double> var_max_c) {
  if (!solution.delta_min) throw DomainError("no-gaps: the solution has no suboptimal actions");
  if (!(c4 >= 0.0)) throw ValidationError("c4 must be nonnegative");
  const Dims& d = solution.dims;
  if (surplus.size() != d.num_sa()) throw ValidationError("surplus table has the wrong size");
  const double H = d.H;
  const double denom = std::min(H * H, var_max_c.value_or(profile.var_max_c_future));

  SurplusReport rep;
  rep.dims = d;
  rep.raw = surplus;
  rep.clipped.resize(surplus.size());
  rep.threshold.resize(surplus.size());
  for (std::size_t i = 0; i < surplus.size(); ++i) {
    const double ratio = denom > 0.0 ? solution.per_step_var[i] / denom : 0.0;
    rep.threshold[i] = c4 * *solution.delta_min * (ratio + 1.0 / H);
    rep.clipped[i] = clip(surplus[i], rep.threshold[i]);
  }
  return rep;
}

LogFit fit_log_regression(const std::vector<double>& cum_regret, std::uint64_t first_k, std::uint64_t last_k) {
  if (first_k < 1 || last_k > cum_regret.size() || first_k > last_k) {
    throw ValidationError("degenerate window: must satisfy 1 <= first_k <= last_k <= K");
  }
  const std::uint64_t n = last_k - first_k + 1;
  if (n < 10) throw ValidationError("degenerate window: fewer than 10 points");

  double mx = 0.0, my = 0.0;
  for (std::uint64_t k = first_k; k <= last_k; ++k) {
    mx += std::log(static_cast<double>(k));
    my += cum_regret[k - 1];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::uint64_t k = first_k; k <= last_k; ++k) {
    const double dx = std::log(static_cast<double>(k)) - mx;
    const double dy = cum_regret[k - 1] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LogFit fit;
  if (syy == 0.0) {
    fit.intercept = my;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = (sxy * sxy) / (sxx * syy);
  return fit;
}

LogFit fit_log_regression(const RegretTrace& trace, std::uint64_t first_k, std::uint64_t last_k) {
  std::vector<double> cum;
  cum.reserve(trace.records.size());
  for (const auto& r : trace.records) cum.push_back(r.cum_regret);
  return fit_log_regression(cum, first_k, last_k);
}

SeedSummary aggregate_seeds(const std::vector<RegretTrace>& traces) {
  if (traces.empty()) throw ValidationError("no traces to aggregate");
  SeedSummary sum;
  sum.K = traces.front().K;
  sum.env_id = traces.front().env_id;
  const std::size_t len = traces.front().records.size();
  for (const auto& t : traces) {
    if (t.K != sum.K || t.env_id != sum.env_id || t.records.size() != len) {
      throw ValidationError("shape mismatch: traces differ in K or environment");
    }
    sum.seeds.push_back(t.seed);
  }
  const double n = static_cast<double>(traces.size());
  sum.mean_cum_regret.assign(len, 0.0);
  sum.stddev_cum_regret.assign(len, 0.0);
  for (std::size_t k = 0; k < len; ++k) {
    double m = 0.0;
    for (const auto& t : traces) m += t.records[k].cum_regret;
    m /= n;
    double ss = 0.0;
    for (const auto& t : traces) {
      const double dv = t.records[k].cum_regret - m;
      ss += dv * dv;
    }
    sum.mean_cum_regret[k] = m;
    sum.stddev_cum_regret[k] = traces.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  std::size_t violated = 0;
  for (const auto& t : traces) violated += t.any_violation() ? 1 : 0;
  sum.violation_rate = static_cast<double>(violated) / n;
  return sum;
}

TailCheck variance_tail_check(const TabularMdp& mdp, const OptimalSolution& solution,
                              const DeterministicPolicy& policy, std::uint64_t num_samples, double delta,
                              std::uint64_t seed) {
  if (num_samples == 0) throw ValidationError("num_samples must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  const double H = mdp.horizon();
  TailCheck out;
  out.threshold = 160.0 * H * H * std::log(4.0 * (H + 1.0) / delta);
  out.min_sum = std::numeric_limits<double>::infinity();
  out.max_sum = -std::numeric_limits<double>::infinity();
  Rng rng(seed);
  std::uint64_t exceed = 0;
  for (std::uint64_t i = 0; i < num_samples; ++i) {
    const auto traj = sample_trajectory(mdp, policy, rng);
    double total = 0.0;
    for (int h = 0; h < mdp.horizon(); ++h) {
      total += solution.var(h, traj.steps[h].state, traj.steps[h].action);
    }
    out.min_sum = std::min(out.min_sum, total);
    out.max_sum = std::max(out.max_sum, total);
    if (total > out.threshold) ++exceed;
  }
  out.exceedance_rate = static_cast<double>(exceed) / static_cast<double>(num_samples);
  return out;
}

}  // namespace mvplab
