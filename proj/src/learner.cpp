#include "mvplab/learner.hpp"

#include <algorithm>
#include <cmath>

#include "mvplab/errors.hpp"

namespace mvplab {

double mvp_bonus(const MvpConstants& c, std::uint64_t n, double next_value_var, double reward_var,
                 double H, double iota) {
  const double denom = static_cast<double>(std::max<std::uint64_t>(n, 1));
  if (n == 0) {
    next_value_var = 0.0;
    reward_var = 0.0;
  }
  return c.c1 * std::sqrt(std::max(0.0, next_value_var) * iota / denom) +
         c.c2 * std::sqrt(std::max(0.0, reward_var) * iota / denom) + c.c3 * H * iota / denom;
}

MvpLearner::MvpLearner(Dims dims, std::uint64_t K, double delta, MvpConstants constants)
    : dims_(dims), K_(K), delta_(delta), constants_(constants) {
  if (dims_.H < 1 || dims_.S < 1 || dims_.A < 1) throw ValidationError("H, S and A must be positive");
  if (K_ < 1) throw ValidationError("K must be at least 1");
  if (!(delta_ > 0.0 && delta_ < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  iota_ = std::log(static_cast<double>(dims_.S) * dims_.A * dims_.H * static_cast<double>(K_) / delta_);
  if (!(iota_ > 0.0)) throw ValidationError("iota = log(SAHK/delta) must be positive");

  const std::size_t nsa = dims_.num_sa();
  counts_.assign(nsa, 0);
  successor_counts_.assign(nsa * dims_.S, 0);
  support_.assign(nsa, {});
  reward_sum_.assign(nsa, 0.0);
  reward_sq_sum_.assign(nsa, 0.0);
  q_table_.assign(nsa, 0.0);
  v_table_.assign(dims_.num_hs_terminal(), 0.0);
}

DeterministicPolicy MvpLearner::greedy_policy() const {
  DeterministicPolicy pi(dims_.H, dims_.S);
  for (int h = 0; h < dims_.H; ++h) {
    for (int s = 0; s < dims_.S; ++s) {
      int best = 0;
      for (int a = 1; a < dims_.A; ++a) {
        if (q(h, s, a) > q(h, s, best)) best = a;
      }
      pi.set_action(h, s, best);
    }
  }
  return pi;
}

double MvpLearner::next_value_mean(int h, int s, int a) const {
  const std::size_t i = dims_.sa(h, s, a);
  const std::uint64_t n = counts_[i];
  if (n == 0 || support_[i].empty()) return 0.0;
  double e = 0.0;
  for (int next : support_[i]) {
    e += static_cast<double>(successor_counts_[i * dims_.S + next]) * v(h + 1, next);
  }
  return e / static_cast<double>(n);
}

double MvpLearner::next_value_variance(int h, int s, int a) const {
  const std::size_t i = dims_.sa(h, s, a);
  const std::uint64_t n = counts_[i];
  if (n == 0 || support_[i].empty()) return 0.0;
  const double mean = next_value_mean(h, s, a);
  double var = 0.0;
  for (int next : support_[i]) {
    const double dev = v(h + 1, next) - mean;
    var += static_cast<double>(successor_counts_[i * dims_.S + next]) * dev * dev;
  }
  return var / static_cast<double>(n);
}

double MvpLearner::bonus(int h, int s, int a) const {
  const std::size_t i = dims_.sa(h, s, a);
  const std::uint64_t n = counts_[i];
  double reward_var = 0.0;
  if (n > 0) {
    const double nn = static_cast<double>(n);
    const double r_hat = reward_sum_[i] / nn;
    reward_var = std::max(0.0, reward_sq_sum_[i] / nn - r_hat * r_hat);
  }
  return mvp_bonus(constants_, n, next_value_variance(h, s, a), reward_var, dims_.H, iota_);
}

void MvpLearner::recompute_level(int h) {
  const double H = dims_.H;
  for (int s = 0; s < dims_.S; ++s) {
    double best = 0.0;
    for (int a = 0; a < dims_.A; ++a) {
      const std::size_t i = dims_.sa(h, s, a);
      const std::uint64_t n = counts_[i];
      const double r_hat = n > 0 ? reward_sum_[i] / static_cast<double>(n) : 0.0;
      const double q = std::min(r_hat + next_value_mean(h, s, a) + bonus(h, s, a), H);
      q_table_[i] = q;
      best = a == 0 ? q : std::max(best, q);
    }
    v_table_[dims_.hs(h, s)] = best;
  }
}

void MvpLearner::update(const Trajectory& trajectory) {
  if (trajectory.steps.size() != static_cast<std::size_t>(dims_.H)) {
    throw ValidationError("length-mismatch: trajectory has " + std::to_string(trajectory.steps.size()) +
                          " steps, expected H = " + std::to_string(dims_.H));
  }
  for (int h = dims_.H - 1; h >= 0; --h) {
    const Step& step = trajectory.steps[h];
    const std::size_t i = dims_.sa(h, step.state, step.action);
    ++counts_[i];
    reward_sum_[i] += step.reward;
    reward_sq_sum_[i] += step.reward * step.reward;
    if (h + 1 < dims_.H) {
      const int next = trajectory.steps[h + 1].state;
      if (successor_counts_[i * dims_.S + next]++ == 0) {
        auto& sup = support_[i];
        sup.insert(std::lower_bound(sup.begin(), sup.end(), next), next);
      }
    }
    recompute_level(h);
  }
}

}  // namespace mvplab
