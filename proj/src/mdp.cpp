#include "mvplab/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mvplab/errors.hpp"

namespace mvplab {

double FiniteRewardDist::mean() const {
  double m = 0.0;
  for (const auto& atom : atoms_) m += atom.prob * atom.value;
  return m;
}

double FiniteRewardDist::second_moment() const {
  double m = 0.0;
  for (const auto& atom : atoms_) m += atom.prob * atom.value * atom.value;
  return m;
}

double FiniteRewardDist::variance() const {
  const double m = mean();
  double v = 0.0;
  for (const auto& atom : atoms_) {
    const double d = atom.value - m;
    v += atom.prob * d * d;
  }
  return v;
}

double FiniteRewardDist::max_value() const {
  double best = 0.0;
  bool any = false;
  for (const auto& atom : atoms_) {
    if (atom.prob <= 0.0) continue;
    best = any ? std::max(best, atom.value) : atom.value;
    any = true;
  }
  return best;
}

TabularMdp::TabularMdp(Dims dims, std::vector<TransitionRow> transitions,
                       std::vector<FiniteRewardDist> rewards, std::vector<double> init_dist)
    : dims_(dims),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)),
      init_dist_(std::move(init_dist)) {
  if (dims_.H < 1 || dims_.S < 1 || dims_.A < 1) {
    throw ValidationError("H, S and A must all be positive");
  }
  if (transitions_.size() != dims_.num_sa() || rewards_.size() != dims_.num_sa()) {
    throw ValidationError("transition/reward tables must have H*S*A rows");
  }
  if (init_dist_.size() != static_cast<std::size_t>(dims_.S)) {
    throw ValidationError("init_dist must have S entries");
  }
}

DeterministicPolicy::DeterministicPolicy(int H, int S, std::vector<int> actions)
    : H_(H), S_(S), actions_(std::move(actions)) {
  if (actions_.size() != static_cast<std::size_t>(H) * S) {
    throw ValidationError("policy table must have H*S entries");
  }
}

namespace {

std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::vector<Violation> validate_mdp(const TabularMdp& mdp) {
  std::vector<Violation> out;
  const Dims& d = mdp.dims();
  const double H = d.H;
  bool structural_ok = true;

  for (int h = 0; h < d.H; ++h) {
    for (int s = 0; s < d.S; ++s) {
      for (int a = 0; a < d.A; ++a) {
        const auto& row = mdp.transition(h, s, a);
        double sum = 0.0;
        for (const auto& succ : row) {
          if (succ.next < 0 || succ.next >= d.S) {
            out.push_back({h, s, a, "successor range", "next state " + std::to_string(succ.next)});
            structural_ok = false;
          }
          if (!(succ.prob >= 0.0)) {
            out.push_back({h, s, a, "negative probability", fmt_num(succ.prob)});
            structural_ok = false;
          }
          sum += succ.prob;
        }
        if (!(std::abs(sum - 1.0) <= kStochasticTol)) {
          out.push_back({h, s, a, "row sum", "transition row sums to " + fmt_num(sum)});
          structural_ok = false;
        }

        const auto& rew = mdp.reward(h, s, a);
        double rsum = 0.0;
        for (const auto& atom : rew.atoms()) {
          if (!(atom.prob >= 0.0)) {
            out.push_back({h, s, a, "negative probability", "reward atom prob " + fmt_num(atom.prob)});
            structural_ok = false;
          }
          if (!(atom.value >= 0.0 && atom.value <= H)) {
            out.push_back({h, s, a, "reward range", "atom value " + fmt_num(atom.value)});
          }
          rsum += atom.prob;
        }
        if (!(std::abs(rsum - 1.0) <= kStochasticTol)) {
          out.push_back({h, s, a, "reward row sum", "reward atoms sum to " + fmt_num(rsum)});
          structural_ok = false;
        }
      }
    }
  }

  double isum = 0.0;
  for (double p : mdp.init_dist()) {
    if (!(p >= 0.0)) {
      out.push_back({-1, -1, -1, "negative probability", "init_dist entry " + fmt_num(p)});
      structural_ok = false;
    }
    isum += p;
  }
  if (!(std::abs(isum - 1.0) <= kStochasticTol)) {
    out.push_back({-1, -1, -1, "init sum", "init_dist sums to " + fmt_num(isum)});
    structural_ok = false;
  }

  if (structural_ok) {
    const double m = max_total_reward(mdp);
    if (m > H + kPathRewardTol) {
      out.push_back({-1, -1, -1, "total reward exceeds H",
                     "max path reward " + fmt_num(m) + " > H = " + fmt_num(H)});
    }
  }
  return out;
}

double max_total_reward(const TabularMdp& mdp) {
  const Dims& d = mdp.dims();
  std::vector<double> next(d.S, 0.0);
  std::vector<double> cur(d.S, 0.0);
  for (int h = d.H - 1; h >= 0; --h) {
    for (int s = 0; s < d.S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < d.A; ++a) {
        double future = 0.0;
        bool any = false;
        for (const auto& succ : mdp.transition(h, s, a)) {
          if (succ.prob <= 0.0) continue;
          future = any ? std::max(future, next[succ.next]) : next[succ.next];
          any = true;
        }
        best = std::max(best, mdp.reward(h, s, a).max_value() + future);
      }
      cur[s] = best;
    }
    std::swap(cur, next);
  }
  double best = 0.0;
  bool any = false;
  for (int s = 0; s < d.S; ++s) {
    if (mdp.init_dist()[s] <= 0.0) continue;
    best = any ? std::max(best, next[s]) : next[s];
    any = true;
  }
  return best;
}

int sample_index(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return static_cast<int>(i);
  }
  return 0;
}

namespace {

int sample_successor(const TransitionRow& row, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& succ : row) {
    acc += succ.prob;
    if (u < acc) return succ.next;
  }
  for (auto it = row.rbegin(); it != row.rend(); ++it) {
    if (it->prob > 0.0) return it->next;
  }
  return row.empty() ? 0 : row.back().next;
}

double sample_reward(const FiniteRewardDist& dist, Rng& rng) {
  const auto& atoms = dist.atoms();
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& atom : atoms) {
    acc += atom.prob;
    if (u < acc) return atom.value;
  }
  for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
    if (it->prob > 0.0) return it->value;
  }
  return 0.0;
}

}  // namespace

Trajectory sample_trajectory(const TabularMdp& mdp, const DeterministicPolicy& policy, Rng& rng) {
  const Dims& d = mdp.dims();
  Trajectory traj;
  traj.steps.reserve(d.H);
  int s = sample_index(mdp.init_dist(), rng);
  for (int h = 0; h < d.H; ++h) {
    const int a = policy.action(h, s);
    const double r = sample_reward(mdp.reward(h, s, a), rng);
    traj.steps.push_back({s, a, r});
    if (h + 1 < d.H) s = sample_successor(mdp.transition(h, s, a), rng);
  }
  return traj;
}

std::vector<std::vector<double>> state_marginals(const TabularMdp& mdp,
                                                 const DeterministicPolicy& policy) {
  const Dims& d = mdp.dims();
  std::vector<std::vector<double>> out(d.H + 1, std::vector<double>(d.S, 0.0));
  out[0] = mdp.init_dist();
  for (int h = 0; h < d.H; ++h) {
    for (int s = 0; s < d.S; ++s) {
      const double mass = out[h][s];
      if (mass == 0.0) continue;
      for (const auto& succ : mdp.transition(h, s, policy.action(h, s))) {
        out[h + 1][succ.next] += mass * succ.prob;
      }
    }
  }
  return out;
}

std::vector<bool> reachable_cells(const TabularMdp& mdp) {
  const Dims& d = mdp.dims();
  std::vector<bool> reach(static_cast<std::size_t>(d.H) * d.S, false);
  for (int s = 0; s < d.S; ++s) reach[d.hs(0, s)] = mdp.init_dist()[s] > 0.0;
  for (int h = 0; h + 1 < d.H; ++h) {
    for (int s = 0; s < d.S; ++s) {
      if (!reach[d.hs(h, s)]) continue;
      for (int a = 0; a < d.A; ++a) {
        for (const auto& succ : mdp.transition(h, s, a)) {
          if (succ.prob > 0.0) reach[d.hs(h + 1, succ.next)] = true;
        }
      }
    }
  }
  return reach;
}

}  // namespace mvplab
