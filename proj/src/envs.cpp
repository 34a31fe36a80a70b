#include "mvplab/envs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mvplab/errors.hpp"

namespace mvplab {

void check_lower_bound_spec(const LowerBoundSpec& spec) {
  if (spec.S < 1 || spec.A < 1 || spec.H < 1) {
    throw ValidationError("S, A and H must be positive");
  }
  const double H = spec.H;
  if (!(spec.L >= 1.0 && spec.L <= H * H)) {
    throw ValidationError("L must lie in [1, H^2]");
  }
  const std::size_t expected = static_cast<std::size_t>(spec.S) * spec.A * spec.H;
  if (spec.gaps.size() != expected) {
    std::ostringstream os;
    os << "expected S*A*H = " << expected << " gaps, got " << spec.gaps.size();
    throw ValidationError(os.str());
  }
  const double root_l = std::sqrt(spec.L);
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < spec.gaps.size(); ++i) {
    const double g = spec.gaps[i];
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw ValidationError("gap " + std::to_string(i) + " must be a nonnegative real");
    }
    if (!(g < root_l)) {
      std::ostringstream os;
      os << "assumption Delta_i < sqrt(L) violated: gap " << i << " = " << g << " >= sqrt(L) = " << root_l;
      throw ValidationError(os.str());
    }
    if (g == 0.0) ++zeros;
  }
  if (zeros < static_cast<std::size_t>(spec.S) * spec.H) {
    std::ostringstream os;
    os << "gaps are not realizable: need at least S*H = " << spec.S * spec.H << " zero gaps, got "
       << zeros;
    throw ValidationError(os.str());
  }
}

namespace {

// One zero per group first, then the remaining gaps in index order; within a
// group, actions follow the original index order.
std::vector<int> assign_groups(const LowerBoundSpec& spec) {
  const std::size_t groups = static_cast<std::size_t>(spec.S) * spec.H;
  const std::size_t A = spec.A;
  std::vector<std::vector<int>> members(groups);
  std::vector<bool> used(spec.gaps.size(), false);
  std::size_t g = 0;
  for (std::size_t i = 0; i < spec.gaps.size() && g < groups; ++i) {
    if (spec.gaps[i] == 0.0) {
      members[g++].push_back(static_cast<int>(i));
      used[i] = true;
    }
  }
  g = 0;
  for (std::size_t i = 0; i < spec.gaps.size(); ++i) {
    if (used[i]) continue;
    while (members[g].size() == A) ++g;
    members[g].push_back(static_cast<int>(i));
  }
  std::vector<int> sigma;
  sigma.reserve(spec.gaps.size());
  for (auto& m : members) {
    std::sort(m.begin(), m.end());
    sigma.insert(sigma.end(), m.begin(), m.end());
  }
  return sigma;
}

}  // namespace

LowerBoundInstance make_lower_bound_instance(const LowerBoundSpec& spec) {
  check_lower_bound_spec(spec);
  const int S = spec.S;
  const int A = spec.A;
  const int H = spec.H;
  const double L = spec.L;
  const double root_l = std::sqrt(L);

  LowerBoundMeta meta;
  meta.S = S;
  meta.A = A;
  meta.H = H;
  meta.L = L;
  meta.sigma = assign_groups(spec);
  meta.p_table.resize(meta.sigma.size());
  for (std::size_t j = 0; j < meta.sigma.size(); ++j) {
    meta.p_table[j] = 0.5 - spec.gaps[meta.sigma[j]] / (4.0 * root_l);
  }
  meta.d_table.resize(static_cast<std::size_t>(H) * S);
  const double enter = 1.0 / (L * S * H);
  const double stay = 1.0 - 1.0 / (L * H);
  for (int h = 0; h < H; ++h) {
    for (int i = 0; i < S; ++i) meta.d_table[static_cast<std::size_t>(h) * S + i] = enter * std::pow(stay, h);
  }

  const Dims dims{H, S + 2, A};
  const int terminal = meta.terminal_state();
  std::vector<TransitionRow> transitions(dims.num_sa());
  std::vector<FiniteRewardDist> rewards(dims.num_sa(), FiniteRewardDist::constant(0.0));

  TransitionRow main_row;
  if (stay > 0.0) main_row.push_back({0, stay});
  for (int i = 0; i < S; ++i) main_row.push_back({meta.bandit_state(i), enter});

  for (int h = 0; h < H; ++h) {
    for (int a = 0; a < A; ++a) {
      transitions[dims.sa(h, 0, a)] = main_row;
      transitions[dims.sa(h, terminal, a)] = {{terminal, 1.0}};
      for (int i = 0; i < S; ++i) {
        const std::size_t site = dims.sa(h, meta.bandit_state(i), a);
        transitions[site] = {{terminal, 1.0}};
        rewards[site] = FiniteRewardDist::bernoulli(root_l, meta.p(h, i, a));
      }
    }
  }
  std::vector<double> init(dims.S, 0.0);
  init[0] = 1.0;
  return {TabularMdp(dims, std::move(transitions), std::move(rewards), std::move(init)), std::move(meta)};
}

namespace {

std::vector<double> random_simplex(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& x : w) {
    x = 0.05 + rng.uniform();
    sum += x;
  }
  for (auto& x : w) x /= sum;
  return w;
}

std::vector<int> random_support(int S, double sparsity, Rng& rng) {
  std::vector<int> support;
  for (int s = 0; s < S; ++s) {
    if (rng.uniform() < sparsity) support.push_back(s);
  }
  if (support.empty()) support.push_back(static_cast<int>(rng.next() % static_cast<std::uint64_t>(S)));
  return support;
}

}  // namespace

TabularMdp make_random_mdp(int S, int A, int H, double sparsity, std::uint64_t seed) {
  if (S < 1 || A < 1 || H < 1) throw ValidationError("S, A and H must be positive");
  if (!(sparsity > 0.0 && sparsity <= 1.0)) throw ValidationError("sparsity must lie in (0, 1]");
  Rng rng(seed);
  const Dims dims{H, S, A};
  std::vector<TransitionRow> transitions(dims.num_sa());
  std::vector<FiniteRewardDist> rewards(dims.num_sa());
  // Atoms stay within [0, H] even at states the path rescaling never sees.
  const double atom_hi = std::min(2.0, static_cast<double>(H));
  for (std::size_t i = 0; i < dims.num_sa(); ++i) {
    const auto support = random_support(S, sparsity, rng);
    const auto probs = random_simplex(support.size(), rng);
    for (std::size_t j = 0; j < support.size(); ++j) transitions[i].push_back({support[j], probs[j]});

    const std::size_t atoms = 1 + rng.next() % 3;
    const auto rp = random_simplex(atoms, rng);
    std::vector<RewardAtom> dist;
    for (std::size_t j = 0; j < atoms; ++j) dist.push_back({atom_hi * rng.uniform(), rp[j]});
    rewards[i] = FiniteRewardDist(std::move(dist));
  }
  std::vector<double> init(S, 0.0);
  const auto init_support = random_support(S, sparsity, rng);
  const auto init_probs = random_simplex(init_support.size(), rng);
  for (std::size_t j = 0; j < init_support.size(); ++j) init[init_support[j]] = init_probs[j];

  TabularMdp mdp(dims, transitions, rewards, init);
  const double m = max_total_reward(mdp);
  if (m <= H) return mdp;

  const double scale = static_cast<double>(H) / m;
  for (auto& dist : rewards) {
    auto atoms = dist.atoms();
    for (auto& atom : atoms) atom.value *= scale;
    dist = FiniteRewardDist(std::move(atoms));
  }
  return TabularMdp(dims, std::move(transitions), std::move(rewards), std::move(init));
}

TabularMdp make_chain(int H) {
  if (H < 1) throw ValidationError("H must be at least 1");
  const Dims dims{H, 1, 1};
  std::vector<TransitionRow> transitions(dims.num_sa(), TransitionRow{{0, 1.0}});
  std::vector<FiniteRewardDist> rewards(dims.num_sa(), FiniteRewardDist::constant(0.0));
  rewards[dims.sa(H - 1, 0, 0)] = FiniteRewardDist::constant(1.0);
  return TabularMdp(dims, std::move(transitions), std::move(rewards), {1.0});
}

}  // namespace mvplab
