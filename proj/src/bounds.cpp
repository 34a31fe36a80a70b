#include "mvplab/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "mvplab/errors.hpp"

namespace mvplab {

double w_bar(int H, std::uint64_t K, double delta, double var_max_c) {
  const double h = H;
  return std::min(160.0 * h * h * std::log(4.0 * static_cast<double>(K) * (h + 1.0) / delta), var_max_c);
}

double bound_iota(int S, int A, int H, std::uint64_t K, double delta) {
  return std::log(static_cast<double>(S) * A * H * static_cast<double>(K) / delta);
}

BoundInputs bound_inputs(const OptimalSolution& solution, const VarianceProfile& profile, std::uint64_t K,
                         double delta, const std::string& source) {
  if (!solution.delta_min) throw DomainError("no-gaps: Z_sub is empty");
  if (K < 1) throw ValidationError("K must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  BoundInputs in;
  const Dims& d = solution.dims;
  for (const auto& site : solution.z_sub) in.sub_gaps.push_back(solution.gap(site.h, site.s, site.a));
  in.num_opt = solution.z_opt.size();
  in.delta_min = *solution.delta_min;
  in.H = d.H;
  in.S = d.S;
  in.A = d.A;
  in.K = K;
  in.delta = delta;
  if (source == "future") {
    in.var_max_c = profile.var_max_c_future;
  } else if (source == "exact") {
    if (!profile.var_max_c_exact) throw ValidationError("exact var_max_c requested but not computed");
    in.var_max_c = *profile.var_max_c_exact;
  } else {
    throw ValidationError("var_max_c source must be 'future' or 'exact'");
  }
  in.var_max_c_source = source;
  in.w_bar = w_bar(d.H, K, delta, in.var_max_c);
  in.iota = bound_iota(d.S, d.A, d.H, K, delta);
  return in;
}

BoundValue upper_bound_value(const BoundInputs& in, BoundMode mode) {
  if (in.sub_gaps.empty()) throw DomainError("no-gaps: Z_sub is empty");
  if (!(in.iota > 0.0)) throw ValidationError("iota must be positive");
  if (!(in.delta_min > 0.0)) throw ValidationError("delta_min must be positive");
  const BoundConstants c = mode == BoundMode::full_constants ? BoundConstants{} : BoundConstants{1, 1, 1, 1};

  const double H = in.H, S = in.S, A = in.A, iota = in.iota;
  double inv_gaps = 0.0;
  for (double g : in.sub_gaps) {
    if (!(g > 0.0)) throw ValidationError("gaps over Z_sub must be positive");
    inv_gaps += 1.0 / g;
  }
  BoundValue v;
  v.gap_term = c.gap * in.w_bar * iota * inv_gaps;
  v.opt_term = c.opt * static_cast<double>(in.num_opt) * std::min(H * H, in.var_max_c) * iota / in.delta_min;
  v.s2_term = c.s2 * S * S * A * std::pow(H, 4) * iota * std::log(10.0 * S * A * H * iota / in.delta_min);
  v.h5_term = c.h5 * S * A * std::pow(H, 5) * iota;
  v.total = v.gap_term + v.opt_term + v.s2_term + v.h5_term;
  return v;
}

double lower_bound_value(const std::vector<double>& gaps, double L, double K) {
  if (!(K > 1.0)) throw ValidationError("K must exceed 1");
  double sum = 0.0;
  bool any = false;
  for (double g : gaps) {
    if (g > 0.0) {
      sum += L / g;
      any = true;
    }
  }
  if (!any) throw DomainError("empty-gap-set: no positive gaps");
  return sum * std::log(K);
}

}  // namespace mvplab
