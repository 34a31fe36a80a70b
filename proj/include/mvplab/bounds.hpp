#pragma once

// Evaluators for the gap-dependent regret upper bound of MVP and the
// matching lower-bound envelope, so measured regret can be set against them.

#include <cstdint>
#include <string>
#include <vector>

#include "mvplab/solver.hpp"

namespace mvplab {

enum class BoundMode { leading, full_constants };

/// Printed prefactors of the four upper-bound terms.
struct BoundConstants {
  double gap = 48600.0;
  double opt = 21600.0;
  double s2 = 270000.0;
  double h5 = 276.0;
};

struct BoundInputs {
  std::vector<double> sub_gaps;  // gaps over Z_sub, all > 0
  std::size_t num_opt = 0;       // |Z_opt|
  double delta_min = 0.0;
  int H = 1;
  int S = 1;
  int A = 1;
  std::uint64_t K = 1;
  double delta = 0.1;
  double var_max_c = 0.0;
  std::string var_max_c_source = "future";
  double w_bar = 0.0;  // min(160 H^2 log(4K(H+1)/delta), var_max_c)
  double iota = 0.0;   // log(S A H K / delta)
};

double w_bar(int H, std::uint64_t K, double delta, double var_max_c);
double bound_iota(int S, int A, int H, std::uint64_t K, double delta);

/// Gathers inputs from a solved instance. `source` is "future" or "exact";
/// "exact" requires profile.var_max_c_exact. Throws DomainError ("no-gaps")
/// when Z_sub is empty.
BoundInputs bound_inputs(const OptimalSolution& solution, const VarianceProfile& profile, std::uint64_t K,
                         double delta, const std::string& source = "future");

struct BoundValue {
  double total = 0.0;
  double gap_term = 0.0;
  double opt_term = 0.0;
  double s2_term = 0.0;
  double h5_term = 0.0;
};

/// Throws DomainError ("no-gaps") for an empty gap set and ValidationError
/// for a nonpositive iota or delta_min.
BoundValue upper_bound_value(const BoundInputs& in, BoundMode mode = BoundMode::leading);

/// sum over positive gaps of (L / gap) * log K. Zero gaps are skipped; throws
/// DomainError when none is positive and ValidationError unless K > 1.
double lower_bound_value(const std::vector<double>& gaps, double L, double K);

}  // namespace mvplab
