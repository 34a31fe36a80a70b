#pragma once

// Implementations behind the `mvplab` subcommands. Each throws the typed
// errors from errors.hpp; the executable maps them to exit statuses.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mvplab/envs.hpp"
#include "mvplab/harness.hpp"
#include "mvplab/io.hpp"

namespace mvplab {

enum ExitStatus : int { kExitOk = 0, kExitIo = 1, kExitValidation = 2, kExitDomain = 3 };

/// Exit status for the exception currently being handled.
int exit_status_for_current_exception();

struct ExperimentConfig {
  Json env;  // path string or {"type": "lower-bound" | "chain" | "random" | "file", ...}
  std::uint64_t K = 1;
  double delta = 0.1;
  std::vector<std::uint64_t> seeds;
  MvpConstants constants{};
  double c4 = kDefaultClipConstant;
  Diagnostics diagnostics{};
  std::filesystem::path output_dir = ".";
};

/// Relative paths (env file, output_dir) resolve against `base_dir`.
ExperimentConfig parse_experiment_config(const Json& j, const std::filesystem::path& base_dir);

struct Environment {
  TabularMdp mdp;
  std::string id;
  std::optional<LowerBoundMeta> meta;
};

Environment build_environment(const Json& env, const std::filesystem::path& base_dir);

struct GenOutputs {
  std::filesystem::path mdp_path;
  std::optional<std::filesystem::path> meta_path;
};

/// Writes `<prefix>.json` (and `<prefix>.meta.json` for the lower-bound family).
GenOutputs gen_lower_bound(const LowerBoundSpec& spec, const std::filesystem::path& prefix);
GenOutputs gen_chain(int H, const std::filesystem::path& prefix);
GenOutputs gen_random(int S, int A, int H, double sparsity, std::uint64_t seed, const std::filesystem::path& prefix);

/// Validates the model, solves it, and attempts the enumeration oracle for
/// var_max_c when `exact` is set; exceeding the cap is recorded in the report.
Json solve_report(const TabularMdp& mdp, bool exact, std::uint64_t cap);

struct RunOutputs {
  std::vector<std::filesystem::path> trace_csvs;
  std::filesystem::path summary_path;
  Json summary;
};

/// Runs every seed (up to `jobs` at once), writing `trace_seed<seed>.csv`,
/// `counts_seed<seed>.json`, `summary.json` and `summary_curve.csv`.
RunOutputs run_config(const ExperimentConfig& config, const std::filesystem::path& base_dir, int jobs);

Json summarize_runs(const std::vector<RegretTrace>& traces, const TabularMdp& mdp, const OptimalSolution& sol,
                    const VarianceProfile& profile, double c4);

Json bounds_report(const Json& solved_report, std::uint64_t K, double delta, BoundMode mode,
                   const std::string& source);

std::vector<double> parse_number_list(const std::string& csv);

}  // namespace mvplab
