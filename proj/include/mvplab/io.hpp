#pragma once

// JSON and CSV encodings of models, solver reports, learner snapshots and
// regret traces.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "mvplab/bounds.hpp"
#include "mvplab/envs.hpp"
#include "mvplab/harness.hpp"
#include "mvplab/learner.hpp"
#include "mvplab/mdp.hpp"
#include "mvplab/solver.hpp"

namespace mvplab {

using Json = nlohmann::json;

Json mdp_to_json(const TabularMdp& mdp);
/// Throws ValidationError when fields are missing or mis-shaped.
TabularMdp mdp_from_json(const Json& j);

Json meta_to_json(const LowerBoundMeta& meta);
Json snapshot_to_json(const LearnerSnapshot& snapshot);

/// `exact_status` is "ok", "not requested" or "too large".
Json solution_report(const OptimalSolution& sol, const VarianceProfile& profile,
                     const std::string& exact_status);

/// Rebuilds bound inputs from a `solution_report` document. Throws
/// ValidationError for missing fields and DomainError for an empty Z_sub.
BoundInputs bound_inputs_from_report(const Json& report, std::uint64_t K, double delta,
                                     const std::string& source);

Json bound_to_json(const BoundInputs& in, const BoundValue& value, BoundMode mode);

/// Header `k,instant_regret,cum_regret,opt_violations,min_q_slack,max_surplus`,
/// values printed with 17 significant digits.
void write_trace_csv(std::ostream& os, const RegretTrace& trace);
Json counts_to_json(const RegretTrace& trace);

/// Throws IoError when the file cannot be read or is not valid JSON; the
/// message carries the parse position.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

TabularMdp load_mdp(const std::filesystem::path& path);

}  // namespace mvplab
