// mvplab: generate instances, solve them exactly, run seeded MVP
// experiments, and evaluate regret bounds.
//
// Exit statuses: 0 success, 1 I/O or parse error, 2 validation error,
// 3 domain error.

#include <iostream>

#include "CLI11.hpp"
#include "mvplab/commands.hpp"

namespace fs = std::filesystem;
using namespace mvplab;

namespace {

void print_gen(const GenOutputs& out) {
  std::cout << out.mdp_path.string() << "\n";
  if (out.meta_path) std::cout << out.meta_path->string() << "\n";
}

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json_file(out_path, j);
    std::cout << out_path << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular episodic RL lab: MVP learner, exact solvers, hard instances"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an MDP instance as JSON");
  gen->require_subcommand(1);
  std::string out_prefix = "instance";

  LowerBoundSpec lb;
  std::string gaps_csv;
  auto* gen_lb = gen->add_subcommand("lower-bound", "Hard-instance family (writes MDP + meta JSON)");
  gen_lb->add_option("--S", lb.S, "Number of bandit states")->required();
  gen_lb->add_option("--A", lb.A, "Number of actions")->required();
  gen_lb->add_option("--H", lb.H, "Horizon")->required();
  gen_lb->add_option("--L", lb.L, "Target conditional variance in [1, H^2]")->required();
  gen_lb->add_option("--gaps", gaps_csv, "Comma-separated S*A*H gaps")->required();
  gen_lb->add_option("-o,--out", out_prefix, "Output path prefix");

  int chain_h = 1;
  auto* gen_chain_cmd = gen->add_subcommand("chain", "Single-state chain with reward 1 at the last step");
  gen_chain_cmd->add_option("--H", chain_h, "Horizon")->required();
  gen_chain_cmd->add_option("-o,--out", out_prefix, "Output path prefix");

  int rs = 2, ra = 2, rh = 2;
  double sparsity = 0.5;
  std::uint64_t rseed = 0;
  auto* gen_rand = gen->add_subcommand("random", "Random sparse instance with bounded total reward");
  gen_rand->add_option("--S", rs)->required();
  gen_rand->add_option("--A", ra)->required();
  gen_rand->add_option("--H", rh)->required();
  gen_rand->add_option("--sparsity", sparsity, "Expected support fraction per row");
  gen_rand->add_option("--seed", rseed);
  gen_rand->add_option("-o,--out", out_prefix, "Output path prefix");

  // solve
  auto* solve = app.add_subcommand("solve", "Exact optimal values, gaps and variance quantities");
  std::string mdp_path, solve_out;
  bool no_exact = false;
  std::uint64_t cap = kDefaultEnumerationCap;
  solve->add_option("mdp", mdp_path, "MDP JSON file")->required();
  solve->add_flag("--no-exact", no_exact, "Skip the policy-enumeration oracle for var_max_c");
  solve->add_option("--cap", cap, "Enumeration cap on the number of policies");
  solve->add_option("-o,--out", solve_out, "Write the report here instead of stdout");

  // run
  auto* run = app.add_subcommand("run", "Seeded MVP experiments from a JSON config");
  std::string config_path;
  int jobs = 1;
  run->add_option("config", config_path, "Experiment config JSON")->required();
  run->add_option("--jobs", jobs, "Seeds run concurrently")->check(CLI::PositiveNumber);

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Evaluate the regret upper bound for a solved report");
  std::string report_path, bounds_out, mode_name = "leading", source = "future";
  std::uint64_t bound_k = 1000;
  double bound_delta = 0.1;
  bounds->add_option("report", report_path, "Report written by `solve`")->required();
  bounds->add_option("--K", bound_k, "Number of episodes")->required();
  bounds->add_option("--delta", bound_delta, "Confidence parameter")->required();
  bounds->add_option("--mode", mode_name, "leading | full-constants")
      ->check(CLI::IsMember({"leading", "full-constants"}));
  bounds->add_option("--source", source, "var_max_c source: future | exact")->check(CLI::IsMember({"future", "exact"}));
  bounds->add_option("-o,--out", bounds_out, "Write the breakdown here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (gen_lb->parsed()) {
      lb.gaps = parse_number_list(gaps_csv);
      print_gen(gen_lower_bound(lb, out_prefix));
    } else if (gen_chain_cmd->parsed()) {
      print_gen(gen_chain(chain_h, out_prefix));
    } else if (gen_rand->parsed()) {
      print_gen(gen_random(rs, ra, rh, sparsity, rseed, out_prefix));
    } else if (solve->parsed()) {
      emit(solve_report(load_mdp(mdp_path), !no_exact, cap), solve_out);
    } else if (run->parsed()) {
      const fs::path cfg_path(config_path);
      const auto base = cfg_path.has_parent_path() ? cfg_path.parent_path() : fs::path(".");
      const auto config = parse_experiment_config(read_json_file(cfg_path), base);
      const auto out = run_config(config, base, jobs);
      for (const auto& p : out.trace_csvs) std::cout << p.string() << "\n";
      std::cout << out.summary_path.string() << "\n";
    } else if (bounds->parsed()) {
      const auto mode = mode_name == "leading" ? BoundMode::leading : BoundMode::full_constants;
      emit(bounds_report(read_json_file(report_path), bound_k, bound_delta, mode, source), bounds_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_status_for_current_exception();
  }
  return kExitOk;
}
