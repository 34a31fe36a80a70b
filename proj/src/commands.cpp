#include "mvplab/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cmath>
#include <exception>
#include <set>
#include <sstream>
#include <thread>

#include "mvplab/errors.hpp"

namespace mvplab {

namespace fs = std::filesystem;

int exit_status_for_current_exception() {
  try {
    throw;
  } catch (const IoError&) {
    return kExitIo;
  } catch (const ValidationError&) {
    return kExitValidation;
  } catch (const DomainError&) {
    return kExitDomain;
  } catch (...) {
    return kExitIo;
  }
}

namespace {

template <class T>
T field_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ValidationError(std::string("config field '") + key + "' has the wrong type");
  }
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("config missing field '") + key + "'");
  return field_or<T>(j, key, T{});
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

std::string format_id(const std::string& kind, std::initializer_list<std::pair<const char*, double>> params) {
  std::ostringstream os;
  os << kind << '(';
  bool first = true;
  for (const auto& [k, v] : params) {
    os << (first ? "" : ",") << k << '=' << v;
    first = false;
  }
  os << ')';
  return os.str();
}

void ensure_valid(const TabularMdp& mdp) {
  const auto report = validate_mdp(mdp);
  if (report.empty()) return;
  std::ostringstream os;
  os << "invalid MDP (" << report.size() << " violation" << (report.size() == 1 ? "" : "s") << ")";
  for (const auto& v : report) {
    os << "\n  " << v.check;
    if (v.h >= 0) os << " at (h=" << v.h << ", s=" << v.s << ", a=" << v.a << ")";
    os << ": " << v.detail;
  }
  throw ValidationError(os.str());
}

std::string seed_suffix(std::uint64_t seed) { return "seed" + std::to_string(seed); }

}  // namespace

ExperimentConfig parse_experiment_config(const Json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  ExperimentConfig c;
  if (!j.contains("env")) throw ValidationError("config missing field 'env'");
  c.env = j.at("env");
  c.K = field<std::uint64_t>(j, "K");
  c.delta = field<double>(j, "delta");
  c.seeds = field<std::vector<std::uint64_t>>(j, "seeds");
  if (c.K < 1) throw ValidationError("K must be at least 1");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (c.seeds.empty()) throw ValidationError("seeds must be nonempty");
  if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) {
    throw ValidationError("seeds must be distinct");
  }
  if (j.contains("constants")) {
    const Json& k = j.at("constants");
    c.constants.c1 = field_or(k, "c1", c.constants.c1);
    c.constants.c2 = field_or(k, "c2", c.constants.c2);
    c.constants.c3 = field_or(k, "c3", c.constants.c3);
    c.c4 = field_or(k, "c4", c.c4);
  }
  if (j.contains("diagnostics")) {
    const Json& d = j.at("diagnostics");
    c.diagnostics.optimism = field_or(d, "optimism", c.diagnostics.optimism);
    c.diagnostics.surplus = field_or(d, "surplus", c.diagnostics.surplus);
  }
  c.output_dir = resolve(base_dir, field_or<std::string>(j, "output_dir", "."));
  return c;
}

Environment build_environment(const Json& env, const fs::path& base_dir) {
  if (env.is_string()) {
    const fs::path p = resolve(base_dir, env.get<std::string>());
    return {load_mdp(p), "file:" + p.filename().string(), std::nullopt};
  }
  const auto type = field<std::string>(env, "type");
  if (type == "file") {
    const fs::path p = resolve(base_dir, field<std::string>(env, "path"));
    return {load_mdp(p), "file:" + p.filename().string(), std::nullopt};
  }
  if (type == "chain") {
    const int H = field<int>(env, "H");
    return {make_chain(H), format_id("chain", {{"H", H}}), std::nullopt};
  }
  if (type == "random") {
    const int S = field<int>(env, "S"), A = field<int>(env, "A"), H = field<int>(env, "H");
    const double sparsity = field_or(env, "sparsity", 0.5);
    const auto seed = field_or<std::uint64_t>(env, "seed", 0);
    return {make_random_mdp(S, A, H, sparsity, seed),
            format_id("random", {{"S", S}, {"A", A}, {"H", H}, {"sparsity", sparsity}, {"seed", double(seed)}}),
            std::nullopt};
  }
  if (type == "lower-bound") {
    LowerBoundSpec spec;
    spec.S = field<int>(env, "S");
    spec.A = field<int>(env, "A");
    spec.H = field<int>(env, "H");
    spec.L = field<double>(env, "L");
    spec.gaps = field<std::vector<double>>(env, "gaps");
    auto inst = make_lower_bound_instance(spec);
    return {std::move(inst.mdp),
            format_id("lower-bound", {{"S", spec.S}, {"A", spec.A}, {"H", spec.H}, {"L", spec.L}}),
            std::move(inst.meta)};
  }
  throw ValidationError("unknown env type '" + type + "'");
}

namespace {

GenOutputs write_instance(const TabularMdp& mdp, const LowerBoundMeta* meta, const fs::path& prefix) {
  GenOutputs out;
  out.mdp_path = fs::path(prefix.string() + ".json");
  if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
  write_json_file(out.mdp_path, mdp_to_json(mdp));
  if (meta) {
    out.meta_path = fs::path(prefix.string() + ".meta.json");
    write_json_file(*out.meta_path, meta_to_json(*meta));
  }
  return out;
}

}  // namespace

GenOutputs gen_lower_bound(const LowerBoundSpec& spec, const fs::path& prefix) {
  const auto inst = make_lower_bound_instance(spec);
  return write_instance(inst.mdp, &inst.meta, prefix);
}

GenOutputs gen_chain(int H, const fs::path& prefix) { return write_instance(make_chain(H), nullptr, prefix); }

GenOutputs gen_random(int S, int A, int H, double sparsity, std::uint64_t seed, const fs::path& prefix) {
  return write_instance(make_random_mdp(S, A, H, sparsity, seed), nullptr, prefix);
}

Json solve_report(const TabularMdp& mdp, bool exact, std::uint64_t cap) {
  ensure_valid(mdp);
  const auto sol = optimal_values(mdp);
  auto profile = variance_profile(mdp, sol, false);
  std::string status = "not requested";
  if (exact) {
    try {
      profile.var_max_c_exact = brute_force_var_max_conditional(mdp, sol, cap);
      status = "ok";
    } catch (const EnumerationTooLarge&) {
      status = "too large";
    }
  }
  return solution_report(sol, profile, status);
}

Json summarize_runs(const std::vector<RegretTrace>& traces, const TabularMdp& mdp, const OptimalSolution& sol,
                    const VarianceProfile& profile, double c4) {
  const auto agg = aggregate_seeds(traces);
  const std::uint64_t K = agg.K;
  Json s;
  s["env"] = agg.env_id;
  s["K"] = K;
  s["delta"] = traces.front().delta;
  s["seeds"] = agg.seeds;
  s["violation_rate"] = agg.violation_rate;

  Json per_seed = Json::object();
  for (const auto& t : traces) per_seed[std::to_string(t.seed)] = t.records.back().cum_regret;
  s["final_cum_regret"] = {{"mean", agg.mean_cum_regret.back()},
                           {"stddev", agg.stddev_cum_regret.back()},
                           {"per_seed", per_seed}};

  const std::uint64_t first = std::max<std::uint64_t>(1, K / 2);
  if (K - first + 1 >= 10) {
    const auto fit = fit_log_regression(agg.mean_cum_regret, first, K);
    s["log_fit"] = {{"first_k", first},          {"last_k", K},
                    {"slope", fit.slope},         {"intercept", fit.intercept},
                    {"r_squared", fit.r_squared}, {"r_squared_ge_0_9", fit.r_squared >= 0.9}};
  } else {
    s["log_fit"] = nullptr;
  }
  if (K >= 4) {
    const std::uint64_t quarter = K / 4;
    const double at_k = agg.mean_cum_regret[K - 1] / std::sqrt(static_cast<double>(K));
    const double at_q = agg.mean_cum_regret[quarter - 1] / std::sqrt(static_cast<double>(quarter));
    s["sqrt_growth"] = {{"quarter_k", quarter},
                        {"ratio_at_K", at_k},
                        {"ratio_at_quarter", at_q},
                        {"decreasing", at_k < at_q}};
  } else {
    s["sqrt_growth"] = nullptr;
  }

  // Surpluses of the final tables, raw and clipped, summed over all sites.
  if (sol.delta_min) {
    Json per = Json::object();
    for (const auto& t : traces) {
      const auto rep = clipped_surpluses(surpluses(mdp, t.final_snapshot), sol, profile, c4);
      double raw = 0.0, clipped = 0.0;
      for (std::size_t i = 0; i < rep.raw.size(); ++i) {
        raw += rep.raw[i];
        clipped += rep.clipped[i];
      }
      per[std::to_string(t.seed)] = {{"raw_sum", raw}, {"clipped_sum", clipped}};
    }
    s["final_surplus"] = per;
  } else {
    s["final_surplus"] = nullptr;
  }
  s["c4"] = c4;
  s["var_max_c_source"] = "future";
  s["var_max_c_future"] = profile.var_max_c_future;
  return s;
}

RunOutputs run_config(const ExperimentConfig& config, const fs::path& base_dir, int jobs) {
  const auto env = build_environment(config.env, base_dir);
  ensure_valid(env.mdp);
  const auto sol = optimal_values(env.mdp);
  const auto profile = variance_profile(env.mdp, sol, false);
  fs::create_directories(config.output_dir);

  const std::size_t n = config.seeds.size();
  std::vector<RegretTrace> traces(n);
  std::vector<fs::path> csvs(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        RunConfig rc;
        rc.K = config.K;
        rc.delta = config.delta;
        rc.seed = config.seeds[i];
        rc.constants = config.constants;
        rc.diagnostics = config.diagnostics;
        rc.env_id = env.id;
        traces[i] = run_experiment(env.mdp, sol, rc);
        std::ostringstream csv;
        write_trace_csv(csv, traces[i]);
        csvs[i] = config.output_dir / ("trace_" + seed_suffix(rc.seed) + ".csv");
        write_text_file(csvs[i], csv.str());
        write_json_file(config.output_dir / ("counts_" + seed_suffix(rc.seed) + ".json"), counts_to_json(traces[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  RunOutputs out;
  out.trace_csvs = csvs;
  out.summary = summarize_runs(traces, env.mdp, sol, profile, config.c4);
  out.summary_path = config.output_dir / "summary.json";
  write_json_file(out.summary_path, out.summary);

  const auto agg = aggregate_seeds(traces);
  std::ostringstream curve;
  curve << "k,mean_cum_regret,stddev_cum_regret\n";
  char buf[96];
  for (std::size_t k = 0; k < agg.mean_cum_regret.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k + 1, agg.mean_cum_regret[k], agg.stddev_cum_regret[k]);
    curve << buf;
  }
  write_text_file(config.output_dir / "summary_curve.csv", curve.str());
  return out;
}

Json bounds_report(const Json& solved_report, std::uint64_t K, double delta, BoundMode mode,
                   const std::string& source) {
  const auto inputs = bound_inputs_from_report(solved_report, K, delta, source);
  return bound_to_json(inputs, upper_bound_value(inputs, mode), mode);
}

std::vector<double> parse_number_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("not a number: '" + item + "'");
    }
    if (used != item.size()) throw ValidationError("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace mvplab
