#include "mvplab/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mvplab/errors.hpp"

namespace mvplab {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get_as(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    throw ValidationError(std::string("field '") + what + "' has the wrong type");
  }
}

void expect_array(const Json& j, std::size_t n, const std::string& what) {
  if (!j.is_array() || j.size() != n) {
    throw ValidationError("field '" + what + "' must be an array of length " + std::to_string(n));
  }
}

Json sites_to_json(const std::vector<Site>& sites) {
  Json arr = Json::array();
  for (const auto& s : sites) arr.push_back({s.h, s.s, s.a});
  return arr;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json mdp_to_json(const TabularMdp& mdp) {
  const Dims& d = mdp.dims();
  Json trans = Json::array();
  Json rew = Json::array();
  for (int h = 0; h < d.H; ++h) {
    Json th = Json::array();
    Json rh = Json::array();
    for (int s = 0; s < d.S; ++s) {
      Json ts = Json::array();
      Json rs = Json::array();
      for (int a = 0; a < d.A; ++a) {
        Json row = Json::array();
        for (const auto& succ : mdp.transition(h, s, a)) row.push_back({succ.next, succ.prob});
        ts.push_back(std::move(row));
        Json atoms = Json::array();
        for (const auto& atom : mdp.reward(h, s, a).atoms()) atoms.push_back({atom.value, atom.prob});
        rs.push_back(std::move(atoms));
      }
      th.push_back(std::move(ts));
      rh.push_back(std::move(rs));
    }
    trans.push_back(std::move(th));
    rew.push_back(std::move(rh));
  }
  return Json{{"H", d.H}, {"S", d.S}, {"A", d.A}, {"transitions", std::move(trans)},
              {"rewards", std::move(rew)}, {"init_dist", mdp.init_dist()}};
}

TabularMdp mdp_from_json(const Json& j) {
  Dims d;
  d.H = get_as<int>(require(j, "H"), "H");
  d.S = get_as<int>(require(j, "S"), "S");
  d.A = get_as<int>(require(j, "A"), "A");
  if (d.H < 1 || d.S < 1 || d.A < 1) throw ValidationError("H, S and A must be positive");
  const Json& trans = require(j, "transitions");
  const Json& rew = require(j, "rewards");
  expect_array(trans, d.H, "transitions");
  expect_array(rew, d.H, "rewards");

  std::vector<TransitionRow> transitions(d.num_sa());
  std::vector<FiniteRewardDist> rewards(d.num_sa());
  for (int h = 0; h < d.H; ++h) {
    expect_array(trans[h], d.S, "transitions[" + std::to_string(h) + "]");
    expect_array(rew[h], d.S, "rewards[" + std::to_string(h) + "]");
    for (int s = 0; s < d.S; ++s) {
      const std::string site = "[" + std::to_string(h) + "][" + std::to_string(s) + "]";
      expect_array(trans[h][s], d.A, "transitions" + site);
      expect_array(rew[h][s], d.A, "rewards" + site);
      for (int a = 0; a < d.A; ++a) {
        for (const auto& pair : trans[h][s][a]) {
          if (!pair.is_array() || pair.size() != 2) throw ValidationError("transition entries must be [next_state, prob]");
          transitions[d.sa(h, s, a)].push_back({get_as<int>(pair[0], "next_state"), get_as<double>(pair[1], "prob")});
        }
        std::vector<RewardAtom> atoms;
        for (const auto& pair : rew[h][s][a]) {
          if (!pair.is_array() || pair.size() != 2) throw ValidationError("reward entries must be [value, prob]");
          atoms.push_back({get_as<double>(pair[0], "value"), get_as<double>(pair[1], "prob")});
        }
        rewards[d.sa(h, s, a)] = FiniteRewardDist(std::move(atoms));
      }
    }
  }
  const Json& init = require(j, "init_dist");
  expect_array(init, d.S, "init_dist");
  return TabularMdp(d, std::move(transitions), std::move(rewards), get_as<std::vector<double>>(init, "init_dist"));
}

Json meta_to_json(const LowerBoundMeta& meta) {
  // Nested [h][i][a] tables for readability; d_table is [h][i].
  Json sigma = Json::array();
  Json p = Json::array();
  Json dt = Json::array();
  for (int h = 0; h < meta.H; ++h) {
    Json sh = Json::array(), ph = Json::array(), dh = Json::array();
    for (int i = 0; i < meta.S; ++i) {
      Json si = Json::array(), pi = Json::array();
      for (int a = 0; a < meta.A; ++a) {
        const std::size_t idx = (static_cast<std::size_t>(h) * meta.S + i) * meta.A + a;
        si.push_back(meta.sigma[idx]);
        pi.push_back(meta.p_table[idx]);
      }
      sh.push_back(std::move(si));
      ph.push_back(std::move(pi));
      dh.push_back(meta.d(h, i));
    }
    sigma.push_back(std::move(sh));
    p.push_back(std::move(ph));
    dt.push_back(std::move(dh));
  }
  return Json{{"S", meta.S},
              {"A", meta.A},
              {"H", meta.H},
              {"L", meta.L},
              {"main_state", LowerBoundMeta::main_state()},
              {"terminal_state", meta.terminal_state()},
              {"sigma", std::move(sigma)},
              {"p_table", std::move(p)},
              {"d_table", std::move(dt)}};
}

Json snapshot_to_json(const LearnerSnapshot& snap) {
  return Json{{"H", snap.dims.H}, {"S", snap.dims.S},       {"A", snap.dims.A},
              {"q_table", snap.q_table}, {"v_table", snap.v_table}, {"n", snap.counts}};
}

Json solution_report(const OptimalSolution& sol, const VarianceProfile& profile, const std::string& exact_status) {
  double var_lo = 0.0, var_hi = 0.0;
  if (!sol.per_step_var.empty()) {
    var_lo = *std::min_element(sol.per_step_var.begin(), sol.per_step_var.end());
    var_hi = *std::max_element(sol.per_step_var.begin(), sol.per_step_var.end());
  }
  return Json{{"H", sol.dims.H},
              {"S", sol.dims.S},
              {"A", sol.dims.A},
              {"v0_star", sol.v0_star},
              {"q_star", sol.q_star},
              {"v_star", sol.v_star},
              {"gaps", sol.gaps},
              {"delta_min", optional_number(sol.delta_min)},
              {"z_opt", sites_to_json(sol.z_opt)},
              {"z_sub", sites_to_json(sol.z_sub)},
              {"per_step_var", sol.per_step_var},
              {"per_step_var_min", var_lo},
              {"per_step_var_max", var_hi},
              {"var_max", profile.var_max},
              {"w_table", profile.w_table},
              {"var_max_c_future", profile.var_max_c_future},
              {"var_max_c_exact", optional_number(profile.var_max_c_exact)},
              {"var_max_c_exact_status", exact_status},
              {"q_star_max", profile.q_star_max}};
}

BoundInputs bound_inputs_from_report(const Json& report, std::uint64_t K, double delta, const std::string& source) {
  Dims d;
  d.H = get_as<int>(require(report, "H"), "H");
  d.S = get_as<int>(require(report, "S"), "S");
  d.A = get_as<int>(require(report, "A"), "A");
  const auto gaps = get_as<std::vector<double>>(require(report, "gaps"), "gaps");
  if (gaps.size() != d.num_sa()) throw ValidationError("field 'gaps' must have H*S*A entries");

  OptimalSolution sol;
  sol.dims = d;
  sol.gaps = gaps;
  for (const char* key : {"z_sub", "z_opt"}) {
    for (const auto& t : require(report, key)) {
      if (!t.is_array() || t.size() != 3) throw ValidationError(std::string("field '") + key + "' must hold [h,s,a] triples");
      const Site site{get_as<int>(t[0], key), get_as<int>(t[1], key), get_as<int>(t[2], key)};
      if (site.h < 0 || site.h >= d.H || site.s < 0 || site.s >= d.S || site.a < 0 || site.a >= d.A) {
        throw ValidationError(std::string("field '") + key + "' holds an out-of-range site");
      }
      (std::string(key) == "z_sub" ? sol.z_sub : sol.z_opt).push_back(site);
    }
  }
  const Json& dm = require(report, "delta_min");
  if (!dm.is_null()) sol.delta_min = get_as<double>(dm, "delta_min");

  VarianceProfile profile;
  profile.var_max_c_future = get_as<double>(require(report, "var_max_c_future"), "var_max_c_future");
  if (report.contains("var_max_c_exact") && !report.at("var_max_c_exact").is_null()) {
    profile.var_max_c_exact = get_as<double>(report.at("var_max_c_exact"), "var_max_c_exact");
  }
  return bound_inputs(sol, profile, K, delta, source);
}

Json bound_to_json(const BoundInputs& in, const BoundValue& value, BoundMode mode) {
  return Json{{"mode", mode == BoundMode::leading ? "leading" : "full-constants"},
              {"K", in.K},
              {"delta", in.delta},
              {"iota", in.iota},
              {"w_bar", in.w_bar},
              {"var_max_c", in.var_max_c},
              {"var_max_c_source", in.var_max_c_source},
              {"num_sub", in.sub_gaps.size()},
              {"num_opt", in.num_opt},
              {"delta_min", in.delta_min},
              {"gap_term", value.gap_term},
              {"opt_term", value.opt_term},
              {"s2_term", value.s2_term},
              {"h5_term", value.h5_term},
              {"total", value.total},
              {"note",
               "gap term uses w_bar = min(160 H^2 log(4K(H+1)/delta), var_max_c); the informal statement "
               "writes H^2 log K in place of the 160 H^2 log(4K(H+1)/delta) factor"}};
}

namespace {

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const RegretTrace& trace) {
  os << "k,instant_regret,cum_regret,opt_violations,min_q_slack,max_surplus\n";
  for (const auto& r : trace.records) {
    os << r.k << ',' << num17(r.instant_regret) << ',' << num17(r.cum_regret) << ','
       << r.optimism_violation_count << ',' << num17(r.min_q_slack) << ',' << num17(r.max_surplus) << '\n';
  }
}

Json counts_to_json(const RegretTrace& trace) {
  const Dims& d = trace.dims;
  Json n = Json::array();
  for (int h = 0; h < d.H; ++h) {
    Json nh = Json::array();
    for (int s = 0; s < d.S; ++s) {
      Json ns = Json::array();
      for (int a = 0; a < d.A; ++a) ns.push_back(trace.final_counts[d.sa(h, s, a)]);
      nh.push_back(std::move(ns));
    }
    n.push_back(std::move(nh));
  }
  return Json{{"seed", trace.seed}, {"K", trace.K}, {"delta", trace.delta}, {"env", trace.env_id}, {"n", std::move(n)}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError("malformed JSON in '" + path.string() + "' at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

TabularMdp load_mdp(const std::filesystem::path& path) { return mdp_from_json(read_json_file(path)); }

}  // namespace mvplab
