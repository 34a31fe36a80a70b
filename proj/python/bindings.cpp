#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mvplab/bounds.hpp"
#include "mvplab/commands.hpp"
#include "mvplab/envs.hpp"
#include "mvplab/errors.hpp"
#include "mvplab/harness.hpp"
#include "mvplab/io.hpp"
#include "mvplab/learner.hpp"
#include "mvplab/solver.hpp"

namespace py = pybind11;
using namespace mvplab;

namespace {

py::object json_to_py(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Json py_to_json(const py::object& o) {
  return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::list sites(const std::vector<Site>& v) {
  py::list out;
  for (const auto& s : v) out.append(py::make_tuple(s.h, s.s, s.a));
  return out;
}

Trajectory to_trajectory(const std::vector<std::tuple<int, int, double>>& steps) {
  Trajectory t;
  for (const auto& [s, a, r] : steps) t.steps.push_back({s, a, r});
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tabular episodic RL lab: MVP learner, exact solvers, hard instances";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<EnumerationTooLarge>(m, "EnumerationTooLarge", PyExc_ArithmeticError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);

  py::class_<TabularMdp>(m, "TabularMdp")
      .def_property_readonly("H", &TabularMdp::horizon)
      .def_property_readonly("S", &TabularMdp::num_states)
      .def_property_readonly("A", &TabularMdp::num_actions)
      .def_property_readonly("init_dist", &TabularMdp::init_dist)
      .def("transition",
           [](const TabularMdp& mdp, int h, int s, int a) {
             std::vector<std::pair<int, double>> out;
             for (const auto& succ : mdp.transition(h, s, a)) out.emplace_back(succ.next, succ.prob);
             return out;
           })
      .def("reward",
           [](const TabularMdp& mdp, int h, int s, int a) {
             std::vector<std::pair<double, double>> out;
             for (const auto& atom : mdp.reward(h, s, a).atoms()) out.emplace_back(atom.value, atom.prob);
             return out;
           })
      .def("to_json", [](const TabularMdp& mdp) { return json_to_py(mdp_to_json(mdp)); })
      .def_static("from_json", [](const py::object& o) { return mdp_from_json(py_to_json(o)); })
      .def_static("load", [](const std::filesystem::path& p) { return load_mdp(p); });

  py::class_<DeterministicPolicy>(m, "DeterministicPolicy")
      .def(py::init<int, int>())
      .def(py::init<int, int, std::vector<int>>())
      .def("action", &DeterministicPolicy::action)
      .def("set_action", &DeterministicPolicy::set_action)
      .def_property_readonly("table", &DeterministicPolicy::table);

  m.def("validate_mdp", [](const TabularMdp& mdp) {
    py::list out;
    for (const auto& v : validate_mdp(mdp)) {
      out.append(py::dict(py::arg("h") = v.h, py::arg("s") = v.s, py::arg("a") = v.a, py::arg("check") = v.check,
                          py::arg("detail") = v.detail));
    }
    return out;
  });
  m.def("max_total_reward", &max_total_reward);
  m.def("sample_trajectory", [](const TabularMdp& mdp, const DeterministicPolicy& pi, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::tuple<int, int, double>> out;
    for (const auto& st : sample_trajectory(mdp, pi, rng).steps) out.emplace_back(st.state, st.action, st.reward);
    return out;
  });

  // envs
  m.def(
      "make_lower_bound_instance",
      [](int S, int A, int H, double L, std::vector<double> gaps) {
        auto inst = make_lower_bound_instance({S, A, H, L, std::move(gaps)});
        return py::make_tuple(std::move(inst.mdp), json_to_py(meta_to_json(inst.meta)));
      },
      py::arg("S"), py::arg("A"), py::arg("H"), py::arg("L"), py::arg("gaps"));
  m.def("make_random_mdp", &make_random_mdp, py::arg("S"), py::arg("A"), py::arg("H"), py::arg("sparsity"),
        py::arg("seed"));
  m.def("make_chain", &make_chain, py::arg("H"));

  // exact solver
  py::class_<OptimalSolution>(m, "OptimalSolution")
      .def_readonly("q_star", &OptimalSolution::q_star)
      .def_readonly("v_star", &OptimalSolution::v_star)
      .def_readonly("v0_star", &OptimalSolution::v0_star)
      .def_readonly("gaps", &OptimalSolution::gaps)
      .def_readonly("delta_min", &OptimalSolution::delta_min)
      .def_readonly("per_step_var", &OptimalSolution::per_step_var)
      .def_property_readonly("z_opt", [](const OptimalSolution& s) { return sites(s.z_opt); })
      .def_property_readonly("z_sub", [](const OptimalSolution& s) { return sites(s.z_sub); })
      .def("q", &OptimalSolution::q)
      .def("v", &OptimalSolution::v)
      .def("gap", &OptimalSolution::gap)
      .def("var", &OptimalSolution::var)
      .def("policy", &OptimalSolution::policy);

  py::class_<VarianceProfile>(m, "VarianceProfile")
      .def_readonly("var_max", &VarianceProfile::var_max)
      .def_readonly("w_table", &VarianceProfile::w_table)
      .def_readonly("var_max_c_future", &VarianceProfile::var_max_c_future)
      .def_readonly("var_max_c_exact", &VarianceProfile::var_max_c_exact)
      .def_readonly("q_star_max", &VarianceProfile::q_star_max);

  m.def("optimal_values", &optimal_values);
  m.def("policy_evaluation", [](const TabularMdp& mdp, const DeterministicPolicy& pi) {
    const auto v = policy_evaluation(mdp, pi);
    return py::make_tuple(v.v, v.v0);
  });
  m.def("var_max_unconditional", &var_max_unconditional);
  m.def("variance_profile", &variance_profile, py::arg("mdp"), py::arg("solution"), py::arg("with_exact") = false,
        py::arg("cap") = kDefaultEnumerationCap);
  m.def("conditional_total_variance", &conditional_total_variance);
  m.def("brute_force_optimal", &brute_force_optimal, py::arg("mdp"), py::arg("cap") = kDefaultEnumerationCap);
  m.def("brute_force_var_max_conditional", &brute_force_var_max_conditional, py::arg("mdp"), py::arg("solution"),
        py::arg("cap") = kDefaultEnumerationCap);
  m.def("solve_report", [](const TabularMdp& mdp, bool exact, std::uint64_t cap) {
    return json_to_py(solve_report(mdp, exact, cap));
  }, py::arg("mdp"), py::arg("exact") = true, py::arg("cap") = kDefaultEnumerationCap);

  // learner
  py::class_<MvpConstants>(m, "MvpConstants")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("c1"), py::arg("c2"), py::arg("c3"))
      .def_readwrite("c1", &MvpConstants::c1)
      .def_readwrite("c2", &MvpConstants::c2)
      .def_readwrite("c3", &MvpConstants::c3);

  m.def("mvp_bonus", &mvp_bonus, py::arg("constants"), py::arg("n"), py::arg("next_value_var"),
        py::arg("reward_var"), py::arg("H"), py::arg("iota"));

  py::class_<MvpLearner>(m, "MvpLearner")
      .def(py::init([](int S, int A, int H, std::uint64_t K, double delta, MvpConstants c) {
             return MvpLearner(Dims{H, S, A}, K, delta, c);
           }),
           py::arg("S"), py::arg("A"), py::arg("H"), py::arg("K"), py::arg("delta"),
           py::arg("constants") = MvpConstants{})
      .def_property_readonly("iota", &MvpLearner::iota)
      .def("greedy_policy", &MvpLearner::greedy_policy)
      .def("bonus", &MvpLearner::bonus)
      .def("update", [](MvpLearner& l, const std::vector<std::tuple<int, int, double>>& steps) {
        l.update(to_trajectory(steps));
      })
      .def("q", &MvpLearner::q)
      .def("v", &MvpLearner::v)
      .def("count", &MvpLearner::count)
      .def("snapshot", [](const MvpLearner& l) { return json_to_py(snapshot_to_json(l.snapshot())); });

  // harness
  m.def(
      "run_experiment",
      [](const TabularMdp& mdp, std::uint64_t K, double delta, std::uint64_t seed, MvpConstants constants) {
        const auto sol = optimal_values(mdp);
        RunConfig rc;
        rc.K = K;
        rc.delta = delta;
        rc.seed = seed;
        rc.constants = constants;
        const auto trace = run_experiment(mdp, sol, rc);
        std::vector<double> instant, cum, slack, surplus;
        std::vector<std::uint64_t> viol;
        for (const auto& r : trace.records) {
          instant.push_back(r.instant_regret);
          cum.push_back(r.cum_regret);
          viol.push_back(r.optimism_violation_count);
          slack.push_back(r.min_q_slack);
          surplus.push_back(r.max_surplus);
        }
        return py::dict(py::arg("instant_regret") = instant, py::arg("cum_regret") = cum,
                        py::arg("opt_violations") = viol, py::arg("min_q_slack") = slack,
                        py::arg("max_surplus") = surplus, py::arg("final_counts") = trace.final_counts);
      },
      py::arg("mdp"), py::arg("K"), py::arg("delta"), py::arg("seed"), py::arg("constants") = MvpConstants{});
  m.def("clip", &clip);
  m.def(
      "fit_log_regression",
      [](const std::vector<double>& cum, std::uint64_t first_k, std::uint64_t last_k) {
        const auto f = fit_log_regression(cum, first_k, last_k);
        return py::make_tuple(f.slope, f.intercept, f.r_squared);
      },
      py::arg("cum_regret"), py::arg("first_k"), py::arg("last_k"));

  // bounds
  m.def(
      "upper_bound",
      [](const TabularMdp& mdp, std::uint64_t K, double delta, const std::string& mode, const std::string& source) {
        const auto sol = optimal_values(mdp);
        const auto profile = variance_profile(mdp, sol, source == "exact");
        const auto in = bound_inputs(sol, profile, K, delta, source);
        const auto bm = mode == "leading" ? BoundMode::leading : BoundMode::full_constants;
        return json_to_py(bound_to_json(in, upper_bound_value(in, bm), bm));
      },
      py::arg("mdp"), py::arg("K"), py::arg("delta"), py::arg("mode") = "leading", py::arg("source") = "future");
  m.def("lower_bound_value", &lower_bound_value, py::arg("gaps"), py::arg("L"), py::arg("K"));
  m.def("w_bar", &w_bar);
}
