#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "byrdtd/aggregation.hpp"
#include "byrdtd/environments.hpp"
#include "byrdtd/error.hpp"
#include "byrdtd/experiment.hpp"
#include "byrdtd/metrics.hpp"
#include "byrdtd/td.hpp"
#include "byrdtd/topology.hpp"

namespace py = pybind11;
using namespace byrdtd;

namespace {

InboxSnapshot make_inbox(int receiver, std::vector<int> senders, const MatrixXd& values, const VectorXd& self) {
  InboxSnapshot inbox;
  inbox.receiver = receiver;
  inbox.senders = std::move(senders);
  inbox.values = values;
  inbox.self = self;
  if (inbox.values.cols() != static_cast<Eigen::Index>(inbox.senders.size()))
    throw Error(ErrorCode::InvalidSpec, "values must have one column per sender");
  if (inbox.values.cols() > 0 && inbox.values.rows() != inbox.self.size())
    throw Error(ErrorCode::InvalidSpec, "values rows must match the length of self");
  return inbox;
}

py::dict trace_dict(const MetricsTrace& t) {
  py::dict d;
  d["k"] = t.k();
  d["sbe"] = t.sbe();
  d["ce"] = t.ce();
  d["msbe"] = t.msbe();
  d["mce"] = t.mce();
  d["mce_rate_ratio"] = t.mce_rate_ratio();
  d["fixed_point_dist"] = t.fixed_point_dist();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Byzantine-resilient decentralized TD(lambda) core";

  static py::exception<Error> error_type(m, "ByrdtdError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    }
  });

  py::class_<MrpModel>(m, "MrpModel")
      .def(py::init<MatrixXd, std::vector<MatrixXd>, double, VectorXd, MatrixXd>(), py::arg("transition"),
           py::arg("rewards"), py::arg("discount"), py::arg("initial_dist"), py::arg("features"))
      .def_property_readonly("num_states", &MrpModel::num_states)
      .def_property_readonly("num_agents", &MrpModel::num_agents)
      .def_property_readonly("feature_dim", &MrpModel::feature_dim)
      .def_property_readonly("discount", &MrpModel::discount)
      .def_property_readonly("transition", &MrpModel::transition)
      .def_property_readonly("features", &MrpModel::features)
      .def("reward", &MrpModel::reward, py::arg("agent"), py::arg("s"), py::arg("s_next"))
      .def("to_text", [](const MrpModel& model) {
        std::ostringstream os;
        write_model(os, model);
        return os.str();
      });

  m.def("model_from_text", [](const std::string& text) {
    std::istringstream in(text);
    return read_model(in, "<text>");
  });
  m.def("load_model", &load_model, py::arg("path"));

  m.def(
      "random_mrp",
      [](int num_states, int num_agents, int feature_dim, double reward_scale, double heterogeneity, double discount,
         std::uint64_t seed, bool realizable) {
        return build_random_mrp(RandomMrpSpec{num_states, num_agents, feature_dim, reward_scale, heterogeneity,
                                              discount, seed, realizable});
      },
      py::arg("num_states") = 10, py::arg("num_agents") = 7, py::arg("feature_dim") = 5, py::arg("reward_scale") = 1.0,
      py::arg("reward_heterogeneity") = 0.0, py::arg("discount") = 0.95, py::arg("seed") = 1,
      py::arg("realizable") = false);

  m.def("is_ergodic", &is_ergodic, py::arg("transition"));
  m.def("stationary_distribution", [](const MrpModel& model) { return stationary_distribution(model).probs; });
  m.def("value_function", &exact_value_function);

  m.def(
      "steady_state",
      [](const MrpModel& model, double lambda) {
        const SteadyState s = steady_state(model, stationary_distribution(model), TdParams{lambda, model.discount()});
        py::dict d;
        d["a_star"] = s.a_star;
        d["b_star"] = s.b_star;
        d["theta_inf"] = s.theta_inf;
        d["max_sym_eigenvalue"] = s.max_sym_eigenvalue;
        return d;
      },
      py::arg("model"), py::arg("lam"));

  m.def(
      "sandwich",
      [](const MrpModel& model, double lambda) {
        const Sandwich s = sandwich_check(model, stationary_distribution(model), TdParams{lambda, model.discount()});
        return py::make_tuple(s.f_min, s.f_at_fixed_point, s.upper);
      },
      py::arg("model"), py::arg("lam"));

  py::class_<NetworkTopology>(m, "NetworkTopology")
      .def(py::init<std::vector<int>, std::vector<int>, std::vector<Edge>, std::map<int, int>>(), py::arg("honest"),
           py::arg("byzantine"), py::arg("edges"), py::arg("trim"))
      .def_property_readonly("honest", &NetworkTopology::honest)
      .def_property_readonly("byzantine", &NetworkTopology::byzantine)
      .def_property_readonly("edges", &NetworkTopology::edges)
      .def("trim", &NetworkTopology::trim);

  m.def("complete_topology", &build_complete, py::arg("honest"), py::arg("byzantine"), py::arg("q"),
        py::arg("theorem_mode") = false);
  m.def(
      "erdos_renyi_topology",
      [](int n, double p_edge, double p_byz, std::uint64_t seed) { return build_erdos_renyi(n, p_edge, p_byz, seed); },
      py::arg("agents"), py::arg("edge_prob"), py::arg("byzantine_prob"), py::arg("seed"));
  m.def("preset_topology", &build_preset, py::arg("name"), py::arg("q") = 1);
  m.def("degree_of_unsaturation", &degree_of_unsaturation);
  m.def(
      "check_connectivity",
      [](const NetworkTopology& topo, std::uint64_t budget) {
        const ConnectivityReport r = check_assumption_connectivity(topo, budget);
        return py::make_tuple(r.holds, r.tau ? py::cast(*r.tau) : py::none(), r.subgraphs);
      },
      py::arg("topology"), py::arg("budget") = 1'000'000'000ULL);

  m.def(
      "mean_aggregate",
      [](std::vector<int> senders, const MatrixXd& values, const VectorXd& self) {
        return mean_aggregate(make_inbox(-1, std::move(senders), values, self));
      },
      py::arg("senders"), py::arg("values"), py::arg("self_param"));
  m.def(
      "trimmed_aggregate",
      [](std::vector<int> senders, const MatrixXd& values, const VectorXd& self, int q) {
        const TrimResult r = trimmed_aggregate(make_inbox(-1, std::move(senders), values, self), q);
        py::list sets;
        for (const TrimSets& s : r.witness.dims) sets.append(py::make_tuple(s.low, s.kept, s.high));
        return py::make_tuple(r.value, sets);
      },
      py::arg("senders"), py::arg("values"), py::arg("self_param"), py::arg("q"));

  m.def("squared_bellman_error", &squared_bellman_error, py::arg("model"), py::arg("thetas"), py::arg("state"));
  m.def("consensus_error", &consensus_error, py::arg("thetas"));
  m.def("reward_variation", &measured_reward_variation, py::arg("model"));

  m.def(
      "run_config",
      [](const std::string& text, std::optional<std::uint64_t> seed, std::optional<int> trials,
         std::optional<long> steps, std::optional<std::string> out) {
        ExperimentConfig cfg = parse_config(text, "<python>");
        if (seed) cfg.master_seed = *seed;
        if (trials) cfg.trials = *trials;
        if (steps) cfg.steps = *steps;
        RunOptions opts;
        opts.write_files = out.has_value();
        if (out) cfg.output = *out;
        ExperimentResult res;
        {
          py::gil_scoped_release release;
          res = run_experiment(cfg, opts);
        }
        py::dict d = trace_dict(res.averaged);
        d["diverged_trials"] = res.diverged_trials;
        return d;
      },
      py::arg("config_text"), py::arg("seed") = py::none(), py::arg("trials") = py::none(),
      py::arg("steps") = py::none(), py::arg("out") = py::none());
}
