#include "byrdtd/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "byrdtd/error.hpp"

namespace byrdtd {

TrialSeeds trial_seeds(std::uint64_t master_seed, int trial_index) {
  TrialSeeds s;
  s.trial = derive_seed(master_seed, static_cast<std::uint64_t>(trial_index));
  s.topology = derive_seed(s.trial, 1);
  s.chain = derive_seed(s.trial, 2);
  s.attack = derive_seed(s.trial, 3);
  return s;
}

NetworkTopology build_topology(const TopologyConfig& cfg, std::uint64_t seed) {
  switch (cfg.kind) {
    case TopologyKind::Complete:
      return build_complete(cfg.honest, cfg.byzantine, cfg.trim, cfg.theorem_mode);
    case TopologyKind::ErdosRenyi:
      return build_erdos_renyi(cfg.agents, cfg.edge_prob, cfg.byzantine_prob, seed, cfg.trim_rule);
    case TopologyKind::Preset:
      return build_preset(cfg.preset, cfg.trim);
    case TopologyKind::Circulant:
      return build_circulant(cfg.honest, cfg.byzantine, cfg.in_degree, cfg.trim);
    case TopologyKind::TopologyFile: {
      std::ifstream in(cfg.path);
      if (!in) throw Error(ErrorCode::IoError, "cannot open topology '" + cfg.path + "'");
      return read_topology(in, cfg.path);
    }
  }
  throw Error(ErrorCode::InvalidSpec, "unknown topology kind");
}

MrpModel build_environment(const EnvironmentConfig& cfg, int num_agents) {
  switch (cfg.kind) {
    case EnvironmentKind::RandomMrp: {
      RandomMrpSpec spec = cfg.random;
      spec.num_agents = num_agents;
      return build_random_mrp(spec);
    }
    case EnvironmentKind::GridNavigation: {
      GridNavSpec spec = cfg.grid;
      spec.num_agents = num_agents;
      return build_grid_navigation(spec);
    }
    case EnvironmentKind::ModelFile: {
      MrpModel model = load_model(cfg.path);
      if (model.num_agents() != num_agents)
        throw Error(ErrorCode::InvalidSpec, "model file '" + cfg.path + "' has " +
                                                std::to_string(model.num_agents()) + " agents, topology has " +
                                                std::to_string(num_agents) + " honest agents");
      return model;
    }
  }
  throw Error(ErrorCode::InvalidSpec, "unknown environment kind");
}

NetworkTopology trial_topology(const ExperimentConfig& cfg, const TrialSeeds& seeds) {
  constexpr int kRedraws = 64;
  for (int attempt = 0;; ++attempt) {
    try {
      return build_topology(cfg.topology, derive_seed(seeds.topology, static_cast<std::uint64_t>(attempt)));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoHonestAgents || cfg.topology.kind != TopologyKind::ErdosRenyi ||
          attempt + 1 >= kRedraws)
        throw;
    }
  }
}

TrialResult run_trial(const ExperimentConfig& cfg, int trial_index) {
  TrialResult res;
  res.index = trial_index;
  res.seeds = trial_seeds(cfg.master_seed, trial_index);
  const NetworkTopology topo = trial_topology(cfg, res.seeds);
  const MrpModel model = build_environment(cfg.environment, topo.num_honest());

  AttackModel attack = cfg.attack;
  attack.seed = res.seeds.attack;
  const TdParams td{cfg.lambda, model.discount()};
  res.steady = steady_state(model, stationary_distribution(model), td);
  res.unsaturation = degree_of_unsaturation(topo);
  res.reward_variation = measured_reward_variation(model);
  res.num_honest = topo.num_honest();
  res.num_byzantine = topo.num_byzantine();

  const SimulationContext ctx{model, topo, cfg.aggregation, attack, td, cfg.schedule};
  SimulationState state = initial_state(ctx, res.seeds.chain);
  const StepRecorder recorder(model, res.steady.theta_inf);
  res.trace.reserve(static_cast<std::size_t>(cfg.steps));
  for (long k = 0; k < cfg.steps; ++k) {
    run_step(state, ctx);
    if (state.diverged) break;
    recorder.record(state, res.trace);
  }
  res.diverged = state.diverged;
  res.diverged_at = state.diverged_at;
  return res;
}

MetricsTrace average_traces(const std::vector<const MetricsTrace*>& traces) {
  if (traces.empty()) return {};
  std::size_t n = traces.front()->size();
  for (const MetricsTrace* t : traces) n = std::min(n, t->size());
  const double count = static_cast<double>(traces.size());
  std::vector<long> k(traces.front()->k().begin(), traces.front()->k().begin() + static_cast<std::ptrdiff_t>(n));
  auto column = [&](const std::vector<double>& (MetricsTrace::*get)() const) {
    std::vector<double> out(n, 0.0);
    for (const MetricsTrace* t : traces)
      for (std::size_t i = 0; i < n; ++i) out[i] += ((*t).*get)()[i];
    for (double& v : out) v /= count;
    return out;
  };
  return MetricsTrace::from_columns(std::move(k), column(&MetricsTrace::sbe), column(&MetricsTrace::ce),
                                    column(&MetricsTrace::msbe), column(&MetricsTrace::mce),
                                    column(&MetricsTrace::mce_rate_ratio), column(&MetricsTrace::fixed_point_dist));
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt(v(i));
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_file(const std::filesystem::path& path, const MetricsTrace& trace, const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  write_metrics_csv(out, trace, header);
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace

std::vector<std::string> trial_header(const ExperimentConfig& cfg, const TrialResult& trial) {
  std::vector<std::string> h;
  h.push_back("config_hash: " + hex64(fnv1a(cfg.source_text)));
  h.push_back("master_seed: " + std::to_string(cfg.master_seed));
  h.push_back("trial: " + std::to_string(trial.index));
  h.push_back("trial_seed: " + std::to_string(trial.seeds.trial));
  h.push_back("aggregation: " + std::string(aggregation_name(cfg.aggregation)));
  h.push_back("attack: " + std::string(attack_name(cfg.attack.kind)));
  h.push_back("lambda: " + fmt(cfg.lambda));
  h.push_back("honest: " + std::to_string(trial.num_honest));
  h.push_back("byzantine: " + std::to_string(trial.num_byzantine));
  h.push_back("theta_inf: " + join(trial.steady.theta_inf));
  h.push_back("D_G: " + fmt(trial.unsaturation));
  h.push_back("delta2: " + fmt(trial.reward_variation));
  const MatrixXd& a = trial.steady.a_star;
  h.push_back("A_star: " + join(Eigen::Map<const VectorXd>(a.data(), a.size()).eval()) + "  (column-major, " +
              std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ")");
  h.push_back("b_star: " + join(trial.steady.b_star));
  h.push_back("diverged: " + std::string(trial.diverged ? "yes at step " + std::to_string(trial.diverged_at) : "no"));
  return h;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  ExperimentResult out;
  std::filesystem::path dir(cfg.output);
  if (options.write_files) std::filesystem::create_directories(dir);
  for (int t = 0; t < cfg.trials; ++t) {
    out.trials.push_back(run_trial(cfg, t));
    const TrialResult& tr = out.trials.back();
    if (tr.diverged) ++out.diverged_trials;
    if (options.write_files) {
      char name[32];
      std::snprintf(name, sizeof name, "trial_%03d.csv", t);
      write_file(dir / name, tr.trace, trial_header(cfg, tr));
    }
    if (options.log) {
      *options.log << "trial " << t << ": " << tr.trace.size() << " steps";
      if (!tr.trace.empty())
        *options.log << ", final msbe " << fmt(tr.trace.msbe().back()) << ", final mce " << fmt(tr.trace.mce().back());
      if (tr.diverged) *options.log << ", diverged at step " << tr.diverged_at;
      *options.log << '\n';
    }
  }
  std::vector<const MetricsTrace*> traces;
  for (const TrialResult& tr : out.trials) traces.push_back(&tr.trace);
  out.averaged = average_traces(traces);
  if (options.write_files) {
    std::vector<std::string> header{"config_hash: " + hex64(fnv1a(cfg.source_text)),
                                    "master_seed: " + std::to_string(cfg.master_seed),
                                    "trials: " + std::to_string(cfg.trials),
                                    "diverged_trials: " + std::to_string(out.diverged_trials)};
    if (!out.trials.empty()) {
      header.push_back("theta_inf: " + join(out.trials.front().steady.theta_inf));
      double dg = 0.0;
      for (const TrialResult& tr : out.trials) dg += tr.unsaturation;
      header.push_back("mean_D_G: " + fmt(dg / static_cast<double>(out.trials.size())));
    }
    write_file(dir / "averaged.csv", out.averaged, header);
  }
  return out;
}

}  // namespace byrdtd
