#include "byrdtd/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "byrdtd/aggregation.hpp"
#include "byrdtd/error.hpp"
#include "byrdtd/experiment.hpp"

namespace byrdtd {

namespace {

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> trials;
  bool quiet = false;
};

std::string fmt(double v, const char* spec = "%.10g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

bool require_file(const std::string& path, std::ostream& err) {
  if (std::filesystem::is_regular_file(path)) return true;
  err << "byrdtd: no such file: " << path << '\n';
  return false;
}

ExperimentConfig config_with_flags(const std::string& path, const GlobalFlags& flags) {
  ExperimentConfig cfg = load_config(path);
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (flags.out) cfg.output = *flags.out;
  if (flags.trials) cfg.trials = *flags.trials;
  cfg.validate();
  return cfg;
}

int cmd_run(const std::string& path, const GlobalFlags& flags, std::ostream& out) {
  const ExperimentConfig cfg = config_with_flags(path, flags);
  RunOptions opts;
  opts.log = flags.quiet ? nullptr : &out;
  const ExperimentResult res = run_experiment(cfg, opts);
  if (!flags.quiet) {
    out << "wrote " << res.trials.size() << " trial file(s) and averaged.csv to " << cfg.output << '\n';
    if (res.diverged_trials > 0) out << res.diverged_trials << " trial(s) diverged\n";
  }
  return 0;
}

int cmd_oracle(const std::string& path, double lambda, std::ostream& out) {
  const MrpModel model = load_model(path);
  const TdParams td{lambda, model.discount()};
  const StationaryDistribution rho = stationary_distribution(model);
  const SteadyState steady = steady_state(model, rho, td);
  const Sandwich sw = sandwich_check(model, rho, td);

  out << "states " << model.num_states() << ", agents " << model.num_agents() << ", features "
      << model.feature_dim() << ", discount " << fmt(model.discount()) << ", lambda " << fmt(lambda) << '\n';
  out << "stationary distribution:";
  for (Eigen::Index i = 0; i < rho.probs.size(); ++i) out << ' ' << fmt(rho.probs(i));
  out << "\ntheta_inf:";
  for (Eigen::Index i = 0; i < steady.theta_inf.size(); ++i) out << ' ' << fmt(steady.theta_inf(i), "%.17g");
  out << "\nA* eigenvalues:";
  Eigen::EigenSolver<MatrixXd> eig(steady.a_star, false);
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const std::complex<double> z = eig.eigenvalues()(i);
    out << ' ' << fmt(z.real());
    if (z.imag() != 0.0) out << (z.imag() > 0 ? "+" : "") << fmt(z.imag()) << 'i';
  }
  out << "\nlargest eigenvalue of (A* + A*^T)/2: " << fmt(steady.max_sym_eigenvalue) << '\n';
  out << "F(theta_inf) = " << fmt(sw.f_at_fixed_point) << ", min F = " << fmt(sw.f_min)
      << ", (1 - gamma lambda)/(1 - gamma) min F = " << fmt(sw.upper) << '\n';
  const bool sandwich_ok = sw.f_min <= sw.f_at_fixed_point + 1e-9 && sw.f_at_fixed_point <= sw.upper + 1e-9;
  out << "sandwich: " << (sandwich_ok ? "holds" : "VIOLATED") << '\n';
  const double residual = (steady.a_star * steady.theta_inf + steady.b_star).norm();
  const bool residual_ok = residual < 1e-10;
  out << "‖A*θ+b*‖ " << (residual_ok ? "< 1e-10" : ">= 1e-10") << " (residual " << fmt(residual, "%.3g") << ")\n";
  return residual_ok && sandwich_ok ? 0 : 1;
}

int cmd_verify(const std::string& path, const GlobalFlags& flags, long rounds, std::uint64_t budget,
               std::ostream& out) {
  const ExperimentConfig cfg = config_with_flags(path, flags);
  const TrialSeeds seeds = trial_seeds(cfg.master_seed, 0);
  const NetworkTopology topo = trial_topology(cfg, seeds);
  bool ok = true;

  const TrimCheck trim = check_trim(topo);
  out << "agents: " << topo.num_honest() << " honest, " << topo.num_byzantine() << " Byzantine\n";
  out << "D_G = " << fmt(degree_of_unsaturation(topo)) << '\n';
  out << "trim covers Byzantine in-neighbors: " << (trim.covers_byzantine ? "yes" : "no") << '\n';
  out << "3q < N_n everywhere: " << (trim.theorem_condition ? "yes" : "no") << '\n';
  for (const std::string& w : trim.warnings) out << "  warning: " << w << '\n';

  int tau_budget = topo.num_honest();
  try {
    const ConnectivityReport rep = check_assumption_connectivity(topo, budget);
    if (rep.holds) {
      out << "Assumption 4: holds, τ_G = " << *rep.tau << " (" << rep.subgraphs << " reduced graphs)\n";
      tau_budget = std::max(1, *rep.tau);
    } else {
      out << "Assumption 4: fails (a reduced graph has no source node)\n";
      ok = false;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
    out << "Assumption 4: not checked (" << e.what() << ")\n";
  }

  if (!trim.covers_byzantine) {
    out << "conditions c1-c6: skipped, some honest agent trims fewer values than it has Byzantine in-neighbors\n";
    return 1;
  }
  const MrpModel model = build_environment(cfg.environment, topo.num_honest());
  AttackModel attack = cfg.attack;
  attack.seed = seeds.attack;
  const SimulationContext ctx{model, topo, Aggregation::Trim, attack, TdParams{cfg.lambda, model.discount()},
                              cfg.schedule};
  SimulationState state = initial_state(ctx, seeds.chain);
  ConditionReport total;
  int worst_power = 0;
  long checked = 0;
  auto observer = [&](const SimulationState&, const std::vector<VectorXd>& outgoing) {
    const ConditionReport r = verify_conditions(reconstruct_weight_matrices(topo, outgoing), topo, tau_budget);
    total.c1 = total.c1 && r.c1;
    total.c2 = total.c2 && r.c2;
    total.c3 = total.c3 && r.c3;
    total.c4 = total.c4 && r.c4;
    total.c5 = total.c5 && r.c5;
    total.c6 = total.c6 && r.c6;
    if (r.c6) worst_power = std::max(worst_power, r.c6_power);
    ++checked;
  };
  for (long k = 0; k < rounds && !state.diverged; ++k) run_step(state, ctx, observer);

  auto line = [&](const char* name, bool v) {
    out << name << ": " << (v ? "holds" : "fails") << '\n';
    ok = ok && v;
  };
  out << "weight matrices checked over " << checked << " rounds (trim rule)\n";
  line("c1 row-stochastic", total.c1);
  line("c2 diagonal 1/N*", total.c2);
  line("c3 support on edges", total.c3);
  line("c4 lower bound count", total.c4);
  line("c5 upper bound", total.c5);
  out << "c6 positive column of Y^tau (tau <= " << tau_budget << "): " << (total.c6 ? "holds" : "fails");
  if (total.c6) out << ", reached at power " << worst_power;
  out << '\n';
  ok = ok && total.c6;
  return ok ? 0 : 1;
}

int cmd_plotdata(const std::string& path, const GlobalFlags& flags, std::size_t points, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  const MetricsTrace trace = read_metrics_csv(in, path);
  std::filesystem::path src(path);
  std::filesystem::path dir = flags.out ? std::filesystem::path(*flags.out) : src.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  const std::string stem = src.stem().string();
  const std::size_t n = trace.size();
  const std::size_t stride = points == 0 || n <= points ? 1 : (n + points - 1) / points;

  auto emit = [&](const std::string& suffix, const std::vector<double>& col, std::size_t first) {
    const std::filesystem::path file = dir / (stem + suffix);
    std::ofstream f(file);
    if (!f) throw Error(ErrorCode::IoError, "cannot write '" + file.string() + "'");
    for (std::size_t i = first; i < n; i += stride) f << trace.k()[i] << ' ' << fmt(col[i], "%.17g") << '\n';
    if (n > first && (n - 1 - first) % stride != 0) f << trace.k()[n - 1] << ' ' << fmt(col[n - 1], "%.17g") << '\n';
    if (!flags.quiet) out << "wrote " << file.string() << '\n';
  };
  emit("_msbe.txt", trace.msbe(), 0);
  // the rate ratio is undefined at k = 1
  std::size_t first = 0;
  while (first < n && trace.k()[first] < 2) ++first;
  emit("_mce_rate.txt", trace.mce_rate_ratio(), first);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Byzantine-resilient decentralized TD(lambda) simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags flags;
  std::uint64_t seed = 0;
  std::string out_path;
  int trials = 0;
  auto* seed_opt = app.add_option("--seed", seed, "master seed override");
  auto* out_opt = app.add_option("--out", out_path, "output directory override");
  auto* trials_opt = app.add_option("--trials", trials, "trial count override")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", flags.quiet, "suppress progress output");

  std::string config_path, model_path, csv_path;
  double lambda = 0.0;
  long rounds = 50;
  std::uint64_t budget = 1'000'000'000;
  std::size_t points = 1000;

  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "experiment config (YAML)")->required();
  auto* oracle = app.add_subcommand("oracle", "steady-state oracle for a model file");
  oracle->add_option("model", model_path, "model file")->required();
  oracle->add_option("--lambda", lambda, "trace decay lambda in [0, 1]")->required();
  auto* verify = app.add_subcommand("verify", "check trim conditions and network connectivity");
  verify->add_option("config", config_path, "experiment config (YAML)")->required();
  verify->add_option("--rounds", rounds, "rounds whose weight matrices are checked");
  verify->add_option("--budget", budget, "maximum number of reduced graphs to enumerate");
  auto* plot = app.add_subcommand("plotdata", "downsampled MSBE and MCE*k/ln k curves from a CSV");
  plot->add_option("csv", csv_path, "metrics CSV")->required();
  plot->add_option("--points", points, "approximate number of points per curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) flags.seed = seed;
  if (*out_opt) flags.out = out_path;
  if (*trials_opt) flags.trials = trials;

  try {
    if (*run) {
      if (!require_file(config_path, err)) return 2;
      return cmd_run(config_path, flags, out);
    }
    if (*oracle) {
      if (!require_file(model_path, err)) return 2;
      return cmd_oracle(model_path, lambda, out);
    }
    if (*verify) {
      if (!require_file(config_path, err)) return 2;
      return cmd_verify(config_path, flags, rounds, budget, out);
    }
    if (*plot) {
      if (!require_file(csv_path, err)) return 2;
      return cmd_plotdata(csv_path, flags, points, out);
    }
  } catch (const Error& e) {
    err << "byrdtd: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "byrdtd: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace byrdtd
