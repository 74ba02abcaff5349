#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "byrdtd/config.hpp"
#include "byrdtd/metrics.hpp"
#include "byrdtd/simulation.hpp"

namespace byrdtd {

// Seeds of one trial.  The environment seed stays fixed across trials so every
// trial shares theta_inf; graph, chain and attack streams change per trial.
struct TrialSeeds {
  std::uint64_t trial = 0;
  std::uint64_t topology = 0;
  std::uint64_t chain = 0;
  std::uint64_t attack = 0;
};

TrialSeeds trial_seeds(std::uint64_t master_seed, int trial_index);

NetworkTopology build_topology(const TopologyConfig& cfg, std::uint64_t seed);
// num_agents is the honest count of the trial's topology.
MrpModel build_environment(const EnvironmentConfig& cfg, int num_agents);

// Topology of a trial, re-drawn with a fresh sub-seed when a random graph has no honest agent.
NetworkTopology trial_topology(const ExperimentConfig& cfg, const TrialSeeds& seeds);

struct TrialResult {
  int index = 0;
  TrialSeeds seeds;
  MetricsTrace trace;
  bool diverged = false;
  long diverged_at = -1;
  SteadyState steady;
  double unsaturation = 0.0;      // D_G
  double reward_variation = 0.0;  // delta^2
  int num_honest = 0;
  int num_byzantine = 0;
};

TrialResult run_trial(const ExperimentConfig& cfg, int trial_index);

struct ExperimentResult {
  std::vector<TrialResult> trials;
  MetricsTrace averaged;
  int diverged_trials = 0;
};

struct RunOptions {
  bool write_files = true;
  std::ostream* log = nullptr;  // progress lines; null for quiet
};

// Column-wise mean over trials, truncated to the shortest trial.
MetricsTrace average_traces(const std::vector<const MetricsTrace*>& traces);

// Runs every trial and, when asked, writes trial_XXX.csv and averaged.csv
// under cfg.output.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

std::vector<std::string> trial_header(const ExperimentConfig& cfg, const TrialResult& trial);

}  // namespace byrdtd
