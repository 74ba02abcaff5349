#pragma once

#include <cstdint>
#include <string>

#include "byrdtd/byzantine.hpp"
#include "byrdtd/environments.hpp"
#include "byrdtd/td.hpp"
#include "byrdtd/topology.hpp"

namespace byrdtd {

enum class EnvironmentKind { RandomMrp, GridNavigation, ModelFile };
enum class TopologyKind { Complete, ErdosRenyi, Preset, Circulant, TopologyFile };
enum class Aggregation { Mean, Trim };

struct EnvironmentConfig {
  EnvironmentKind kind = EnvironmentKind::RandomMrp;
  RandomMrpSpec random;  // num_agents is overwritten by the honest count of each trial
  GridNavSpec grid;
  std::string path;
};

struct TopologyConfig {
  TopologyKind kind = TopologyKind::Complete;
  int honest = 7;
  int byzantine = 0;
  int trim = 0;
  bool theorem_mode = false;
  int agents = 9;  // Erdos-Renyi total
  double edge_prob = 0.7;
  double byzantine_prob = 0.2;
  TrimRule trim_rule = TrimRule::GlobalByzantineCount;
  std::string preset = "H3B1";
  int in_degree = 1;
  std::string path;
};

struct ExperimentConfig {
  EnvironmentConfig environment;
  TopologyConfig topology;
  Aggregation aggregation = Aggregation::Trim;
  AttackModel attack;
  double lambda = 0.0;
  StepSchedule schedule;
  long steps = 1000;
  int trials = 1;
  std::uint64_t master_seed = 1;
  std::string output = "out";
  std::string source_text;  // raw config text, hashed into the CSV header

  void validate() const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source_name = "<config>");
ExperimentConfig load_config(const std::string& path);

const char* aggregation_name(Aggregation agg);

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

}  // namespace byrdtd
