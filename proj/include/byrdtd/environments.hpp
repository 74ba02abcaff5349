#pragma once

#include <cstdint>
#include <vector>

#include "byrdtd/mrp.hpp"

namespace byrdtd {

// Synthetic MRP with dense positive transitions (hence ergodic) and a tunable
// spread of local rewards around the shared reward.
struct RandomMrpSpec {
  int num_states = 10;
  int num_agents = 7;
  int feature_dim = 5;
  double reward_scale = 1.0;
  // Target sqrt(delta^2): the worst-case per-transition standard deviation of
  // local rewards around their mean.
  double reward_heterogeneity = 0.0;
  double discount = 0.95;
  std::uint64_t seed = 1;
  // Draw the shared reward as (I - gamma P) Phi w, so the global value function
  // is Phi w and lies in the feature span.  Otherwise shared rewards are
  // uniform on [0, reward_scale].
  bool realizable = false;
};

// P, the features and the shared reward depend only on (num_states, feature_dim,
// reward_scale, seed, and discount when realizable); num_agents and reward_heterogeneity only change the
// zero-mean per-agent perturbation.  Sweeping heterogeneity therefore leaves
// the global reward, the value function and the TD fixed point unchanged.
MrpModel build_random_mrp(const RandomMrpSpec& spec);

// Tabular cooperative navigation: movers walk a grid_side x grid_side board
// under the uniform random policy over {up, left, right, down}; moves off the
// board are self-transitions.  Agent n tracks mover (n mod num_movers) and is
// rewarded -||position - landmark_n|| after the move, minus collision_penalty
// whenever both movers occupy the same cell.
struct GridNavSpec {
  int grid_side = 3;
  int num_movers = 1;
  int num_agents = 3;
  double collision_penalty = 1.0;
  int feature_dim = 4;
  double discount = 0.95;
  std::uint64_t seed = 1;
};

struct GridNavLayout {
  int grid_side = 0;
  int num_movers = 0;
  std::vector<int> landmarks;  // cell index (row * grid_side + col) per agent
};

// Joint state index = sum_m cell_m * cells^m.
std::vector<int> decode_grid_state(int state, int grid_side, int num_movers);
int encode_grid_state(const std::vector<int>& cells, int grid_side);

GridNavLayout grid_navigation_layout(const GridNavSpec& spec);
MrpModel build_grid_navigation(const GridNavSpec& spec);

}  // namespace byrdtd
