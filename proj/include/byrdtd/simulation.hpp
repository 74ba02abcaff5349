#pragma once

#include <functional>
#include <vector>

#include "byrdtd/aggregation.hpp"
#include "byrdtd/byzantine.hpp"
#include "byrdtd/config.hpp"
#include "byrdtd/metrics.hpp"
#include "byrdtd/td.hpp"

namespace byrdtd {

// Everything a round reads but never changes.  The model's agents are the
// honest agents in topo.honest() order.
struct SimulationContext {
  const MrpModel& model;
  const NetworkTopology& topo;
  Aggregation aggregation = Aggregation::Trim;
  AttackModel attack;
  TdParams td;
  StepSchedule schedule;
};

inline constexpr double kDivergenceBound = 1e12;

struct SimulationState {
  long k = 0;
  std::vector<VectorXd> thetas;   // honest, in topo.honest() order
  std::vector<VectorXd> shadows;  // Byzantine, in topo.byzantine() order
  EligibilityTrace trace;
  int current_state = 0;
  Rng chain_rng;
  std::vector<AttackerState> attackers;
  bool diverged = false;
  long diverged_at = -1;
};

// theta^0 = 0 for every agent, z^{-1} = 0, s^0 drawn from the initial distribution.
SimulationState initial_state(const SimulationContext& ctx, std::uint64_t chain_seed);

// Called once per round with the messages of the step-k snapshot, indexed by agent id.
using RoundObserver = std::function<void(const SimulationState& before, const std::vector<VectorXd>& outgoing)>;

// One synchronous round k -> k+1.  Sets `diverged` instead of throwing when a
// coordinate leaves [-1e12, 1e12] or turns non-finite.
void run_step(SimulationState& state, const SimulationContext& ctx, const RoundObserver& observer = {});

// Metrics at step k (after k rounds): SBE at the current state, CE and the
// distance to theta_inf.
struct StepRecorder {
  SbeEvaluator sbe;
  VectorXd theta_inf;

  StepRecorder(const MrpModel& model, VectorXd fixed_point) : sbe(model), theta_inf(std::move(fixed_point)) {}
  void record(const SimulationState& state, MetricsTrace& trace) const;
};

}  // namespace byrdtd
