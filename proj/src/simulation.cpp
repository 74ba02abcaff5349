#include "byrdtd/simulation.hpp"

#include <cmath>
#include <map>

#include "byrdtd/error.hpp"

namespace byrdtd {

SimulationState initial_state(const SimulationContext& ctx, std::uint64_t chain_seed) {
  if (ctx.model.num_agents() != ctx.topo.num_honest())
    throw Error(ErrorCode::InvalidSpec, "model has " + std::to_string(ctx.model.num_agents()) +
                                            " reward agents but the topology has " +
                                            std::to_string(ctx.topo.num_honest()) + " honest agents");
  ctx.td.validate();
  ctx.schedule.validate();
  const int D = ctx.model.feature_dim();
  SimulationState st;
  st.thetas.assign(static_cast<std::size_t>(ctx.topo.num_honest()), VectorXd::Zero(D));
  st.shadows.assign(static_cast<std::size_t>(ctx.topo.num_byzantine()), VectorXd::Zero(D));
  st.trace = EligibilityTrace::zero(D);
  st.chain_rng = Rng(chain_seed);
  st.current_state = ctx.model.sample_initial(st.chain_rng);
  for (int b : ctx.topo.byzantine()) st.attackers.push_back(make_attacker_state(ctx.attack, b));
  return st;
}

namespace {

VectorXd aggregate(const SimulationContext& ctx, const InboxSnapshot& inbox, int q) {
  return ctx.aggregation == Aggregation::Mean ? mean_aggregate(inbox) : trimmed_aggregate_value(inbox, q);
}

bool out_of_bounds(const VectorXd& v) {
  for (Eigen::Index d = 0; d < v.size(); ++d)
    if (!(std::abs(v(d)) <= kDivergenceBound)) return true;
  return false;
}

}  // namespace

void run_step(SimulationState& state, const SimulationContext& ctx, const RoundObserver& observer) {
  if (state.diverged) return;
  const MrpModel& model = ctx.model;
  const NetworkTopology& topo = ctx.topo;
  const auto& honest = topo.honest();
  const auto& byz = topo.byzantine();

  // (1) snapshot of what everyone sends at step k
  std::vector<VectorXd> outgoing(static_cast<std::size_t>(topo.num_agents()));
  std::map<int, VectorXd> honest_params;
  for (std::size_t i = 0; i < honest.size(); ++i) {
    outgoing[static_cast<std::size_t>(honest[i])] = state.thetas[i];
    honest_params.emplace(honest[i], state.thetas[i]);
  }
  for (std::size_t b = 0; b < byz.size(); ++b)
    outgoing[static_cast<std::size_t>(byz[b])] =
        byzantine_message(ctx.attack, byz[b], honest_params, state.shadows[b], state.attackers[b]);
  if (observer) observer(state, outgoing);

  // (2) chain transition, (3) shared trace
  const int s = state.current_state;
  const int s_next = model.sample_next(s, state.chain_rng);
  trace_update_in_place(state.trace, ctx.td, model.phi(s));
  const double eta = ctx.schedule.at(state.k);
  const VectorXd direction = ctx.td.discount * model.phi(s_next) - model.phi(s);

  // (4) honest updates, all reading the step-k snapshot
  double reward_sum = 0.0;
  for (std::size_t i = 0; i < honest.size(); ++i) {
    const int id = honest[i];
    const double r = model.reward(static_cast<int>(i), s, s_next);
    reward_sum += r;
    const VectorXd& theta = state.thetas[i];
    const double td_error = r + direction.dot(theta);
    const InboxSnapshot inbox = collect_inbox(topo, id, outgoing);
    state.thetas[i] = aggregate(ctx, inbox, topo.trim(id)) + (eta * td_error) * state.trace.z;
  }

  // (5) Byzantine shadows follow the honest rule with the mean honest reward
  const double mean_reward = honest.empty() ? 0.0 : reward_sum / static_cast<double>(honest.size());
  for (std::size_t b = 0; b < byz.size(); ++b) {
    InboxSnapshot inbox = collect_inbox(topo, byz[b], outgoing);
    inbox.self = state.shadows[b];
    const InNeighbors& nb = topo.neighbors_of(byz[b]);
    const int q = std::min(static_cast<int>(nb.byzantine.size()), nb.total() / 2);
    const double td_error = mean_reward + direction.dot(state.shadows[b]);
    state.shadows[b] = aggregate(ctx, inbox, q) + (eta * td_error) * state.trace.z;
  }

  state.current_state = s_next;
  ++state.k;
  for (const VectorXd& t : state.thetas) {
    if (out_of_bounds(t)) {
      state.diverged = true;
      state.diverged_at = state.k;
      break;
    }
  }
}

void StepRecorder::record(const SimulationState& state, MetricsTrace& trace) const {
  trace.record(state.k, sbe(state.thetas, state.current_state), consensus_error(state.thetas),
               mean_squared_distance(state.thetas, theta_inf));
}

}  // namespace byrdtd
