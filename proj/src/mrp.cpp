#include "byrdtd/mrp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "byrdtd/error.hpp"

namespace byrdtd {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kRankTol = 1e-10;
constexpr double kFeatureNormSlack = 1e-12;

using Adjacency = std::vector<std::vector<int>>;

Adjacency support_lists(const MatrixXd& P, bool reverse) {
  const auto n = static_cast<std::size_t>(P.rows());
  Adjacency adj(n);
  for (Eigen::Index u = 0; u < P.rows(); ++u)
    for (Eigen::Index v = 0; v < P.cols(); ++v)
      if (P(u, v) > 0.0) {
        if (reverse) adj[static_cast<std::size_t>(v)].push_back(static_cast<int>(u));
        else adj[static_cast<std::size_t>(u)].push_back(static_cast<int>(v));
      }
  return adj;
}

std::vector<int> bfs_levels(const Adjacency& adj, int root) {
  std::vector<int> level(adj.size(), -1);
  std::queue<int> frontier;
  level[static_cast<std::size_t>(root)] = 0;
  frontier.push(root);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (level[static_cast<std::size_t>(v)] < 0) {
        level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
        frontier.push(v);
      }
    }
  }
  return level;
}

}  // namespace

MrpModel::MrpModel(MatrixXd transition, std::vector<MatrixXd> rewards, double discount,
                   VectorXd initial_dist, MatrixXd features)
    : transition_(std::move(transition)),
      num_agents_(static_cast<int>(rewards.size())),
      dense_(true),
      rewards_(std::move(rewards)),
      discount_(discount),
      initial_dist_(std::move(initial_dist)),
      features_(std::move(features)) {
  validate();
  build_support();
}

MrpModel::MrpModel(MatrixXd transition, int num_agents, RewardFn reward, double discount,
                   VectorXd initial_dist, MatrixXd features)
    : transition_(std::move(transition)),
      num_agents_(num_agents),
      dense_(false),
      reward_fn_(std::move(reward)),
      discount_(discount),
      initial_dist_(std::move(initial_dist)),
      features_(std::move(features)) {
  if (!reward_fn_) throw Error(ErrorCode::InvalidModel, "empty reward callback");
  validate();
  build_support();
}

void MrpModel::validate() const {
  const Eigen::Index S = transition_.rows();
  if (S < 1 || transition_.cols() != S) throw Error(ErrorCode::InvalidModel, "transition matrix must be square and non-empty");
  if (S > kMaxStates) throw Error(ErrorCode::InvalidModel, "more than 4096 states");
  if (num_agents_ < 1) throw Error(ErrorCode::InvalidModel, "at least one agent is required");
  if (!(discount_ > 0.0 && discount_ < 1.0)) throw Error(ErrorCode::InvalidModel, "discount must lie in (0, 1)");
  if (!transition_.allFinite() || (transition_.array() < 0.0).any())
    throw Error(ErrorCode::InvalidModel, "transition entries must be finite and non-negative");
  for (Eigen::Index s = 0; s < S; ++s) {
    if (std::abs(transition_.row(s).sum() - 1.0) > kRowSumTol)
      throw Error(ErrorCode::InvalidModel, "transition row " + std::to_string(s) + " does not sum to 1");
  }
  if (initial_dist_.size() != S) throw Error(ErrorCode::InvalidModel, "initial distribution has wrong length");
  if ((initial_dist_.array() < 0.0).any() || std::abs(initial_dist_.sum() - 1.0) > kRowSumTol)
    throw Error(ErrorCode::InvalidModel, "initial distribution is not a probability vector");
  if (dense_) {
    for (const auto& r : rewards_) {
      if (r.rows() != S || r.cols() != S) throw Error(ErrorCode::InvalidModel, "reward matrix has wrong shape");
      if (!r.allFinite()) throw Error(ErrorCode::InvalidModel, "rewards must be finite");
    }
  }
  if (features_.rows() != S || features_.cols() < 1)
    throw Error(ErrorCode::InvalidModel, "features must have one row per state");
  if (!features_.allFinite()) throw Error(ErrorCode::InvalidModel, "features must be finite");
  for (Eigen::Index s = 0; s < S; ++s) {
    if (features_.row(s).norm() > 1.0 + kFeatureNormSlack)
      throw Error(ErrorCode::InvalidModel, "feature row " + std::to_string(s) + " has norm above 1");
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(features_);
  qr.setThreshold(kRankTol);
  if (qr.rank() != features_.cols()) throw Error(ErrorCode::InvalidModel, "features are not full column rank");
}

void MrpModel::build_support() {
  const int S = num_states();
  support_.assign(static_cast<std::size_t>(S), {});
  cumulative_.assign(static_cast<std::size_t>(S), {});
  for (int s = 0; s < S; ++s) {
    double acc = 0.0;
    for (int t = 0; t < S; ++t) {
      const double p = transition_(s, t);
      if (p > 0.0) {
        support_[static_cast<std::size_t>(s)].push_back({t, p});
        acc += p;
        cumulative_[static_cast<std::size_t>(s)].push_back(acc);
      }
    }
  }
  double acc = 0.0;
  initial_cumulative_.clear();
  for (int s = 0; s < S; ++s) {
    acc += initial_dist_(s);
    initial_cumulative_.push_back(acc);
  }
}

int MrpModel::sample_next(int s, Rng& rng) const {
  const auto& cum = cumulative_[static_cast<std::size_t>(s)];
  const double u = uniform01(rng) * cum.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
  return support_[static_cast<std::size_t>(s)][idx].state;
}

int MrpModel::sample_initial(Rng& rng) const {
  const double u = uniform01(rng) * initial_cumulative_.back();
  const auto it = std::upper_bound(initial_cumulative_.begin(), initial_cumulative_.end(), u);
  auto idx = static_cast<std::size_t>(it - initial_cumulative_.begin());
  idx = std::min(idx, initial_cumulative_.size() - 1);
  // never start in a zero-probability state
  while (initial_dist_(static_cast<Eigen::Index>(idx)) == 0.0 && idx > 0) --idx;
  return static_cast<int>(idx);
}

VectorXd MrpModel::expected_local_reward(int agent) const {
  VectorXd r(num_states());
  for (int s = 0; s < num_states(); ++s) {
    double acc = 0.0;
    for (const auto& e : successors(s)) acc += e.prob * reward(agent, s, e.state);
    r(s) = acc;
  }
  return r;
}

std::vector<MatrixXd> MrpModel::reward_tensor() const {
  if (dense_) return rewards_;
  std::vector<MatrixXd> out;
  const int S = num_states();
  for (int n = 0; n < num_agents_; ++n) {
    MatrixXd r(S, S);
    for (int s = 0; s < S; ++s)
      for (int t = 0; t < S; ++t) r(s, t) = reward_fn_(n, s, t);
    out.push_back(std::move(r));
  }
  return out;
}

bool is_ergodic(const MatrixXd& P) {
  const Adjacency forward = support_lists(P, false);
  const auto fwd = bfs_levels(forward, 0);
  const auto bwd = bfs_levels(support_lists(P, true), 0);
  for (std::size_t v = 0; v < forward.size(); ++v) {
    if (fwd[v] < 0 || bwd[v] < 0) return false;
  }
  // period = gcd over edges u->v of level(u) + 1 - level(v)
  long period = 0;
  for (std::size_t u = 0; u < forward.size(); ++u) {
    for (int v : forward[u]) {
      period = std::gcd(period, std::labs(static_cast<long>(fwd[u]) + 1 - fwd[static_cast<std::size_t>(v)]));
    }
  }
  return period == 1;
}

StationaryDistribution stationary_distribution(const MrpModel& model) {
  const MatrixXd& P = model.transition();
  if (!is_ergodic(P)) throw Error(ErrorCode::NotErgodic, "transition chain is reducible or periodic");
  const Eigen::Index S = P.rows();
  MatrixXd system(S + 1, S);
  system.topRows(S) = P.transpose() - MatrixXd::Identity(S, S);
  system.row(S).setOnes();
  VectorXd rhs = VectorXd::Zero(S + 1);
  rhs(S) = 1.0;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(system);
  qr.setThreshold(kRankTol);
  if (qr.rank() != S) throw Error(ErrorCode::SingularSystem, "stationary system is rank deficient");
  StationaryDistribution out{qr.solve(rhs)};
  if (!out.probs.allFinite()) throw Error(ErrorCode::SingularSystem, "stationary solve produced non-finite values");
  return out;
}

VectorXd global_reward_vector(const MrpModel& model) {
  VectorXd r = VectorXd::Zero(model.num_states());
  for (int s = 0; s < model.num_states(); ++s) {
    double acc = 0.0;
    for (const auto& e : model.successors(s)) {
      double sum = 0.0;
      for (int n = 0; n < model.num_agents(); ++n) sum += model.reward(n, s, e.state);
      acc += e.prob * sum;
    }
    r(s) = acc / model.num_agents();
  }
  return r;
}

VectorXd exact_value_function(const MrpModel& model) {
  const Eigen::Index S = model.num_states();
  const MatrixXd system = MatrixXd::Identity(S, S) - model.discount() * model.transition();
  Eigen::PartialPivLU<MatrixXd> lu(system);
  VectorXd v = lu.solve(global_reward_vector(model));
  if (!v.allFinite()) throw Error(ErrorCode::SingularSystem, "Bellman solve produced non-finite values");
  return v;
}

double approximation_objective(const MatrixXd& features, const VectorXd& rho, const VectorXd& values,
                               const VectorXd& theta) {
  const VectorXd err = features * theta - values;
  return 0.5 * (rho.array() * err.array().square()).sum();
}

double approximation_objective(const MrpModel& model, const StationaryDistribution& rho,
                               const VectorXd& theta) {
  return approximation_objective(model.features(), rho.probs, exact_value_function(model), theta);
}

Projection weighted_projection(const MrpModel& model, const StationaryDistribution& rho) {
  const MatrixXd& phi = model.features();
  const VectorXd values = exact_value_function(model);
  const MatrixXd gram = phi.transpose() * rho.probs.asDiagonal() * phi;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(gram);
  qr.setThreshold(kRankTol);
  if (qr.rank() != gram.cols()) throw Error(ErrorCode::SingularSystem, "weighted Gram matrix is rank deficient");
  Projection out;
  out.theta_star = qr.solve(phi.transpose() * (rho.probs.asDiagonal() * values));
  out.f_min = approximation_objective(phi, rho.probs, values, out.theta_star);
  return out;
}

}  // namespace byrdtd
