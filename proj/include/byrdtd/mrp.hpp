#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "byrdtd/rng.hpp"

namespace byrdtd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr int kMaxStates = 4096;

// Reward of `agent` on the transition s -> s_next.
using RewardFn = std::function<double(int agent, int s, int s_next)>;

struct SuccessorEntry {
  int state;
  double prob;
};

// Finite Markov reward process shared by all honest agents: transition kernel,
// per-agent rewards R_n(s, s'), discount, initial distribution, and the linear
// features (row s of `features` is phi(s)).  Immutable after construction.
class MrpModel {
 public:
  MrpModel(MatrixXd transition, std::vector<MatrixXd> rewards, double discount,
           VectorXd initial_dist, MatrixXd features);

  // Callback form for generated environments; avoids an N x |S| x |S| tensor.
  MrpModel(MatrixXd transition, int num_agents, RewardFn reward, double discount,
           VectorXd initial_dist, MatrixXd features);

  int num_states() const { return static_cast<int>(transition_.rows()); }
  int num_agents() const { return num_agents_; }
  int feature_dim() const { return static_cast<int>(features_.cols()); }
  double discount() const { return discount_; }

  const MatrixXd& transition() const { return transition_; }
  const VectorXd& initial_dist() const { return initial_dist_; }
  const MatrixXd& features() const { return features_; }
  auto phi(int s) const { return features_.row(s).transpose(); }

  double reward(int agent, int s, int s_next) const {
    return dense_ ? rewards_[static_cast<std::size_t>(agent)](s, s_next) : reward_fn_(agent, s, s_next);
  }
  bool has_dense_rewards() const { return dense_; }

  // Nonzero entries of row s of the transition matrix, ascending by state.
  const std::vector<SuccessorEntry>& successors(int s) const { return support_[static_cast<std::size_t>(s)]; }

  int sample_next(int s, Rng& rng) const;
  int sample_initial(Rng& rng) const;

  // r_n(s) = sum_{s'} P(s, s') R_n(s, s')
  VectorXd expected_local_reward(int agent) const;

  // Dense copy of the reward tensor (materialized for callback models).
  std::vector<MatrixXd> reward_tensor() const;

 private:
  void validate() const;
  void build_support();

  MatrixXd transition_;
  int num_agents_ = 0;
  bool dense_ = true;
  std::vector<MatrixXd> rewards_;
  RewardFn reward_fn_;
  double discount_ = 0.95;
  VectorXd initial_dist_;
  MatrixXd features_;
  std::vector<std::vector<SuccessorEntry>> support_;
  std::vector<std::vector<double>> cumulative_;
  std::vector<double> initial_cumulative_;
};

struct StationaryDistribution {
  VectorXd probs;
};

// Irreducible (support graph strongly connected) and aperiodic (gcd of cycle lengths 1).
bool is_ergodic(const MatrixXd& transition);

StationaryDistribution stationary_distribution(const MrpModel& model);

// r*(s) = (1/N) sum_n sum_{s'} P(s, s') R_n(s, s')
VectorXd global_reward_vector(const MrpModel& model);

// Solves (I - gamma P) V = r*.
VectorXd exact_value_function(const MrpModel& model);

double approximation_objective(const MrpModel& model, const StationaryDistribution& rho,
                               const VectorXd& theta);
// Same objective with V supplied, for callers evaluating many thetas.
double approximation_objective(const MatrixXd& features, const VectorXd& rho, const VectorXd& values,
                               const VectorXd& theta);

struct Projection {
  VectorXd theta_star;
  double f_min = 0.0;
};

// argmin of the rho-weighted least-squares error via the normal equations.
Projection weighted_projection(const MrpModel& model, const StationaryDistribution& rho);

// Structured-text model file; doubles are written with 17 significant digits.
void write_model(std::ostream& out, const MrpModel& model);
MrpModel read_model(std::istream& in, const std::string& source_name = "<stream>");
void save_model(const std::string& path, const MrpModel& model);
MrpModel load_model(const std::string& path);

}  // namespace byrdtd
