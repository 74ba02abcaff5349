#pragma once

#include <vector>

#include "byrdtd/mrp.hpp"

namespace byrdtd {

struct TdParams {
  double lambda = 0.0;
  double discount = 0.95;

  void validate() const;
};

// Eligibility trace shared by every honest agent.  `step` is the index k of the
// last update; a fresh trace holds z^{-1} = 0 with step = -1.
struct EligibilityTrace {
  VectorXd z;
  long step = -1;

  static EligibilityTrace zero(int dim) { return {VectorXd::Zero(dim), -1}; }
};

// z <- gamma * lambda * z + phi(s^k)
EligibilityTrace trace_update(const EligibilityTrace& trace, const TdParams& params, const VectorXd& phi_s);
void trace_update_in_place(EligibilityTrace& trace, const TdParams& params, const Eigen::Ref<const VectorXd>& phi_s);

// g = (r + (gamma phi(s') - phi(s))^T theta) z
VectorXd local_increment(const VectorXd& theta, double reward, const VectorXd& phi_s, const VectorXd& phi_next,
                         const EligibilityTrace& trace, const TdParams& params);

struct StepMatrices {
  MatrixXd a;                  // z (gamma phi(s') - phi(s))^T
  VectorXd b_bar;              // mean of b
  std::vector<VectorXd> b;     // r_n z per agent
};

StepMatrices step_matrices(const VectorXd& phi_s, const VectorXd& phi_next, const EligibilityTrace& trace,
                           const VectorXd& rewards, const TdParams& params);

// sum_{k>=0} (gamma lambda P)^k = (I - gamma lambda P)^{-1}
MatrixXd trace_resolvent(const MatrixXd& transition, const TdParams& params);
// sum_{k>=0} lambda^k (gamma P)^{k+1} = gamma P (I - gamma lambda P)^{-1}
MatrixXd lambda_return_kernel(const MatrixXd& transition, const TdParams& params);

// Expected TD(lambda) dynamics under the stationary distribution:
//   A* = Phi^T D (U - I) Phi,   U = (1 - lambda) * lambda_return_kernel
//   b* = Phi^T D (I - gamma lambda P)^{-1} r*
// and the stationary point A* theta + b* = 0.
struct SteadyState {
  MatrixXd a_star;
  VectorXd b_star;
  VectorXd theta_inf;
  double max_sym_eigenvalue = 0.0;  // largest eigenvalue of (A* + A*^T) / 2
};

SteadyState steady_state(const MrpModel& model, const StationaryDistribution& rho, const TdParams& params);

VectorXd centralized_td_step(const VectorXd& theta, double eta, const VectorXd& rewards, const VectorXd& phi_s,
                             const VectorXd& phi_next, const EligibilityTrace& trace, const TdParams& params);

struct Sandwich {
  double f_at_fixed_point = 0.0;
  double f_min = 0.0;
  double upper = 0.0;  // (1 - gamma lambda) / (1 - gamma) * f_min
};

Sandwich sandwich_check(const MrpModel& model, const StationaryDistribution& rho, const TdParams& params);

enum class ScheduleKind { Theoretical, Experimental };

// Theoretical: eta / (k + k0) with k counted from 0.
// Experimental: c / sqrt(k + 1), i.e. c / sqrt(k) with k counted from 1.
struct StepSchedule {
  ScheduleKind kind = ScheduleKind::Experimental;
  double eta = 1.0;
  double k0 = 100.0;
  double c = 0.1;

  double at(long k) const;
  void validate() const;
};

}  // namespace byrdtd
