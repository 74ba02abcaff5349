#include "byrdtd/td.hpp"

#include <cmath>

#include "byrdtd/error.hpp"

namespace byrdtd {

void TdParams::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::InvalidSpec, "lambda must lie in [0, 1]");
  if (!(discount > 0.0 && discount < 1.0)) throw Error(ErrorCode::InvalidSpec, "discount must lie in (0, 1)");
  if (!(discount * lambda < 1.0)) throw Error(ErrorCode::InvalidSpec, "gamma * lambda must be below 1");
}

void trace_update_in_place(EligibilityTrace& trace, const TdParams& params, const Eigen::Ref<const VectorXd>& phi_s) {
  trace.z = params.discount * params.lambda * trace.z + phi_s;
  ++trace.step;
}

EligibilityTrace trace_update(const EligibilityTrace& trace, const TdParams& params, const VectorXd& phi_s) {
  EligibilityTrace next = trace;
  trace_update_in_place(next, params, phi_s);
  return next;
}

VectorXd local_increment(const VectorXd& theta, double reward, const VectorXd& phi_s, const VectorXd& phi_next,
                         const EligibilityTrace& trace, const TdParams& params) {
  const double td_error = reward + (params.discount * phi_next - phi_s).dot(theta);
  return td_error * trace.z;
}

StepMatrices step_matrices(const VectorXd& phi_s, const VectorXd& phi_next, const EligibilityTrace& trace,
                           const VectorXd& rewards, const TdParams& params) {
  StepMatrices out;
  out.a = trace.z * (params.discount * phi_next - phi_s).transpose();
  out.b_bar = VectorXd::Zero(trace.z.size());
  for (Eigen::Index n = 0; n < rewards.size(); ++n) {
    out.b.push_back(rewards(n) * trace.z);
    out.b_bar += out.b.back();
  }
  if (rewards.size() > 0) out.b_bar /= static_cast<double>(rewards.size());
  return out;
}

MatrixXd trace_resolvent(const MatrixXd& transition, const TdParams& params) {
  const Eigen::Index S = transition.rows();
  const MatrixXd system = MatrixXd::Identity(S, S) - params.discount * params.lambda * transition;
  return Eigen::PartialPivLU<MatrixXd>(system).inverse();
}

MatrixXd lambda_return_kernel(const MatrixXd& transition, const TdParams& params) {
  return params.discount * transition * trace_resolvent(transition, params);
}

SteadyState steady_state(const MrpModel& model, const StationaryDistribution& rho, const TdParams& params) {
  params.validate();
  const MatrixXd& phi = model.features();
  const MatrixXd& P = model.transition();
  const Eigen::Index S = P.rows();
  const MatrixXd resolvent = trace_resolvent(P, params);
  const MatrixXd U = (1.0 - params.lambda) * params.discount * P * resolvent;
  const MatrixXd weighted_phi_t = phi.transpose() * rho.probs.asDiagonal();

  SteadyState out;
  out.a_star = weighted_phi_t * (U - MatrixXd::Identity(S, S)) * phi;
  out.b_star = weighted_phi_t * (resolvent * global_reward_vector(model));
  if (!out.a_star.allFinite() || !out.b_star.allFinite())
    throw Error(ErrorCode::SingularSystem, "steady-state matrices are not finite");

  const MatrixXd sym = 0.5 * (out.a_star + out.a_star.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  out.max_sym_eigenvalue = eig.eigenvalues().maxCoeff();
  if (!(out.max_sym_eigenvalue < 0.0))
    throw Error(ErrorCode::NotNegativeDefinite, "symmetric part of A* has a non-negative eigenvalue");

  Eigen::PartialPivLU<MatrixXd> lu(out.a_star);
  out.theta_inf = lu.solve(-out.b_star);
  if (!out.theta_inf.allFinite()) throw Error(ErrorCode::SingularSystem, "A* solve produced non-finite values");
  return out;
}

VectorXd centralized_td_step(const VectorXd& theta, double eta, const VectorXd& rewards, const VectorXd& phi_s,
                             const VectorXd& phi_next, const EligibilityTrace& trace, const TdParams& params) {
  const double slope = (params.discount * phi_next - phi_s).dot(theta);
  double td_sum = 0.0;
  for (Eigen::Index n = 0; n < rewards.size(); ++n) td_sum += rewards(n) + slope;
  return theta + (eta / static_cast<double>(rewards.size())) * td_sum * trace.z;
}

Sandwich sandwich_check(const MrpModel& model, const StationaryDistribution& rho, const TdParams& params) {
  const SteadyState steady = steady_state(model, rho, params);
  const Projection proj = weighted_projection(model, rho);
  const VectorXd values = exact_value_function(model);
  Sandwich out;
  out.f_at_fixed_point = approximation_objective(model.features(), rho.probs, values, steady.theta_inf);
  out.f_min = proj.f_min;
  out.upper = (1.0 - params.discount * params.lambda) / (1.0 - params.discount) * proj.f_min;
  return out;
}

double StepSchedule::at(long k) const {
  if (kind == ScheduleKind::Theoretical) return eta / (static_cast<double>(k) + k0);
  return c / std::sqrt(static_cast<double>(k) + 1.0);
}

void StepSchedule::validate() const {
  if (kind == ScheduleKind::Theoretical) {
    if (!(eta > 0.0) || !(k0 > 0.0)) throw Error(ErrorCode::InvalidSpec, "schedule eta and k0 must be positive");
  } else if (!(c > 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "schedule constant c must be positive");
  }
}

}  // namespace byrdtd
