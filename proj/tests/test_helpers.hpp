#pragma once

#include <cmath>
#include <vector>

#include "byrdtd/environments.hpp"
#include "byrdtd/mrp.hpp"
#include "byrdtd/rng.hpp"

namespace testutil {

using byrdtd::MatrixXd;
using byrdtd::VectorXd;

inline MatrixXd random_stochastic(int S, byrdtd::Rng& rng, double zero_prob = 0.0) {
  MatrixXd P(S, S);
  for (int s = 0; s < S; ++s) {
    for (int t = 0; t < S; ++t) P(s, t) = byrdtd::uniform01(rng) < zero_prob ? 0.0 : byrdtd::uniform01(rng) + 0.05;
    P(s, (s + 1) % S) += 0.1;  // keeps the chain irreducible
    P(s, s) += 0.1;            // and aperiodic
    P.row(s) /= P.row(s).sum();
  }
  return P;
}

// Dense random model with explicit reward tensors.
inline byrdtd::MrpModel random_dense_model(int S, int N, int D, std::uint64_t seed, double gamma = 0.9) {
  byrdtd::Rng rng(seed);
  MatrixXd P = random_stochastic(S, rng);
  std::vector<MatrixXd> rewards;
  for (int n = 0; n < N; ++n) {
    MatrixXd r(S, S);
    for (int i = 0; i < S; ++i)
      for (int j = 0; j < S; ++j) r(i, j) = 2.0 * byrdtd::uniform01(rng) - 0.5;
    rewards.push_back(r);
  }
  MatrixXd phi(S, D);
  for (int i = 0; i < S; ++i)
    for (int j = 0; j < D; ++j) phi(i, j) = byrdtd::standard_normal(rng);
  phi /= phi.rowwise().norm().maxCoeff();
  VectorXd init = VectorXd::Constant(S, 1.0 / S);
  return byrdtd::MrpModel(P, rewards, gamma, init, phi);
}

// Power iteration for the stationary distribution, independent of the QR solve.
inline VectorXd power_stationary(const MatrixXd& P, int iters = 20000) {
  VectorXd v = VectorXd::Constant(P.rows(), 1.0 / P.rows());
  for (int i = 0; i < iters; ++i) v = (P.transpose() * v).eval();
  return v / v.sum();
}

}  // namespace testutil
