#include "byrdtd/environments.hpp"

#include <cmath>
#include <random>

#include "byrdtd/error.hpp"

namespace byrdtd {

namespace {

enum Stream : std::uint64_t { kTransition = 1, kFeatures = 2, kBaseReward = 3, kPerturbation = 4, kLandmarks = 5 };

MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = standard_normal(rng);
  return m;
}

// Scales every row by the same factor so that the largest row norm is 1.
void cap_row_norms(MatrixXd& features) {
  const double max_norm = features.rowwise().norm().maxCoeff();
  if (max_norm > 0.0) features /= max_norm;
}

bool full_column_rank(const MatrixXd& m) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(m);
  qr.setThreshold(1e-10);
  return qr.rank() == m.cols();
}

}  // namespace

MrpModel build_random_mrp(const RandomMrpSpec& spec) {
  const int S = spec.num_states;
  const int N = spec.num_agents;
  const int D = spec.feature_dim;
  if (S < 1 || S > kMaxStates) throw Error(ErrorCode::InvalidSpec, "num_states out of range");
  if (N < 1) throw Error(ErrorCode::InvalidSpec, "num_agents must be positive");
  if (D < 1 || D > S) throw Error(ErrorCode::InvalidSpec, "feature_dim must lie in [1, num_states]");
  if (!(spec.reward_heterogeneity >= 0.0)) throw Error(ErrorCode::InvalidSpec, "reward_heterogeneity must be >= 0");
  if (!(spec.discount > 0.0 && spec.discount < 1.0)) throw Error(ErrorCode::InvalidSpec, "discount must lie in (0, 1)");

  // Dirichlet(1, ..., 1) rows: normalized Exp(1) draws, strictly positive.
  Rng prng(derive_seed(spec.seed, kTransition));
  MatrixXd P(S, S);
  for (int s = 0; s < S; ++s) {
    for (int t = 0; t < S; ++t) P(s, t) = -std::log1p(-uniform01(prng)) + 1e-6;
    P.row(s) /= P.row(s).sum();
  }

  Rng frng(derive_seed(spec.seed, kFeatures));
  MatrixXd features = gaussian_matrix(S, D, frng);
  cap_row_norms(features);
  if (!full_column_rank(features)) throw Error(ErrorCode::InvalidSpec, "generated features are rank deficient");

  Rng brng(derive_seed(spec.seed, kBaseReward));
  MatrixXd base(S, S);
  if (spec.realizable) {
    VectorXd w(D);
    for (int d = 0; d < D; ++d) w(d) = spec.reward_scale * standard_normal(brng);
    const VectorXd values = features * w;
    const VectorXd shared = values - spec.discount * (P * values);
    base = shared.replicate(1, S);
  } else {
    for (int s = 0; s < S; ++s)
      for (int t = 0; t < S; ++t) base(s, t) = spec.reward_scale * uniform01(brng);
  }

  // Zero-mean perturbation pattern across agents, rescaled so that the
  // largest per-transition variance equals heterogeneity^2.
  Rng nrng(derive_seed(spec.seed, kPerturbation));
  std::vector<MatrixXd> pattern;
  for (int n = 0; n < N; ++n) pattern.push_back(gaussian_matrix(S, S, nrng));
  MatrixXd mean = MatrixXd::Zero(S, S);
  for (const auto& p : pattern) mean += p;
  mean /= N;
  MatrixXd variance = MatrixXd::Zero(S, S);
  for (auto& p : pattern) {
    p -= mean;
    variance += p.cwiseAbs2();
  }
  variance /= N;
  const double max_var = variance.maxCoeff();
  const double scale = (max_var > 0.0 && spec.reward_heterogeneity > 0.0)
                           ? spec.reward_heterogeneity / std::sqrt(max_var)
                           : 0.0;

  std::vector<MatrixXd> rewards;
  rewards.reserve(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) {
    if (scale == 0.0) rewards.push_back(base);
    else rewards.push_back(base + scale * pattern[static_cast<std::size_t>(n)]);
  }

  return MrpModel(std::move(P), std::move(rewards), spec.discount, VectorXd::Constant(S, 1.0 / S),
                  std::move(features));
}

std::vector<int> decode_grid_state(int state, int grid_side, int num_movers) {
  const int cells = grid_side * grid_side;
  std::vector<int> out(static_cast<std::size_t>(num_movers));
  for (int m = 0; m < num_movers; ++m) {
    out[static_cast<std::size_t>(m)] = state % cells;
    state /= cells;
  }
  return out;
}

int encode_grid_state(const std::vector<int>& cells_per_mover, int grid_side) {
  const int cells = grid_side * grid_side;
  int state = 0;
  for (auto it = cells_per_mover.rbegin(); it != cells_per_mover.rend(); ++it) state = state * cells + *it;
  return state;
}

GridNavLayout grid_navigation_layout(const GridNavSpec& spec) {
  GridNavLayout layout{spec.grid_side, spec.num_movers, {}};
  Rng lrng(derive_seed(spec.seed, kLandmarks));
  const int cells = spec.grid_side * spec.grid_side;
  for (int n = 0; n < spec.num_agents; ++n)
    layout.landmarks.push_back(static_cast<int>(uniform_index(lrng, static_cast<std::size_t>(cells))));
  return layout;
}

MrpModel build_grid_navigation(const GridNavSpec& spec) {
  const int G = spec.grid_side;
  const int M = spec.num_movers;
  if (G < 1) throw Error(ErrorCode::InvalidSpec, "grid_side must be positive");
  if (M < 1 || M > 2) throw Error(ErrorCode::InvalidSpec, "num_movers must be 1 or 2");
  if (spec.num_agents < 1) throw Error(ErrorCode::InvalidSpec, "num_agents must be positive");
  if (!(spec.discount > 0.0 && spec.discount < 1.0)) throw Error(ErrorCode::InvalidSpec, "discount must lie in (0, 1)");
  const int cells = G * G;
  long joint = 1;
  for (int m = 0; m < M; ++m) joint *= cells;
  if (joint > kMaxStates) throw Error(ErrorCode::InvalidSpec, "joint state count exceeds 4096");
  const int S = static_cast<int>(joint);
  if (spec.feature_dim < 1 || spec.feature_dim > S) throw Error(ErrorCode::InvalidSpec, "feature_dim out of range");

  // Single-mover kernel: each of the four moves has probability 1/4, blocked moves stay.
  MatrixXd kernel = MatrixXd::Zero(cells, cells);
  const int dr[4] = {-1, 0, 0, 1};
  const int dc[4] = {0, -1, 1, 0};
  for (int cell = 0; cell < cells; ++cell) {
    const int r = cell / G;
    const int c = cell % G;
    for (int a = 0; a < 4; ++a) {
      const int nr = r + dr[a];
      const int nc = c + dc[a];
      const int target = (nr < 0 || nr >= G || nc < 0 || nc >= G) ? cell : nr * G + nc;
      kernel(cell, target) += 0.25;
    }
  }

  MatrixXd P(S, S);
  for (int s = 0; s < S; ++s) {
    const auto from = decode_grid_state(s, G, M);
    for (int t = 0; t < S; ++t) {
      const auto to = decode_grid_state(t, G, M);
      double p = 1.0;
      for (int m = 0; m < M; ++m) p *= kernel(from[static_cast<std::size_t>(m)], to[static_cast<std::size_t>(m)]);
      P(s, t) = p;
    }
  }

  // One-hot mover positions through a fixed random projection.
  Rng frng(derive_seed(spec.seed, kFeatures));
  const MatrixXd projection = gaussian_matrix(M * cells, spec.feature_dim, frng);
  MatrixXd features = MatrixXd::Zero(S, spec.feature_dim);
  for (int s = 0; s < S; ++s) {
    const auto pos = decode_grid_state(s, G, M);
    for (int m = 0; m < M; ++m) features.row(s) += projection.row(m * cells + pos[static_cast<std::size_t>(m)]);
  }
  cap_row_norms(features);
  if (!full_column_rank(features))
    throw Error(ErrorCode::InvalidSpec, "feature_dim too large for the grid's position encoding");

  const GridNavLayout layout = grid_navigation_layout(spec);
  const double penalty = spec.collision_penalty;
  RewardFn reward = [layout, penalty](int agent, int /*s*/, int s_next) {
    const auto pos = decode_grid_state(s_next, layout.grid_side, layout.num_movers);
    const int cell = pos[static_cast<std::size_t>(agent % layout.num_movers)];
    const int target = layout.landmarks[static_cast<std::size_t>(agent)];
    const double dr = cell / layout.grid_side - target / layout.grid_side;
    const double dc = cell % layout.grid_side - target % layout.grid_side;
    double r = -std::sqrt(dr * dr + dc * dc);
    if (layout.num_movers == 2 && pos[0] == pos[1]) r -= penalty;
    return r;
  };

  return MrpModel(std::move(P), spec.num_agents, std::move(reward), spec.discount, VectorXd::Constant(S, 1.0 / S),
                  std::move(features));
}

}  // namespace byrdtd
