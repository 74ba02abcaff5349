#include "byrdtd/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "byrdtd/error.hpp"

namespace byrdtd {

InboxSnapshot collect_inbox(const NetworkTopology& topo, int receiver, const std::vector<VectorXd>& outgoing) {
  const InNeighbors& nb = topo.neighbors_of(receiver);
  InboxSnapshot inbox;
  inbox.receiver = receiver;
  inbox.senders.reserve(static_cast<std::size_t>(nb.total()));
  inbox.senders.insert(inbox.senders.end(), nb.honest.begin(), nb.honest.end());
  inbox.senders.insert(inbox.senders.end(), nb.byzantine.begin(), nb.byzantine.end());
  std::sort(inbox.senders.begin(), inbox.senders.end());
  const VectorXd& self = outgoing.at(static_cast<std::size_t>(receiver));
  inbox.self = self;
  inbox.values.resize(self.size(), static_cast<Eigen::Index>(inbox.senders.size()));
  for (std::size_t j = 0; j < inbox.senders.size(); ++j)
    inbox.values.col(static_cast<Eigen::Index>(j)) = outgoing.at(static_cast<std::size_t>(inbox.senders[j]));
  return inbox;
}

VectorXd mean_aggregate(const InboxSnapshot& inbox) {
  VectorXd sum = inbox.self;
  if (inbox.values.cols() > 0) sum += inbox.values.rowwise().sum();
  return sum / static_cast<double>(inbox.values.cols() + 1);
}

double sanitize_message(double v, Eigen::Index d) {
  if (!std::isnan(v)) return v;
  return d % 2 == 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

namespace {

void check_trim_count(const InboxSnapshot& inbox, int q) {
  if (q < 0) throw Error(ErrorCode::InvalidTrim, "trim count must be non-negative");
  if (inbox.values.cols() < 2 * static_cast<Eigen::Index>(q))
    throw Error(ErrorCode::TooFewNeighbors, "fewer than 2q in-neighbors at agent " + std::to_string(inbox.receiver));
}

// Column order of one coordinate, ascending by (value, sender id).
void sorted_columns(const InboxSnapshot& inbox, Eigen::Index d, std::vector<int>& order, std::vector<double>& vals) {
  const int M = static_cast<int>(inbox.values.cols());
  vals.resize(static_cast<std::size_t>(M));
  order.resize(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) vals[static_cast<std::size_t>(j)] = sanitize_message(inbox.values(d, j), d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double va = vals[static_cast<std::size_t>(a)];
    const double vb = vals[static_cast<std::size_t>(b)];
    if (va != vb) return va < vb;
    return inbox.senders[static_cast<std::size_t>(a)] < inbox.senders[static_cast<std::size_t>(b)];
  });
}

}  // namespace

VectorXd trimmed_aggregate_value(const InboxSnapshot& inbox, int q) {
  check_trim_count(inbox, q);
  const Eigen::Index D = inbox.self.size();
  const int M = static_cast<int>(inbox.values.cols());
  const double denom = static_cast<double>(M - 2 * q + 1);
  VectorXd out(D);
  std::vector<int> order;
  std::vector<double> vals;
  for (Eigen::Index d = 0; d < D; ++d) {
    double sum = inbox.self(d);
    if (q == 0) {
      for (int j = 0; j < M; ++j) sum += sanitize_message(inbox.values(d, j), d);
    } else {
      sorted_columns(inbox, d, order, vals);
      for (int t = q; t < M - q; ++t) sum += vals[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])];
    }
    out(d) = sum / denom;
  }
  return out;
}

TrimResult trimmed_aggregate(const InboxSnapshot& inbox, int q) {
  check_trim_count(inbox, q);
  const Eigen::Index D = inbox.self.size();
  const int M = static_cast<int>(inbox.values.cols());
  const double denom = static_cast<double>(M - 2 * q + 1);
  TrimResult res;
  res.value.resize(D);
  res.witness.dims.resize(static_cast<std::size_t>(D));
  std::vector<int> order;
  std::vector<double> vals;
  for (Eigen::Index d = 0; d < D; ++d) {
    sorted_columns(inbox, d, order, vals);
    TrimSets& sets = res.witness.dims[static_cast<std::size_t>(d)];
    double sum = inbox.self(d);
    for (int t = 0; t < M; ++t) {
      const int col = order[static_cast<std::size_t>(t)];
      const int id = inbox.senders[static_cast<std::size_t>(col)];
      if (t < q) {
        sets.low.push_back(id);
      } else if (t >= M - q) {
        sets.high.push_back(id);
      } else {
        sets.kept.push_back(id);
        sum += vals[static_cast<std::size_t>(col)];
      }
    }
    res.value(d) = sum / denom;
  }
  return res;
}

double weight_floor(int n_honest_in, int n_byz_in, int q) {
  if (!(3 * q < n_honest_in)) return 0.0;
  const double N = n_honest_in;
  const double B = n_byz_in;
  const double Q = q;
  const double first = (N + B - 3.0 * Q) / (N - 2.0 * Q);
  const double second = (N + B - 2.0 * Q) * (Q - B) / ((N - Q) * (N - Q));
  return std::min(first, second) / (N + B - 2.0 * Q + 1.0);
}

WeightRow reconstruct_weight_row(const InboxSnapshot& inbox, int q, const std::vector<int>& honest_order,
                                 const std::unordered_set<int>& byzantine, const TrimWitness& witness) {
  check_trim_count(inbox, q);
  const Eigen::Index D = inbox.self.size();
  if (witness.dims.size() != static_cast<std::size_t>(D))
    throw Error(ErrorCode::InvalidSpec, "witness dimension does not match inbox");

  std::unordered_map<int, int> column;
  for (std::size_t i = 0; i < honest_order.size(); ++i) column[honest_order[i]] = static_cast<int>(i);
  std::unordered_map<int, int> sender_col;
  int n_byz = 0;
  for (std::size_t j = 0; j < inbox.senders.size(); ++j) {
    sender_col[inbox.senders[j]] = static_cast<int>(j);
    if (byzantine.count(inbox.senders[j])) ++n_byz;
  }
  auto col_of = [&](int id) {
    auto it = column.find(id);
    if (it == column.end()) throw Error(ErrorCode::UnknownAgent, "agent " + std::to_string(id) + " is not an honest column");
    return it->second;
  };
  const int self_col = col_of(inbox.receiver);
  const int M = static_cast<int>(inbox.senders.size());
  const double n_star = static_cast<double>(M - 2 * q + 1);
  const int N = static_cast<int>(honest_order.size());

  WeightRow row;
  row.receiver = inbox.receiver;
  row.dims.reserve(static_cast<std::size_t>(D));
  for (Eigen::Index d = 0; d < D; ++d) {
    const TrimSets& sets = witness.dims[static_cast<std::size_t>(d)];
    auto value_of = [&](int id) { return sanitize_message(inbox.values(d, sender_col.at(id)), d); };
    VectorXd w = VectorXd::Zero(N);
    w(self_col) = 1.0 / n_star;

    std::vector<int> kept_honest;
    std::vector<int> kept_byz;
    for (int id : sets.kept) (byzantine.count(id) ? kept_byz : kept_honest).push_back(id);
    const int s = q - n_byz + static_cast<int>(kept_byz.size());

    if (s <= 0 && kept_byz.empty()) {
      for (int id : kept_honest) w(col_of(id)) += 1.0 / n_star;
      row.dims.push_back(std::move(w));
      continue;
    }

    // Honest discarded values nearest the kept block: lowest of the high tail,
    // highest of the low tail.  Pair i couples the i-th nearest on each side.
    std::vector<int> upper;
    for (int id : sets.high)
      if (!byzantine.count(id)) upper.push_back(id);
    std::vector<int> lower;
    for (auto it = sets.low.rbegin(); it != sets.low.rend(); ++it)
      if (!byzantine.count(*it)) lower.push_back(*it);
    if (s <= 0 || static_cast<int>(upper.size()) < s || static_cast<int>(lower.size()) < s)
      throw Error(ErrorCode::BracketingFailed,
                  "no honest values bracket the kept block at agent " + std::to_string(inbox.receiver));

    const double c = kept_honest.empty()
                         ? 0.0
                         : std::clamp(static_cast<double>(q - n_byz) / static_cast<double>(kept_honest.size()), 0.0, 1.0);

    // Spread `mass` of a kept value v evenly over the s bracketing pairs.
    auto distribute = [&](double v, double mass) {
      for (int i = 0; i < s; ++i) {
        const int hi = upper[static_cast<std::size_t>(i)];
        const int lo = lower[static_cast<std::size_t>(i)];
        const double vh = value_of(hi);
        const double vl = value_of(lo);
        double y = 1.0;
        if (vh != vl) y = std::clamp((v - vl) / (vh - vl), 0.0, 1.0);
        w(col_of(hi)) += mass * y / s;
        w(col_of(lo)) += mass * (1.0 - y) / s;
      }
    };
    for (int id : kept_honest) {
      w(col_of(id)) += (1.0 - c) / n_star;
      if (c > 0.0) distribute(value_of(id), c / n_star);
    }
    for (int id : kept_byz) distribute(value_of(id), 1.0 / n_star);
    row.dims.push_back(std::move(w));
  }
  return row;
}

WeightRow reconstruct_weight_row(const InboxSnapshot& inbox, int q, const NetworkTopology& topo,
                                 const TrimWitness& witness) {
  std::unordered_set<int> byz(topo.byzantine().begin(), topo.byzantine().end());
  return reconstruct_weight_row(inbox, q, topo.honest(), byz, witness);
}

RowConditions check_weight_row(const VectorXd& row, int self_col, const std::vector<char>& allowed, int n_honest_in,
                               int n_byz_in, int q, double tol) {
  RowConditions rc;
  const double n_star = static_cast<double>(n_honest_in + n_byz_in - 2 * q + 1);
  const double floor = weight_floor(n_honest_in, n_byz_in, q);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    const double v = row(j);
    sum += v;
    if (!(v >= -tol)) rc.row_stochastic = false;
    if (!allowed[static_cast<std::size_t>(j)] && std::abs(v) > tol) rc.supported = false;
    if (v > 1.0 / n_star + tol) rc.upper_bounded = false;
    if (v > tol && v >= floor - tol) ++rc.entries_above_floor;
  }
  if (!(std::abs(sum - 1.0) <= tol * std::max<double>(1.0, static_cast<double>(row.size())))) rc.row_stochastic = false;
  if (!(std::abs(row(self_col) - 1.0 / n_star) <= tol)) rc.diagonal = false;
  rc.lower_bounded = rc.entries_above_floor >= n_honest_in - q + 1;
  return rc;
}

ConditionReport verify_conditions(const std::vector<MatrixXd>& matrices, const NetworkTopology& topo, int tau_budget,
                                  double tol) {
  ConditionReport rep;
  const int N = topo.num_honest();
  std::vector<std::vector<char>> allowed(static_cast<std::size_t>(N), std::vector<char>(static_cast<std::size_t>(N), 0));
  for (int i = 0; i < N; ++i) {
    const int id = topo.honest()[static_cast<std::size_t>(i)];
    allowed[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    for (int m : topo.neighbors_of(id).honest)
      allowed[static_cast<std::size_t>(i)][static_cast<std::size_t>(topo.honest_index(m))] = 1;
  }
  int worst_power = 0;
  for (const MatrixXd& Y : matrices) {
    if (Y.rows() != N || Y.cols() != N) throw Error(ErrorCode::InvalidSpec, "weight matrix has the wrong shape");
    for (int i = 0; i < N; ++i) {
      const int id = topo.honest()[static_cast<std::size_t>(i)];
      const InNeighbors& nb = topo.neighbors_of(id);
      const RowConditions rc =
          check_weight_row(Y.row(i).transpose(), i, allowed[static_cast<std::size_t>(i)],
                           static_cast<int>(nb.honest.size()), static_cast<int>(nb.byzantine.size()), topo.trim(id), tol);
      rep.c1 = rep.c1 && rc.row_stochastic;
      rep.c2 = rep.c2 && rc.diagonal;
      rep.c3 = rep.c3 && rc.supported;
      rep.c4 = rep.c4 && rc.lower_bounded;
      rep.c5 = rep.c5 && rc.upper_bounded;
    }
    int found = -1;
    MatrixXd power = Y;
    for (int t = 1; t <= tau_budget; ++t) {
      if (t > 1) power = power * Y;
      for (int j = 0; j < N && found < 0; ++j)
        if ((power.col(j).array() > 0.0).all()) found = t;
      if (found >= 0) break;
    }
    if (found < 0) {
      rep.c6 = false;
      worst_power = -1;
    } else if (worst_power >= 0) {
      worst_power = std::max(worst_power, found);
    }
  }
  rep.c6_power = rep.c6 ? worst_power : -1;
  return rep;
}

std::vector<MatrixXd> reconstruct_weight_matrices(const NetworkTopology& topo, const std::vector<VectorXd>& outgoing) {
  const int N = topo.num_honest();
  const Eigen::Index D = outgoing.at(static_cast<std::size_t>(topo.honest().front())).size();
  std::vector<MatrixXd> out(static_cast<std::size_t>(D), MatrixXd::Zero(N, N));
  std::unordered_set<int> byz(topo.byzantine().begin(), topo.byzantine().end());
  for (int i = 0; i < N; ++i) {
    const int id = topo.honest()[static_cast<std::size_t>(i)];
    const InboxSnapshot inbox = collect_inbox(topo, id, outgoing);
    const TrimResult tr = trimmed_aggregate(inbox, topo.trim(id));
    const WeightRow row = reconstruct_weight_row(inbox, topo.trim(id), topo.honest(), byz, tr.witness);
    for (Eigen::Index d = 0; d < D; ++d) out[static_cast<std::size_t>(d)].row(i) = row.dims[static_cast<std::size_t>(d)].transpose();
  }
  return out;
}

}  // namespace byrdtd
