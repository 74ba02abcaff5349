#pragma once

#include <unordered_set>
#include <vector>

#include "byrdtd/mrp.hpp"
#include "byrdtd/topology.hpp"

namespace byrdtd {

// Everything honest agent `receiver` sees in one round.  Column j of `values`
// is the message from senders[j]; senders are ascending.
struct InboxSnapshot {
  int receiver = -1;
  std::vector<int> senders;
  MatrixXd values;  // D x M
  VectorXd self;    // D
};

// Gathers the inbox of `receiver` (any agent, so Byzantine shadows can reuse it);
// `outgoing[id]` is what agent id sends.
InboxSnapshot collect_inbox(const NetworkTopology& topo, int receiver, const std::vector<VectorXd>& outgoing);

VectorXd mean_aggregate(const InboxSnapshot& inbox);

struct TrimSets {
  std::vector<int> low;   // the q smallest, ascending by (value, id)
  std::vector<int> high;  // the q largest, ascending by (value, id)
  std::vector<int> kept;  // the rest, ascending by (value, id)
};

struct TrimWitness {
  std::vector<TrimSets> dims;
};

struct TrimResult {
  VectorXd value;
  TrimWitness witness;
};

// Non-finite messages are ordered before sorting: NaN counts as +inf in even
// coordinates and -inf in odd ones, so they land in a discarded tail.
double sanitize_message(double v, Eigen::Index d);

// Per coordinate: drop the q smallest and q largest neighbor values (ties by
// ascending sender id), then average the rest together with self.
TrimResult trimmed_aggregate(const InboxSnapshot& inbox, int q);
// Same value without building the witness.
VectorXd trimmed_aggregate_value(const InboxSnapshot& inbox, int q);

// Row of Y for `inbox.receiver`, one vector per coordinate, indexed by
// position in `honest_order`.
struct WeightRow {
  int receiver = -1;
  std::vector<VectorXd> dims;
};

WeightRow reconstruct_weight_row(const InboxSnapshot& inbox, int q, const std::vector<int>& honest_order,
                                 const std::unordered_set<int>& byzantine, const TrimWitness& witness);
WeightRow reconstruct_weight_row(const InboxSnapshot& inbox, int q, const NetworkTopology& topo,
                                 const TrimWitness& witness);

// Lower bound on the guaranteed-positive entries of a row; 0 unless 3q < N_n.
double weight_floor(int n_honest_in, int n_byz_in, int q);

struct RowConditions {
  bool row_stochastic = true;   // c1
  bool diagonal = true;         // c2
  bool supported = true;        // c3: zero outside self and honest in-neighbors
  bool lower_bounded = true;    // c4
  bool upper_bounded = true;    // c5
  int entries_above_floor = 0;
};

// `allowed[j]` marks the honest columns the row may use (self included).
RowConditions check_weight_row(const VectorXd& row, int self_col, const std::vector<char>& allowed,
                               int n_honest_in, int n_byz_in, int q, double tol = 1e-12);

struct ConditionReport {
  bool c1 = true;
  bool c2 = true;
  bool c3 = true;
  bool c4 = true;
  bool c5 = true;
  bool c6 = true;
  int c6_power = -1;  // smallest power with a positive column, -1 if none within budget
};

// `matrices[d]` is the N x N honest matrix of coordinate d, rows/columns in
// topo.honest() order.
ConditionReport verify_conditions(const std::vector<MatrixXd>& matrices, const NetworkTopology& topo, int tau_budget,
                                  double tol = 1e-12);

// Assembles Y(d) for every d from one synchronous round.
std::vector<MatrixXd> reconstruct_weight_matrices(const NetworkTopology& topo, const std::vector<VectorXd>& outgoing);

}  // namespace byrdtd
