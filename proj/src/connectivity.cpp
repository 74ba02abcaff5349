#include <algorithm>
#include <array>
#include <bit>
#include <limits>

#include "byrdtd/error.hpp"
#include "byrdtd/topology.hpp"

namespace byrdtd {

namespace {

using Mask = std::uint64_t;
constexpr int kUnreachable = std::numeric_limits<int>::max();

// All sub-masks of `pool` obtained by dropping exactly `drop` set bits.
std::vector<Mask> kept_subsets(Mask pool, int drop) {
  std::vector<int> bits;
  for (Mask m = pool; m; m &= m - 1) bits.push_back(std::countr_zero(m));
  const int n = static_cast<int>(bits.size());
  std::vector<Mask> out;
  std::vector<char> removed(static_cast<std::size_t>(n), 0);
  std::fill(removed.begin(), removed.begin() + std::min(drop, n), 1);
  // prev_permutation over a sorted-descending selector enumerates every combination once
  do {
    Mask kept = pool;
    for (int i = 0; i < n; ++i)
      if (removed[static_cast<std::size_t>(i)]) kept &= ~(Mask{1} << bits[static_cast<std::size_t>(i)]);
    out.push_back(kept);
  } while (std::prev_permutation(removed.begin(), removed.end()));
  return out;
}

class ReducedGraphSearch {
 public:
  ReducedGraphSearch(int n, std::vector<std::vector<Mask>> choices)
      : n_(n), all_(n == 64 ? ~Mask{0} : (Mask{1} << n) - 1), choices_(std::move(choices)) {
    out_.fill(0);
  }

  ConnectivityReport run() {
    ConnectivityReport report;
    holds_ = true;
    tau_ = 0;
    count_ = 0;
    descend(0);
    report.holds = holds_;
    report.subgraphs = count_;
    if (holds_) report.tau = tau_;
    return report;
  }

 private:
  // Assigns the kept in-neighborhood of node v, recording the edges in out_.
  void descend(int v) {
    if (!holds_) return;
    if (v == n_) {
      evaluate();
      return;
    }
    for (Mask kept : choices_[static_cast<std::size_t>(v)]) {
      const Mask bit = Mask{1} << v;
      for (Mask m = kept; m; m &= m - 1) out_[static_cast<std::size_t>(std::countr_zero(m))] |= bit;
      descend(v + 1);
      for (Mask m = kept; m; m &= m - 1) out_[static_cast<std::size_t>(std::countr_zero(m))] &= ~bit;
      if (!holds_) return;
    }
  }

  void evaluate() {
    ++count_;
    int best = kUnreachable;
    for (int s = 0; s < n_ && best > tau_; ++s) {
      best = std::min(best, eccentricity(s, best));
    }
    if (best == kUnreachable) holds_ = false;
    else tau_ = std::max(tau_, best);
  }

  // BFS depth needed for s to reach every node; gives up once depth reaches cap.
  int eccentricity(int s, int cap) const {
    Mask visited = Mask{1} << s;
    Mask frontier = visited;
    int depth = 0;
    while (visited != all_) {
      if (depth + 1 >= cap) return kUnreachable;
      Mask next = 0;
      for (Mask m = frontier; m; m &= m - 1) next |= out_[static_cast<std::size_t>(std::countr_zero(m))];
      next &= ~visited;
      if (!next) return kUnreachable;
      visited |= next;
      frontier = next;
      ++depth;
    }
    return depth;
  }

  int n_;
  Mask all_;
  std::vector<std::vector<Mask>> choices_;
  std::array<Mask, 64> out_{};
  bool holds_ = true;
  int tau_ = 0;
  std::uint64_t count_ = 0;
};

}  // namespace

ConnectivityReport check_assumption_connectivity(const NetworkTopology& topo, std::uint64_t max_subgraphs) {
  const int n = topo.num_honest();
  if (n > 64) throw Error(ErrorCode::BudgetExceeded, "connectivity check supports at most 64 honest agents");
  std::vector<std::vector<Mask>> choices;
  long double total = 1.0L;
  for (int id : topo.honest()) {
    Mask pool = 0;
    for (int m : topo.neighbors_of(id).honest) pool |= Mask{1} << topo.honest_index(m);
    const int drop = std::min(topo.trim(id), std::popcount(pool));
    choices.push_back(kept_subsets(pool, drop));
    total *= static_cast<long double>(choices.back().size());
  }
  if (total > static_cast<long double>(max_subgraphs))
    throw Error(ErrorCode::BudgetExceeded, "reduced-graph count exceeds the enumeration budget");
  return ReducedGraphSearch(n, std::move(choices)).run();
}

}  // namespace byrdtd
