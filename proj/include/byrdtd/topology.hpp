#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace byrdtd {

using Edge = std::pair<int, int>;  // (from, to): `from` sends to `to`

struct InNeighbors {
  std::vector<int> honest;
  std::vector<int> byzantine;

  int total() const { return static_cast<int>(honest.size() + byzantine.size()); }
};

// Directed communication graph over agent ids 0..T-1 with an honest/Byzantine
// split and a trim count q_n for every honest agent.  Construction rejects
// malformed graphs and trims larger than half the in-neighborhood
// (N_n + B_n - 2 q_n < 0); weaker conditions are reported by check_trim().
class NetworkTopology {
 public:
  NetworkTopology(std::vector<int> honest, std::vector<int> byzantine, std::vector<Edge> edges,
                  std::map<int, int> trim);

  int num_agents() const { return static_cast<int>(honest_.size() + byzantine_.size()); }
  int num_honest() const { return static_cast<int>(honest_.size()); }
  int num_byzantine() const { return static_cast<int>(byzantine_.size()); }
  const std::vector<int>& honest() const { return honest_; }
  const std::vector<int>& byzantine() const { return byzantine_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::map<int, int>& trims() const { return trim_; }

  bool is_byzantine(int id) const;
  bool is_honest(int id) const;
  bool has_edge(int from, int to) const;
  int trim(int honest_id) const;
  // Position of an honest id inside honest(); -1 for Byzantine ids.
  int honest_index(int id) const;

  // In-neighbors of any agent (honest or Byzantine), ascending by id.
  const InNeighbors& neighbors_of(int id) const;

 private:
  std::vector<int> honest_;
  std::vector<int> byzantine_;
  std::vector<Edge> edges_;
  std::map<int, int> trim_;
  std::vector<char> byz_flag_;
  std::vector<int> honest_pos_;
  std::vector<InNeighbors> in_;
};

// Honest in-neighbors N_n and Byzantine in-neighbors B_n of honest agent n.
InNeighbors in_neighbors(const NetworkTopology& topo, int n);

struct TrimCheck {
  bool covers_byzantine = true;    // B_n <= q_n for every honest n
  bool theorem_condition = true;   // 3 q_n < N_n for every honest n
  std::vector<std::string> warnings;
};

TrimCheck check_trim(const NetworkTopology& topo);
// Throws InvalidTrim unless B_n <= q_n < N_n / 3 holds everywhere.
void require_theorem_conditions(const NetworkTopology& topo);

NetworkTopology build_complete(int n_honest, int n_byzantine, int q, bool theorem_mode = false);

enum class TrimRule {
  GlobalByzantineCount,  // q_n = B for every honest n
  LocalByzantineCount,   // q_n = B_n
};

// Every unordered pair is linked (both directions) with probability edge_prob;
// every agent is Byzantine with probability byz_prob.  q_n follows `rule`,
// clamped to floor((N_n + B_n) / 2) so the trimmed mean stays defined.
NetworkTopology build_erdos_renyi(int n_total, double edge_prob, double byz_prob, std::uint64_t seed,
                                  TrimRule rule = TrimRule::GlobalByzantineCount);

// H2B1: honest {0,1} linked both ways; Byzantine 2 <-> 0 and 3 <-> 1.
// H3B1: honest {0,1,2} complete; Byzantine 3 <-> 0, 4 <-> 1, 5 <-> 2.
NetworkTopology build_preset(const std::string& name, int q = 1);

// Honest agent i hears from honest i-1, ..., i-in_degree (mod n_honest); every
// Byzantine agent is linked both ways with every honest agent.
NetworkTopology build_circulant(int n_honest, int n_byzantine, int in_degree, int q);

struct ConnectivityReport {
  bool holds = false;
  std::optional<int> tau;        // max over reduced graphs of the best source eccentricity
  std::uint64_t subgraphs = 0;   // reduced graphs enumerated
};

// Exhaustive check over every reduced graph: drop Byzantine agents, then every
// way of dropping min(q_n, N_n) incoming honest edges at each honest n.
// Throws BudgetExceeded when the number of reduced graphs exceeds max_subgraphs.
ConnectivityReport check_assumption_connectivity(const NetworkTopology& topo, std::uint64_t max_subgraphs);

void write_topology(std::ostream& out, const NetworkTopology& topo);
NetworkTopology read_topology(std::istream& in, const std::string& source_name = "<stream>");

}  // namespace byrdtd
