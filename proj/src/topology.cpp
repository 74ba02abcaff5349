#include "byrdtd/topology.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "byrdtd/error.hpp"
#include "byrdtd/rng.hpp"

namespace byrdtd {

NetworkTopology::NetworkTopology(std::vector<int> honest, std::vector<int> byzantine, std::vector<Edge> edges,
                                 std::map<int, int> trim)
    : honest_(std::move(honest)), byzantine_(std::move(byzantine)), edges_(std::move(edges)), trim_(std::move(trim)) {
  std::sort(honest_.begin(), honest_.end());
  std::sort(byzantine_.begin(), byzantine_.end());
  if (honest_.empty()) throw Error(ErrorCode::NoHonestAgents, "topology has no honest agents");
  const int total = num_agents();
  byz_flag_.assign(static_cast<std::size_t>(total), 2);
  for (int id : honest_) {
    if (id < 0 || id >= total || byz_flag_[static_cast<std::size_t>(id)] != 2)
      throw Error(ErrorCode::InvalidSpec, "agent ids must be exactly 0..T-1 with no repeats");
    byz_flag_[static_cast<std::size_t>(id)] = 0;
  }
  for (int id : byzantine_) {
    if (id < 0 || id >= total || byz_flag_[static_cast<std::size_t>(id)] != 2)
      throw Error(ErrorCode::InvalidSpec, "honest and Byzantine sets must partition 0..T-1");
    byz_flag_[static_cast<std::size_t>(id)] = 1;
  }
  honest_pos_.assign(static_cast<std::size_t>(total), -1);
  for (std::size_t i = 0; i < honest_.size(); ++i) honest_pos_[static_cast<std::size_t>(honest_[i])] = static_cast<int>(i);

  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  in_.assign(static_cast<std::size_t>(total), {});
  for (const auto& [from, to] : edges_) {
    if (from < 0 || from >= total || to < 0 || to >= total) throw Error(ErrorCode::UnknownAgent, "edge references unknown agent");
    if (from == to) throw Error(ErrorCode::InvalidSpec, "self-links are not allowed");
    auto& nb = in_[static_cast<std::size_t>(to)];
    (is_byzantine(from) ? nb.byzantine : nb.honest).push_back(from);
  }

  for (const auto& [id, q] : trim_) {
    if (id < 0 || id >= total || !is_honest(id)) throw Error(ErrorCode::UnknownAgent, "trim given for a non-honest agent");
    if (q < 0) throw Error(ErrorCode::InvalidTrim, "trim counts must be non-negative");
  }
  for (int id : honest_) {
    if (!trim_.count(id)) trim_[id] = 0;
    const auto& nb = in_[static_cast<std::size_t>(id)];
    if (nb.total() - 2 * trim_[id] < 0)
      throw Error(ErrorCode::InvalidTrim, "agent " + std::to_string(id) + " trims more values than it receives");
  }
}

bool NetworkTopology::is_byzantine(int id) const {
  return id >= 0 && id < num_agents() && byz_flag_[static_cast<std::size_t>(id)] == 1;
}

bool NetworkTopology::is_honest(int id) const {
  return id >= 0 && id < num_agents() && byz_flag_[static_cast<std::size_t>(id)] == 0;
}

bool NetworkTopology::has_edge(int from, int to) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
}

int NetworkTopology::trim(int honest_id) const {
  const auto it = trim_.find(honest_id);
  if (it == trim_.end()) throw Error(ErrorCode::UnknownAgent, "no honest agent " + std::to_string(honest_id));
  return it->second;
}

int NetworkTopology::honest_index(int id) const {
  if (id < 0 || id >= num_agents()) return -1;
  return honest_pos_[static_cast<std::size_t>(id)];
}

const InNeighbors& NetworkTopology::neighbors_of(int id) const {
  if (id < 0 || id >= num_agents()) throw Error(ErrorCode::UnknownAgent, "no agent " + std::to_string(id));
  return in_[static_cast<std::size_t>(id)];
}

InNeighbors in_neighbors(const NetworkTopology& topo, int n) {
  if (!topo.is_honest(n)) throw Error(ErrorCode::UnknownAgent, "no honest agent " + std::to_string(n));
  return topo.neighbors_of(n);
}

TrimCheck check_trim(const NetworkTopology& topo) {
  TrimCheck out;
  for (int n : topo.honest()) {
    const auto& nb = topo.neighbors_of(n);
    const int q = topo.trim(n);
    const int Nn = static_cast<int>(nb.honest.size());
    const int Bn = static_cast<int>(nb.byzantine.size());
    if (Bn > q) {
      out.covers_byzantine = false;
      out.warnings.push_back("agent " + std::to_string(n) + ": B_n=" + std::to_string(Bn) + " exceeds q_n=" +
                             std::to_string(q));
    }
    if (!(3 * q < Nn)) {
      out.theorem_condition = false;
      out.warnings.push_back("agent " + std::to_string(n) + ": 3 q_n=" + std::to_string(3 * q) +
                             " is not below N_n=" + std::to_string(Nn));
    }
  }
  return out;
}

void require_theorem_conditions(const NetworkTopology& topo) {
  const TrimCheck check = check_trim(topo);
  if (!check.covers_byzantine || !check.theorem_condition)
    throw Error(ErrorCode::InvalidTrim, check.warnings.front());
}

namespace {

std::map<int, int> uniform_trim(const std::vector<int>& honest, int q) {
  std::map<int, int> trim;
  for (int id : honest) trim[id] = q;
  return trim;
}

std::vector<int> id_range(int begin, int end) {
  std::vector<int> ids;
  for (int i = begin; i < end; ++i) ids.push_back(i);
  return ids;
}

}  // namespace

NetworkTopology build_complete(int n_honest, int n_byzantine, int q, bool theorem_mode) {
  if (n_honest < 1 || n_byzantine < 0 || q < 0) throw Error(ErrorCode::InvalidSpec, "invalid complete-graph sizes");
  const int total = n_honest + n_byzantine;
  std::vector<Edge> edges;
  for (int a = 0; a < total; ++a)
    for (int b = 0; b < total; ++b)
      if (a != b) edges.emplace_back(a, b);
  auto honest = id_range(0, n_honest);
  NetworkTopology topo(honest, id_range(n_honest, total), std::move(edges), uniform_trim(honest, q));
  if (theorem_mode) require_theorem_conditions(topo);
  return topo;
}

NetworkTopology build_erdos_renyi(int n_total, double edge_prob, double byz_prob, std::uint64_t seed, TrimRule rule) {
  if (n_total < 1) throw Error(ErrorCode::InvalidSpec, "graph needs at least one agent");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0) || !(byz_prob >= 0.0 && byz_prob <= 1.0))
    throw Error(ErrorCode::InvalidSpec, "probabilities must lie in [0, 1]");
  Rng rng(seed);
  std::vector<int> honest, byzantine;
  for (int i = 0; i < n_total; ++i) (uniform01(rng) < byz_prob ? byzantine : honest).push_back(i);
  std::vector<Edge> edges;
  for (int a = 0; a < n_total; ++a) {
    for (int b = a + 1; b < n_total; ++b) {
      if (uniform01(rng) < edge_prob) {
        edges.emplace_back(a, b);
        edges.emplace_back(b, a);
      }
    }
  }
  // Build once without trims to read neighborhoods, then assign q_n.
  const NetworkTopology bare(honest, byzantine, edges, {});
  std::map<int, int> trim;
  for (int n : bare.honest()) {
    const auto& nb = bare.neighbors_of(n);
    const int wanted = rule == TrimRule::GlobalByzantineCount ? static_cast<int>(byzantine.size())
                                                              : static_cast<int>(nb.byzantine.size());
    trim[n] = std::min(wanted, nb.total() / 2);
  }
  return NetworkTopology(std::move(honest), std::move(byzantine), std::move(edges), std::move(trim));
}

NetworkTopology build_preset(const std::string& name, int q) {
  int n_honest = 0;
  if (name == "H2B1") n_honest = 2;
  else if (name == "H3B1") n_honest = 3;
  else throw Error(ErrorCode::UnknownPreset, "unknown preset '" + name + "'");
  std::vector<Edge> edges;
  for (int a = 0; a < n_honest; ++a)
    for (int b = 0; b < n_honest; ++b)
      if (a != b) edges.emplace_back(a, b);
  for (int a = 0; a < n_honest; ++a) {
    const int byz = n_honest + a;
    edges.emplace_back(byz, a);
    edges.emplace_back(a, byz);
  }
  auto honest = id_range(0, n_honest);
  return NetworkTopology(honest, id_range(n_honest, 2 * n_honest), std::move(edges), uniform_trim(honest, q));
}

NetworkTopology build_circulant(int n_honest, int n_byzantine, int in_degree, int q) {
  if (n_honest < 1 || n_byzantine < 0 || in_degree < 0 || in_degree > n_honest - 1)
    throw Error(ErrorCode::InvalidSpec, "invalid circulant-graph sizes");
  std::vector<Edge> edges;
  for (int i = 0; i < n_honest; ++i)
    for (int d = 1; d <= in_degree; ++d) edges.emplace_back((i - d + n_honest) % n_honest, i);
  const int total = n_honest + n_byzantine;
  for (int b = n_honest; b < total; ++b) {
    for (int i = 0; i < n_honest; ++i) {
      edges.emplace_back(b, i);
      edges.emplace_back(i, b);
    }
  }
  auto honest = id_range(0, n_honest);
  return NetworkTopology(honest, id_range(n_honest, total), std::move(edges), uniform_trim(honest, q));
}

void write_topology(std::ostream& out, const NetworkTopology& topo) {
  out << "byrdtd-topology 1\nhonest";
  for (int id : topo.honest()) out << ' ' << id;
  out << "\nbyzantine";
  for (int id : topo.byzantine()) out << ' ' << id;
  out << "\ntrim";
  for (const auto& [id, q] : topo.trims()) out << ' ' << id << ':' << q;
  out << "\nedges\n";
  for (const auto& [from, to] : topo.edges()) out << from << ' ' << to << '\n';
  out << "end\n";
}

NetworkTopology read_topology(std::istream& in, const std::string& source_name) {
  std::vector<int> honest, byzantine;
  std::map<int, int> trim;
  std::vector<Edge> edges;
  std::string line;
  int lineno = 0;
  enum class Section { Header, Edges, Done } section = Section::Header;
  bool seen_magic = false;
  auto fail = [&](const std::string& msg) -> void {
    throw Error(ErrorCode::ParseError, source_name + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (!seen_magic) {
      int version = 0;
      if (key != "byrdtd-topology" || !(ls >> version) || version != 1) fail("expected 'byrdtd-topology 1'");
      seen_magic = true;
      continue;
    }
    if (section == Section::Done) fail("content after 'end'");
    if (key == "end") {
      section = Section::Done;
      continue;
    }
    if (section == Section::Edges) {
      int to = 0;
      std::istringstream es(line);
      int from = 0;
      if (!(es >> from >> to)) fail("expected an edge 'from to'");
      edges.emplace_back(from, to);
      continue;
    }
    if (key == "honest" || key == "byzantine") {
      auto& ids = key == "honest" ? honest : byzantine;
      int id = 0;
      while (ls >> id) ids.push_back(id);
      if (!ls.eof()) fail("malformed id list");
    } else if (key == "trim") {
      std::string item;
      while (ls >> item) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) fail("trim entries must be 'id:q'");
        try {
          trim[std::stoi(item.substr(0, colon))] = std::stoi(item.substr(colon + 1));
        } catch (const std::exception&) {
          fail("malformed trim entry '" + item + "'");
        }
      }
    } else if (key == "edges") {
      section = Section::Edges;
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!seen_magic) fail("empty topology file");
  if (section != Section::Done) fail("missing 'end'");
  return NetworkTopology(std::move(honest), std::move(byzantine), std::move(edges), std::move(trim));
}

}  // namespace byrdtd
