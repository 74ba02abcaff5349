#include <doctest.h>

#include <sstream>

#include "byrdtd/error.hpp"
#include "byrdtd/metrics.hpp"
#include "byrdtd/topology.hpp"

using namespace byrdtd;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("complete graph neighborhoods") {
  const NetworkTopology t = build_complete(7, 2, 2);
  CHECK(t.num_agents() == 9);
  CHECK(t.honest().size() == 7);
  CHECK(t.edges().size() == 72);
  const InNeighbors nb = in_neighbors(t, 3);
  CHECK(nb.honest.size() == 6);
  CHECK(nb.byzantine == std::vector<int>{7, 8});
  CHECK(t.trim(3) == 2);
  CHECK(degree_of_unsaturation(t) == doctest::Approx(0.4));
  CHECK(degree_of_unsaturation(build_complete(5, 0, 0)) == doctest::Approx(0.0));
}

TEST_CASE("degree of unsaturation of a star") {
  // leaves hear only from the hub: N_n = 1, so min N* = 2
  std::vector<Edge> edges;
  for (int leaf = 1; leaf < 6; ++leaf) {
    edges.emplace_back(0, leaf);
    edges.emplace_back(leaf, 0);
  }
  const NetworkTopology star({0, 1, 2, 3, 4, 5}, {}, edges, {});
  CHECK(degree_of_unsaturation(star) == doctest::Approx(6.0 / 2.0 - 1.0));
}

TEST_CASE("construction rejects malformed graphs") {
  CHECK(code_of([] { NetworkTopology({0, 1}, {1}, {}, {}); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { NetworkTopology({0}, {}, {{0, 0}}, {}); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { NetworkTopology({0, 1}, {}, {{0, 5}}, {}); }) == ErrorCode::UnknownAgent);
  CHECK(code_of([] { NetworkTopology({}, {0}, {}, {}); }) == ErrorCode::NoHonestAgents);
  CHECK(code_of([] { NetworkTopology({0, 1}, {}, {{0, 1}}, {{1, 1}}); }) == ErrorCode::InvalidTrim);
  CHECK(code_of([] { build_preset("H9B9"); }) == ErrorCode::UnknownPreset);
  CHECK(code_of([] { in_neighbors(build_complete(2, 1, 0), 2); }) == ErrorCode::UnknownAgent);
  CHECK(code_of([] { build_complete(3, 1, 1, true); }) == ErrorCode::InvalidTrim);
  CHECK_NOTHROW(build_complete(7, 1, 1, true));
}

TEST_CASE("trim checks") {
  const TrimCheck loose = check_trim(build_complete(4, 2, 1));
  CHECK_FALSE(loose.covers_byzantine);
  CHECK_FALSE(loose.warnings.empty());
  const TrimCheck tight = check_trim(build_complete(7, 1, 1));
  CHECK(tight.covers_byzantine);
  CHECK(tight.theorem_condition);
  CHECK(tight.warnings.empty());
}

TEST_CASE("presets") {
  const NetworkTopology h2 = build_preset("H2B1");
  CHECK(h2.num_honest() == 2);
  CHECK(h2.byzantine() == std::vector<int>{2, 3});
  CHECK(h2.has_edge(2, 0));
  CHECK(h2.has_edge(3, 1));
  CHECK_FALSE(h2.has_edge(2, 1));
  const InNeighbors nb = in_neighbors(build_preset("H3B1"), 1);
  CHECK(nb.honest == std::vector<int>{0, 2});
  CHECK(nb.byzantine == std::vector<int>{4});
}

TEST_CASE("Erdos-Renyi graphs are symmetric, seeded and clamp the trim") {
  const NetworkTopology a = build_erdos_renyi(9, 0.7, 0.2, 123);
  const NetworkTopology b = build_erdos_renyi(9, 0.7, 0.2, 123);
  CHECK(a.edges() == b.edges());
  CHECK(a.honest() == b.honest());
  for (const auto& [from, to] : a.edges()) CHECK(a.has_edge(to, from));
  for (int n : a.honest()) {
    const int total = a.neighbors_of(n).total();
    CHECK(a.trim(n) == std::min(a.num_byzantine(), total / 2));
  }
  const NetworkTopology local = build_erdos_renyi(9, 0.7, 0.2, 123, TrimRule::LocalByzantineCount);
  for (int n : local.honest())
    CHECK(local.trim(n) == static_cast<int>(local.neighbors_of(n).byzantine.size()));

  // edge density over many draws
  long edges = 0;
  for (std::uint64_t s = 0; s < 200; ++s) edges += static_cast<long>(build_erdos_renyi(10, 0.3, 0.0, s).edges().size());
  const double density = edges / (200.0 * 90.0);
  CHECK(density == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("circulant graphs") {
  const NetworkTopology c = build_circulant(7, 2, 4, 2);
  const InNeighbors nb = in_neighbors(c, 0);
  CHECK(nb.honest == std::vector<int>{3, 4, 5, 6});
  CHECK(nb.byzantine == std::vector<int>{7, 8});
  CHECK(degree_of_unsaturation(c) == doctest::Approx(7.0 / 3.0 - 1.0));
  CHECK_THROWS_AS(build_circulant(3, 0, 3, 0), Error);
}

TEST_CASE("topology files round-trip") {
  const NetworkTopology t = build_erdos_renyi(8, 0.5, 0.25, 9);
  std::stringstream buf;
  write_topology(buf, t);
  const NetworkTopology back = read_topology(buf);
  CHECK(back.honest() == t.honest());
  CHECK(back.byzantine() == t.byzantine());
  CHECK(back.edges() == t.edges());
  CHECK(back.trims() == t.trims());

  std::istringstream bad("byrdtd-topology 1\nhonest 0 1\nedges\n0 x\nend\n");
  try {
    read_topology(bad, "g.txt");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("g.txt:4") != std::string::npos);
  }
}
