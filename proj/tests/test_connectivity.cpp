#include <doctest.h>

#include "byrdtd/error.hpp"
#include "byrdtd/rng.hpp"
#include "byrdtd/topology.hpp"
#include "connectivity_oracle.hpp"

using namespace byrdtd;

TEST_CASE("complete honest graph without trimming has tau 1") {
  const ConnectivityReport r = check_assumption_connectivity(build_complete(5, 0, 0), 1000);
  CHECK(r.holds);
  REQUIRE(r.tau.has_value());
  CHECK(*r.tau == 1);
  CHECK(r.subgraphs == 1);
}

TEST_CASE("single agent is its own source") {
  const ConnectivityReport r = check_assumption_connectivity(build_complete(1, 2, 1), 10);
  CHECK(r.holds);
  CHECK(*r.tau == 0);
}

TEST_CASE("directed path has tau equal to its length") {
  const NetworkTopology path({0, 1, 2, 3}, {}, {{0, 1}, {1, 2}, {2, 3}}, {});
  const ConnectivityReport r = check_assumption_connectivity(path, 10);
  CHECK(r.holds);
  CHECK(*r.tau == 3);
}

TEST_CASE("two disconnected cliques fail") {
  std::vector<Edge> edges;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (a != b) {
        edges.emplace_back(a, b);
        edges.emplace_back(a + 3, b + 3);
      }
  const NetworkTopology two({0, 1, 2, 3, 4, 5}, {}, edges, {});
  CHECK_FALSE(check_assumption_connectivity(two, 100).holds);
  CHECK_FALSE(testutil::floyd_warshall_connectivity(two).holds);
}

TEST_CASE("trimming at the middle of a chain keeps a source") {
  // 0 <-> 1 <-> 2; node 1 trims one of its two in-links, and 1 still reaches both ends.
  const NetworkTopology chain({0, 1, 2}, {}, {{0, 1}, {1, 0}, {1, 2}, {2, 1}}, {{0, 0}, {1, 1}, {2, 0}});
  const ConnectivityReport r = check_assumption_connectivity(chain, 100);
  const testutil::OracleResult o = testutil::floyd_warshall_connectivity(chain);
  CHECK(r.holds == o.holds);
  CHECK(r.subgraphs == 2);
  CHECK(r.holds);
  CHECK(*r.tau == 1);
  CHECK(*r.tau == *o.tau);
}

TEST_CASE("Byzantine agents are removed before enumeration") {
  // honest 0 and 1 only connect through Byzantine 2
  const NetworkTopology t({0, 1}, {2}, {{0, 2}, {2, 0}, {1, 2}, {2, 1}}, {{0, 0}, {1, 0}});
  CHECK_FALSE(check_assumption_connectivity(t, 10).holds);
}

TEST_CASE("enumeration matches the Floyd-Warshall oracle on random graphs") {
  Rng rng(2024);
  int checked = 0;
  for (int trial = 0; checked < 5 && trial < 200; ++trial) {
    const int n = 4 + static_cast<int>(uniform_index(rng, 3));
    const NetworkTopology base = build_erdos_renyi(n, 0.75, 0.0, derive_seed(77, static_cast<std::uint64_t>(trial)));
    std::map<int, int> trim;
    for (int id : base.honest()) {
      const int deg = base.neighbors_of(id).total();
      trim[id] = std::min(deg / 2, static_cast<int>(uniform_index(rng, 2)));
    }
    const NetworkTopology t(base.honest(), base.byzantine(), base.edges(), trim);
    const ConnectivityReport fast = check_assumption_connectivity(t, 1'000'000);
    const testutil::OracleResult slow = testutil::floyd_warshall_connectivity(t);
    CHECK(fast.holds == slow.holds);
    if (fast.holds) {
      CHECK(fast.subgraphs == slow.graphs);
      CHECK(*fast.tau == *slow.tau);
    }
    ++checked;
  }
  CHECK(checked == 5);
}

TEST_CASE("budget is enforced") {
  try {
    check_assumption_connectivity(build_complete(7, 2, 2), 1000);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetExceeded);
  }
}
