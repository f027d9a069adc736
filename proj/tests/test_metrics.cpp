#include "doctest.h"

#include <omp.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "overlay/builder.hpp"
#include "overlay/metrics.hpp"

using namespace overlay;

namespace {

const int kM = 4;

Topology make(std::size_t nodes, std::vector<int> caps,
              std::initializer_list<std::tuple<NodeId, NodeId, int>> edges) {
  Topology t(nodes, std::move(caps));
  for (auto [u, d, m] : edges)
    for (int k = 0; k < m; ++k) t.add_connection(u, d);
  return t;
}

Topology random_build(std::size_t n, std::uint64_t seed, PolicySpec p, DelaySpace& space) {
  space = generate(DistributionSpec::standard(static_cast<Distribution>(seed % 3), n, seed));
  const int choices[] = {1, 5, 10, 16};
  const auto caps = CapacityProfile::random(n, 16, choices, seed);
  return build(space, caps, p, kM, seed);
}

// 0 -> 1 (x4), 1 -> 2 (x4) with delays 0.1 and 0.2.
struct Chain {
  DelaySpace space{{{0.0, 0.0}, {0.1, 0.0}, {0.3, 0.0}}};
  Topology topo = make(3, {16, 16, 16}, {{0, 1, 4}, {1, 2, 4}});
};

// Every peer x4 directly from the peercaster.
struct Star {
  DelaySpace space{{{0.0, 0.0}, {0.1, 0.0}, {0.0, -0.2}, {0.3, 0.4}}};
  Topology topo = make(4, {12, 4, 4, 4}, {{0, 1, 4}, {0, 2, 4}, {0, 3, 4}});
};

}  // namespace

TEST_CASE("star topology metrics") {
  Star s;
  const auto r = evaluate(s.topo, s.space, kM);
  CHECK(r.min_delay.per_node[3] == doctest::Approx(0.5));
  CHECK(r.min_delay.mean == doctest::Approx((0.1 + 0.2 + 0.5) / 3));
  CHECK(r.tree_delay.mean == doctest::Approx(r.min_delay.mean));
  CHECK(r.node_vulnerability.value == 0.0);
  CHECK(r.system_vulnerability.value == 0.0);
  for (long long v : r.node_vulnerability.per_node) CHECK(v == 0);
  for (long long v : r.system_vulnerability.per_node) CHECK(v == 0);
}

TEST_CASE("chain topology metrics") {
  Chain c;
  const auto sp = shortest_paths_from_peercaster(c.topo, c.space);
  CHECK(sp.distance[2] == doctest::Approx(0.3));
  CHECK(sp.predecessor[2] == 1);
  const auto md = min_delay(c.topo, c.space);
  CHECK(md.per_node[1] == doctest::Approx(0.1));
  CHECK(md.per_node[2] == doctest::Approx(0.3));
  CHECK(md.mean == doctest::Approx(0.2));

  const PathTable paths(c.topo, c.space);
  CHECK(paths.path(2, 0) == std::vector<NodeId>{0, 1, 2});
  CHECK(paths.path_delay(2, 3) == doctest::Approx(0.3));
  const auto V = node_vulnerability(paths, kM);
  CHECK(V.per_node[1] == 0);
  CHECK(V.per_node[2] == 4);
  CHECK(V.value == doctest::Approx(0.5));
  const auto S = system_vulnerability(paths, kM);
  CHECK(S.per_node[1] == 4);
  CHECK(S.per_node[2] == 0);
  CHECK(S.value == doctest::Approx(0.5));
}

TEST_CASE("paths through distinct relays give vulnerability one") {
  // Relays 1..4 each fed by the peercaster; peer 5 takes one from each.
  DelaySpace space({{0, 0}, {0.1, 0}, {0, 0.1}, {-0.1, 0}, {0, -0.1}, {0.05, 0.05}});
  auto t = make(6, {16, 4, 4, 4, 4, 4},
                {{0, 1, 4}, {0, 2, 4}, {0, 3, 4}, {0, 4, 4}, {1, 5, 1}, {2, 5, 1}, {3, 5, 1},
                 {4, 5, 1}});
  const PathTable paths(t, space);
  CHECK(node_vulnerability(paths, kM).per_node[5] == 1);
}

TEST_CASE("single relay carrying every other path") {
  // Node 1 is fed by the peercaster and feeds peers 2..4. Its own paths
  // cannot pass through itself, so the best attainable value is (N-1)/N.
  DelaySpace space({{0, 0}, {0.1, 0}, {0.2, 0}, {0.2, 0.1}, {0.2, -0.1}});
  auto t = make(5, {4, 12, 4, 4, 4}, {{0, 1, 4}, {1, 2, 4}, {1, 3, 4}, {1, 4, 4}});
  const PathTable paths(t, space);
  const auto S = system_vulnerability(paths, kM);
  CHECK(S.per_node[1] == 12);
  CHECK(S.value == doctest::Approx(12.0 / 16.0));
  const auto V = node_vulnerability(paths, kM);
  CHECK(V.per_node[2] == 4);
  CHECK(V.value == doctest::Approx(12.0 / 16.0));
}

TEST_CASE("tree delay consumes direct copies first") {
  // Peer 2: three direct connections and one via peer 1.
  DelaySpace space({{0, 0}, {0.3, 0}, {0.3, 0.4}});  // d(0,1)=.3 d(1,2)=.4 d(0,2)=.5
  auto t = make(3, {16, 16, 16}, {{0, 1, 4}, {0, 2, 3}, {1, 2, 1}});
  const auto md = min_delay(t, space);
  const auto td = tree_delay(t, space, kM);
  CHECK(md.per_node[2] == doctest::Approx(0.5));
  CHECK(td.per_node[2] == doctest::Approx(0.7));
  CHECK(td.per_node[1] == doctest::Approx(0.3));
}

TEST_CASE("star tree delay equals min delay") {
  Star s;
  const auto md = min_delay(s.topo, s.space);
  const auto td = tree_delay(s.topo, s.space, kM);
  for (NodeId i = 0; i < 4; ++i) CHECK(td.per_node[i] == doctest::Approx(md.per_node[i]));
}

TEST_CASE("shortest paths break ties by lowest predecessor id") {
  // Node 3 is reachable at equal delay through 1 and 2.
  DelaySpace space({{0, 0}, {0, 0.1}, {0, -0.1}, {0.1, 0}});
  auto t = make(4, {16, 4, 4, 4}, {{0, 2, 4}, {0, 1, 4}, {2, 3, 2}, {1, 3, 2}});
  const auto sp = shortest_paths_from_peercaster(t, space);
  CHECK(sp.predecessor[3] == 1);
  // The same answer twice.
  CHECK(shortest_paths_from_peercaster(t, space).predecessor == sp.predecessor);
}

TEST_CASE("unreachable nodes") {
  DelaySpace space({{0, 0}, {1, 0}, {2, 0}});
  auto t = make(3, {16, 4, 4}, {{1, 2, 4}, {2, 1, 4}});
  const auto sp = shortest_paths_from_peercaster(t, space);
  CHECK_FALSE(sp.reachable(1));
  CHECK_THROWS_AS(min_delay(t, space), InfeasibleTopology);
  CHECK_THROWS_AS(tree_delay(t, space, kM), InfeasibleTopology);
  CHECK_THROWS_AS(PathTable(t, space), InfeasibleTopology);
}

TEST_CASE("tree delay reports a peer cut off by tree removal") {
  // Peer 2 has only one edge-disjoint path; removing 3 trees cuts it.
  DelaySpace space({{0, 0}, {0.1, 0}, {0.2, 0}});
  auto t = make(3, {16, 4, 4}, {{0, 1, 4}, {1, 2, 1}});
  CHECK_THROWS_AS(tree_delay(t, space, kM), InfeasibleTopology);
}

TEST_CASE("verify_feasible requirements") {
  SUBCASE("mutual exchange without the peercaster fails requirement 3") {
    auto t = make(3, {16, 4, 4}, {{1, 2, 4}, {2, 1, 4}});
    const auto r = verify_feasible(t, t.capacities(), kM);
    CHECK_FALSE(r.ok);
    CHECK(r.requirement == 3);
    CHECK(r.node == 1);
    CHECK(reference::verify_feasible(t, t.capacities(), kM).requirement == 3);
  }
  SUBCASE("in-multiplicity three fails requirement 1") {
    auto t = make(2, {16, 4}, {{0, 1, 3}});
    const auto r = verify_feasible(t, t.capacities(), kM);
    CHECK(r.requirement == 1);
    CHECK(r.node == 1);
  }
  SUBCASE("over-capacity uploader fails requirement 2") {
    auto t = make(3, {4, 4, 4}, {{0, 1, 4}, {0, 2, 4}});
    const auto r = verify_feasible(t, t.capacities(), kM);
    CHECK(r.requirement == 2);
    CHECK(r.node == 0);
  }
  SUBCASE("self loop fails requirement 1") {
    auto t = make(2, {16, 4}, {{0, 1, 3}, {1, 1, 1}});
    CHECK(verify_feasible(t, t.capacities(), kM).requirement == 1);
  }
  SUBCASE("chain passes") {
    Chain c;
    CHECK(verify_feasible(c.topo, c.topo.capacities(), kM).ok);
  }
}

TEST_CASE("max flow counts multiplicity") {
  Chain c;
  CHECK(max_flow(c.topo, 0, 2) == 4);
  CHECK(max_flow(c.topo, 0, 2, 2) == 2);
  CHECK(max_flow(c.topo, 2, 0) == 0);
}

TEST_CASE("oracle equivalence on small random builds") {
  int instances = 0;
  for (std::uint64_t seed = 0; instances < 60; ++seed) {
    const auto& p = all_policies()[seed % 14];
    DelaySpace space;
    const std::size_t n = 3 + seed % 12;  // N <= 14
    const auto t = random_build(n, seed, p, space);
    ++instances;
    const auto sp = shortest_paths_from_peercaster(t, space);
    const auto brute = oracle::all_paths_min_delay(t, space);
    for (NodeId i = 0; i < t.size(); ++i)
      CHECK(sp.distance[i] == doctest::Approx(brute[i]).epsilon(1e-12));
    for (NodeId i = 1; i < t.size(); ++i) CHECK(max_flow(t, 0, i) == oracle::min_cut(t, 0, i));
  }
}

TEST_CASE("metric invariants on builder outputs") {
  for (std::uint64_t seed = 0; seed < 3; ++seed)
    for (const auto& p : all_policies()) {
      DelaySpace space;
      const auto t = random_build(150, seed, p, space);
      const auto r = evaluate(t, space, kM);
      for (NodeId i = 1; i < t.size(); ++i) {
        CHECK(r.min_delay.per_node[i] <= r.tree_delay.per_node[i]);
        CHECK(std::isfinite(r.tree_delay.per_node[i]));
        CHECK(r.node_vulnerability.per_node[i] >= 0);
        CHECK(r.node_vulnerability.per_node[i] <= kM);
      }
      CHECK(r.node_vulnerability.value >= 0.0);
      CHECK(r.node_vulnerability.value <= 1.0);
      CHECK(r.system_vulnerability.value >= 0.0);
      CHECK(r.system_vulnerability.value <= 1.0);

      // min over k of D_k(i) is the shortest distance.
      const PathTable paths(t, space);
      for (NodeId i = 1; i < t.size(); ++i) {
        double best = INFINITY;
        for (std::size_t k = 0; k < paths.connections(i); ++k) {
          const auto path = paths.path(i, k);
          CHECK(path.front() == 0);
          CHECK(path.back() == i);
          CHECK(path[path.size() - 2] == paths.uploader(i, k));
          double len = 0.0;
          for (std::size_t h = 1; h < path.size(); ++h) len += space.delay(path[h - 1], path[h]);
          CHECK(len == doctest::Approx(paths.path_delay(i, k)).epsilon(1e-12));
          CHECK(r.min_delay.per_node[i] <= paths.path_delay(i, k) + 1e-15);
          best = std::min(best, paths.path_delay(i, k));
        }
        CHECK(best == doctest::Approx(r.min_delay.per_node[i]).epsilon(1e-12));
      }

      // Fast kernels against the serial reference, plus the V/S duality:
      // both totals count the same (path, intermediate) incidences.
      const auto V = node_vulnerability(paths, kM);
      const auto S = system_vulnerability(paths, kM);
      CHECK(V.per_node == reference::node_vulnerability(paths, kM).per_node);
      CHECK(S.per_node == reference::system_vulnerability(paths, kM).per_node);
      long long incidences = 0;
      for (NodeId i = 1; i < t.size(); ++i)
        for (std::size_t k = 0; k < paths.connections(i); ++k)
          incidences += static_cast<long long>(paths.path(i, k).size()) - 2;
      CHECK(std::accumulate(S.per_node.begin(), S.per_node.end(), 0LL) == incidences);
    }
}

TEST_CASE("metrics are deterministic across thread counts") {
  DelaySpace space;
  const auto t = random_build(1500, 4, PolicySpec::parse("GCD"), space);
  omp_set_num_threads(1);
  const auto a = evaluate(t, space, kM);
  const auto fa = verify_feasible(t, t.capacities(), kM);
  omp_set_num_threads(4);
  const auto b = evaluate(t, space, kM);
  const auto fb = verify_feasible(t, t.capacities(), kM);
  omp_set_num_threads(omp_get_num_procs());
  CHECK(a.min_delay.per_node == b.min_delay.per_node);
  CHECK(a.tree_delay.per_node == b.tree_delay.per_node);
  CHECK(a.node_vulnerability.per_node == b.node_vulnerability.per_node);
  CHECK(a.system_vulnerability.per_node == b.system_vulnerability.per_node);
  CHECK(fa.ok == fb.ok);
}

TEST_CASE("topology CSV round trip") {
  DelaySpace space;
  const auto t = random_build(40, 2, PolicySpec::parse("FDS"), space);
  std::stringstream edges, caps;
  write_topology_csv(edges, t);
  write_capacity_csv(caps, t);
  const auto back = read_topology_csv(edges, caps);
  CHECK(back == t);
  std::stringstream bad_edges("uploader,downloader,multiplicity\n0,99,1\n"), caps2;
  write_capacity_csv(caps2, t);
  CHECK_THROWS_AS(read_topology_csv(bad_edges, caps2), std::runtime_error);
}
