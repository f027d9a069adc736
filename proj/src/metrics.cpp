#include <algorithm>
#include <limits>

#include "graph.hpp"

namespace overlay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double peer_mean(const std::vector<double>& per_node) {
  if (per_node.size() < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 1; i < per_node.size(); ++i) sum += per_node[i];
  return sum / static_cast<double>(per_node.size() - 1);
}

double normalizer(std::size_t nodes, int substreams) {
  return static_cast<double>(nodes - 1) * substreams;
}

void require_reachable(const std::vector<double>& distance, const char* what) {
  for (NodeId i = 1; i < distance.size(); ++i)
    if (distance[i] == kInf)
      throw InfeasibleTopology(std::string(what) + ": node " + std::to_string(i) +
                               " is unreachable from the peercaster");
}

}  // namespace

PathTable::PathTable(const Topology& topology, const DelaySpace& space)
    : space_(&space), paths_(shortest_paths_from_peercaster(topology, space)) {
  uploaders_.resize(topology.size());
  for (NodeId i = 0; i < topology.size(); ++i) {
    const auto ups = topology.uploaders_of(i);
    for (NodeId u : ups)
      if (!paths_.reachable(u))
        throw InfeasibleTopology("path table: uploader " + std::to_string(u) + " of node " +
                                 std::to_string(i) + " is unreachable");
    uploaders_[i].assign(ups.begin(), ups.end());
  }
}

std::vector<NodeId> PathTable::path(NodeId i, std::size_t k) const {
  std::vector<NodeId> out{i};
  for (NodeId v = uploaders_.at(i).at(k); v != kNoPredecessor; v = paths_.predecessor[v]) {
    out.push_back(v);
    if (v == kPeercaster) break;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

double PathTable::path_delay(NodeId i, std::size_t k) const {
  const NodeId u = uploaders_.at(i).at(k);
  return paths_.distance[u] + space_->delay_unchecked(u, i);
}

DelayMetric min_delay(const Topology& topology, const DelaySpace& space) {
  auto sp = shortest_paths_from_peercaster(topology, space);
  require_reachable(sp.distance, "min delay");
  DelayMetric m;
  m.per_node = std::move(sp.distance);
  m.mean = peer_mean(m.per_node);
  return m;
}

DelayMetric tree_delay(const Topology& topology, const DelaySpace& space, int substreams) {
  detail::ArcGraph graph(topology, space);
  for (int round = 0; round + 1 < substreams; ++round) {
    const auto tree = detail::dijkstra(graph, kPeercaster);
    require_reachable(tree.distance, "tree delay");
    for (NodeId v = 1; v < graph.size(); ++v) --graph.multiplicity[tree.via_arc[v]];
  }
  auto last = detail::dijkstra(graph, kPeercaster);
  require_reachable(last.distance, "tree delay");
  DelayMetric m;
  m.per_node = std::move(last.distance);
  m.mean = peer_mean(m.per_node);
  return m;
}

namespace {

// Walks the realized paths of every node once and fills both V and S.
// Each path visits a node at most once, so the per-node list of
// intermediates holds one entry per (path, node) incidence.
void vulnerability_kernel(const PathTable& paths, std::vector<long long>& V,
                          std::vector<long long>& S) {
  const std::size_t n = paths.size();
  const auto& pred = paths.tree().predecessor;
  V.assign(n, 0);
  S.assign(n, 0);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
  {
    std::vector<long long> S_local(n, 0);
    std::vector<NodeId> hits;
#pragma omp for schedule(dynamic, 64) nowait
    for (std::ptrdiff_t ii = 1; ii < count; ++ii) {
      const auto i = static_cast<NodeId>(ii);
      hits.clear();
      for (std::size_t k = 0; k < paths.connections(i); ++k)
        for (NodeId v = paths.uploader(i, k); v != kPeercaster && v != kNoPredecessor; v = pred[v])
          if (v != i) hits.push_back(v);
      std::sort(hits.begin(), hits.end());
      long long best = 0;
      for (std::size_t a = 0; a < hits.size();) {
        std::size_t b = a;
        while (b < hits.size() && hits[b] == hits[a]) ++b;
        best = std::max<long long>(best, static_cast<long long>(b - a));
        S_local[hits[a]] += static_cast<long long>(b - a);
        a = b;
      }
      V[i] = best;
    }
#pragma omp critical(overlay_vulnerability_merge)
    for (std::size_t v = 0; v < n; ++v) S[v] += S_local[v];
  }
}

}  // namespace

CountMetric node_vulnerability(const PathTable& paths, int substreams) {
  std::vector<long long> V, S;
  vulnerability_kernel(paths, V, S);
  CountMetric m;
  long long sum = 0;
  for (long long v : V) sum += v;
  m.value = paths.size() > 1 ? static_cast<double>(sum) / normalizer(paths.size(), substreams) : 0.0;
  m.per_node = std::move(V);
  return m;
}

CountMetric system_vulnerability(const PathTable& paths, int substreams) {
  std::vector<long long> V, S;
  vulnerability_kernel(paths, V, S);
  CountMetric m;
  long long best = 0;
  for (long long s : S) best = std::max(best, s);
  m.value = paths.size() > 1 ? static_cast<double>(best) / normalizer(paths.size(), substreams) : 0.0;
  m.per_node = std::move(S);
  return m;
}

MetricsReport evaluate(const Topology& topology, const DelaySpace& space, int substreams) {
  MetricsReport r;
  const PathTable paths(topology, space);
  r.min_delay.per_node = paths.tree().distance;
  require_reachable(r.min_delay.per_node, "min delay");
  r.min_delay.mean = peer_mean(r.min_delay.per_node);
  r.tree_delay = tree_delay(topology, space, substreams);

  std::vector<long long> V, S;
  vulnerability_kernel(paths, V, S);
  const double norm = topology.size() > 1 ? normalizer(topology.size(), substreams) : 1.0;
  long long sum = 0, best = 0;
  for (long long v : V) sum += v;
  for (long long s : S) best = std::max(best, s);
  r.node_vulnerability.per_node = std::move(V);
  r.node_vulnerability.value = static_cast<double>(sum) / norm;
  r.system_vulnerability.per_node = std::move(S);
  r.system_vulnerability.value = static_cast<double>(best) / norm;
  return r;
}

}  // namespace overlay
