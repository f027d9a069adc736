#include <functional>
#include <queue>

#include "graph.hpp"

namespace overlay {

namespace detail {

ArcGraph::ArcGraph(const Topology& topology, const DelaySpace& space) {
  const std::size_t n = topology.size();
  if (space.size() != n) throw std::invalid_argument("topology and delay space sizes differ");
  const std::vector<Edge> edges = topology.edges();  // sorted by uploader, downloader
  offset.assign(n + 1, 0);
  head.reserve(edges.size());
  weight.reserve(edges.size());
  multiplicity.reserve(edges.size());
  for (const Edge& e : edges) {
    ++offset[e.uploader + 1];
    head.push_back(e.downloader);
    weight.push_back(space.delay_unchecked(e.uploader, e.downloader));
    multiplicity.push_back(e.multiplicity);
  }
  for (std::size_t i = 0; i < n; ++i) offset[i + 1] += offset[i];
}

DijkstraResult dijkstra(const ArcGraph& graph, NodeId source) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = graph.size();
  DijkstraResult r;
  r.distance.assign(n, inf);
  r.predecessor.assign(n, kNoPredecessor);
  r.via_arc.assign(n, static_cast<std::size_t>(-1));
  std::vector<char> settled(n, 0);

  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  r.distance[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [du, u] = queue.top();
    queue.pop();
    if (settled[u] || du > r.distance[u]) continue;
    settled[u] = 1;
    for (std::size_t a = graph.offset[u]; a < graph.offset[u + 1]; ++a) {
      if (graph.multiplicity[a] <= 0) continue;
      const NodeId v = graph.head[a];
      if (settled[v]) continue;
      const double nd = du + graph.weight[a];
      if (nd < r.distance[v]) {
        r.distance[v] = nd;
        r.predecessor[v] = u;
        r.via_arc[v] = a;
        queue.emplace(nd, v);
      } else if (nd == r.distance[v] && u < r.predecessor[v]) {
        r.predecessor[v] = u;
        r.via_arc[v] = a;
      }
    }
  }
  return r;
}

}  // namespace detail

ShortestPaths shortest_paths_from_peercaster(const Topology& topology, const DelaySpace& space) {
  const detail::ArcGraph graph(topology, space);
  auto r = detail::dijkstra(graph, kPeercaster);
  return ShortestPaths{std::move(r.distance), std::move(r.predecessor)};
}

}  // namespace overlay
