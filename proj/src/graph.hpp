#pragma once

#include <limits>
#include <vector>

#include "overlay/delay_space.hpp"
#include "overlay/metrics.hpp"
#include "overlay/topology.hpp"

namespace overlay::detail {

/// Out-adjacency in CSR form, one arc per distinct (uploader, downloader)
/// pair, downloaders ascending within each uploader.
struct ArcGraph {
  std::vector<std::size_t> offset;  // size n+1
  std::vector<NodeId> head;
  std::vector<double> weight;
  std::vector<int> multiplicity;

  ArcGraph(const Topology& topology, const DelaySpace& space);
  std::size_t size() const noexcept { return offset.size() - 1; }
};

struct DijkstraResult {
  std::vector<double> distance;
  std::vector<NodeId> predecessor;
  std::vector<std::size_t> via_arc;  // arc index entering each node
};

/// Shortest delays over arcs whose multiplicity is positive.
DijkstraResult dijkstra(const ArcGraph& graph, NodeId source);

}  // namespace overlay::detail
