#pragma once

#include <climits>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "overlay/delay_space.hpp"
#include "overlay/topology.hpp"

namespace overlay {

/// Raised when a metric meets a node the peercaster cannot reach.
class InfeasibleTopology : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr NodeId kNoPredecessor = static_cast<NodeId>(-1);

/// Directed single-source delays from the peercaster. Among equally short
/// routes the predecessor with the lowest id wins, so realized paths are
/// unique. Unreachable nodes have infinite distance.
struct ShortestPaths {
  std::vector<double> distance;
  std::vector<NodeId> predecessor;

  bool reachable(NodeId i) const { return distance.at(i) != std::numeric_limits<double>::infinity(); }
};

ShortestPaths shortest_paths_from_peercaster(const Topology& topology, const DelaySpace& space);

/// D_k(i): the realized shortest path to the k-th uploader of i followed
/// by the hop into i. Stored as the predecessor tree plus each node's
/// connection list; paths are materialized on request.
class PathTable {
public:
  PathTable(const Topology& topology, const DelaySpace& space);

  std::size_t size() const noexcept { return uploaders_.size(); }
  std::size_t connections(NodeId i) const { return uploaders_.at(i).size(); }

  /// Node sequence from the peercaster to i.
  std::vector<NodeId> path(NodeId i, std::size_t k) const;
  double path_delay(NodeId i, std::size_t k) const;

  NodeId uploader(NodeId i, std::size_t k) const { return uploaders_.at(i).at(k); }
  const ShortestPaths& tree() const noexcept { return paths_; }

private:
  const DelaySpace* space_;
  ShortestPaths paths_;
  std::vector<std::vector<NodeId>> uploaders_;
};

/// Per-node delays (index 0 is the peercaster, always 0) and the mean over peers.
struct DelayMetric {
  std::vector<double> per_node;
  double mean = 0.0;
};

/// Per-node counts and the normalized system value.
struct CountMetric {
  std::vector<long long> per_node;
  double value = 0.0;
};

DelayMetric min_delay(const Topology& topology, const DelaySpace& space);

/// Removes M-1 shortest-path trees (one multiplicity unit per tree edge)
/// from a copy of the graph, then measures shortest delays. Throws
/// InfeasibleTopology if a peer is cut off.
DelayMetric tree_delay(const Topology& topology, const DelaySpace& space, int substreams);

/// V_i = max over v not in {0, i} of the number of paths D_k(i) through v.
/// value = sum V_i / (N M).
CountMetric node_vulnerability(const PathTable& paths, int substreams);

/// S_v = number of paths D_k(i), i != v, through v. value = max S_v / (N M).
CountMetric system_vulnerability(const PathTable& paths, int substreams);

struct MetricsReport {
  DelayMetric min_delay;
  DelayMetric tree_delay;
  CountMetric node_vulnerability;
  CountMetric system_vulnerability;
};

MetricsReport evaluate(const Topology& topology, const DelaySpace& space, int substreams);

/// Maximum number of edge-disjoint source->sink paths, where a connection
/// of multiplicity m counts as m unit-capacity edges. Stops once `limit`
/// is reached.
int max_flow(const Topology& topology, NodeId source, NodeId sink, int limit = INT_MAX);

struct FeasibilityResult {
  bool ok = true;
  /// Violated requirement: 1 (M downloads), 2 (upload capacity), 3 (M
  /// edge-disjoint paths); 0 when ok.
  int requirement = 0;
  NodeId node = 0;
  std::string message;
};

/// Checks the three feasibility requirements, reporting the first
/// violation (lowest requirement, then lowest node). Requirement 3 is
/// checked with max-flow, independently of how the topology was built.
FeasibilityResult verify_feasible(const Topology& topology, std::span<const int> capacities,
                                  int substreams);

namespace reference {

/// Serial versions of the vulnerability kernels over materialized paths.
CountMetric node_vulnerability(const PathTable& paths, int substreams);
CountMetric system_vulnerability(const PathTable& paths, int substreams);
/// verify_feasible with every max-flow run serially.
FeasibilityResult verify_feasible(const Topology& topology, std::span<const int> capacities,
                                  int substreams);

}  // namespace reference

}  // namespace overlay
