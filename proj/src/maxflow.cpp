#include <algorithm>
#include <numeric>

#include "graph.hpp"

namespace overlay {

namespace {

// Residual network with paired arcs: arc 2e is forward, 2e+1 its reverse.
class FlowNetwork {
public:
  explicit FlowNetwork(const Topology& topology) : adjacency_(topology.size()) {
    for (const Edge& e : topology.edges()) {
      if (e.uploader == e.downloader) continue;
      add(e.uploader, e.downloader, e.multiplicity);
    }
  }

  std::size_t arcs() const noexcept { return head_.size(); }

  /// Edmonds-Karp; `flow` is caller-owned scratch of size arcs().
  int max_flow(NodeId s, NodeId t, int limit, std::vector<int>& flow,
               std::vector<std::size_t>& parent_arc) const {
    if (s == t) return limit;
    std::fill(flow.begin(), flow.end(), 0);
    const std::size_t n = adjacency_.size();
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<NodeId> queue;
    queue.reserve(n);
    int total = 0;
    while (total < limit) {
      parent_arc.assign(n, none);
      queue.clear();
      queue.push_back(s);
      bool found = false;
      for (std::size_t qi = 0; qi < queue.size() && !found; ++qi) {
        const NodeId u = queue[qi];
        for (std::size_t a : adjacency_[u]) {
          const NodeId v = head_[a];
          if (v == s || parent_arc[v] != none || capacity_[a] - flow[a] <= 0) continue;
          parent_arc[v] = a;
          if (v == t) {
            found = true;
            break;
          }
          queue.push_back(v);
        }
      }
      if (!found) break;
      int push = limit - total;
      for (NodeId v = t; v != s; v = head_[parent_arc[v] ^ 1])
        push = std::min(push, capacity_[parent_arc[v]] - flow[parent_arc[v]]);
      for (NodeId v = t; v != s; v = head_[parent_arc[v] ^ 1]) {
        flow[parent_arc[v]] += push;
        flow[parent_arc[v] ^ 1] -= push;
      }
      total += push;
    }
    return total;
  }

private:
  void add(NodeId u, NodeId v, int cap) {
    adjacency_[u].push_back(head_.size());
    head_.push_back(v);
    capacity_.push_back(cap);
    adjacency_[v].push_back(head_.size());
    head_.push_back(u);
    capacity_.push_back(0);
  }

  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<NodeId> head_;
  std::vector<int> capacity_;
};

FeasibilityResult structural_checks(const Topology& topology, std::span<const int> capacities,
                                    int substreams) {
  FeasibilityResult r;
  const std::size_t n = topology.size();
  if (capacities.size() != n) {
    r.ok = false;
    r.requirement = 2;
    r.message = "capacity list length differs from node count";
    return r;
  }
  for (NodeId i = 0; i < n; ++i) {
    const int in = topology.in_multiplicity(i);
    const int want = i == kPeercaster ? 0 : substreams;
    bool self_loop = false;
    for (NodeId u : topology.uploaders_of(i)) self_loop |= (u == i);
    if (in != want || self_loop) {
      r.ok = false;
      r.requirement = 1;
      r.node = i;
      r.message = "requirement 1 violated: node " + std::to_string(i) + " downloads over " +
                  std::to_string(in) + " connection(s), expected " + std::to_string(want) +
                  (self_loop ? " (self-loop present)" : "");
      return r;
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    if (topology.out_multiplicity(i) > capacities[i]) {
      r.ok = false;
      r.requirement = 2;
      r.node = i;
      r.message = "requirement 2 violated: node " + std::to_string(i) + " uploads " +
                  std::to_string(topology.out_multiplicity(i)) + " substreams, capacity " +
                  std::to_string(capacities[i]);
      return r;
    }
  }
  return r;
}

FeasibilityResult flow_violation(NodeId i, int flow, int substreams) {
  FeasibilityResult r;
  r.ok = false;
  r.requirement = 3;
  r.node = i;
  r.message = "requirement 3 violated: node " + std::to_string(i) + " has only " +
              std::to_string(flow) + " edge-disjoint path(s) from the peercaster, expected " +
              std::to_string(substreams);
  return r;
}

}  // namespace

int max_flow(const Topology& topology, NodeId source, NodeId sink, int limit) {
  if (source >= topology.size() || sink >= topology.size())
    throw std::out_of_range("max_flow: node id out of range");
  const FlowNetwork net(topology);
  std::vector<int> flow(net.arcs());
  std::vector<std::size_t> parent;
  return net.max_flow(source, sink, limit, flow, parent);
}

FeasibilityResult verify_feasible(const Topology& topology, std::span<const int> capacities,
                                  int substreams) {
  FeasibilityResult r = structural_checks(topology, capacities, substreams);
  if (!r.ok) return r;
  const FlowNetwork net(topology);
  const auto n = static_cast<std::ptrdiff_t>(topology.size());
  std::vector<int> flows(topology.size(), substreams);
#pragma omp parallel
  {
    std::vector<int> flow(net.arcs());
    std::vector<std::size_t> parent;
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 1; i < n; ++i)
      flows[i] = net.max_flow(kPeercaster, static_cast<NodeId>(i), substreams, flow, parent);
  }
  for (NodeId i = 1; i < topology.size(); ++i)
    if (flows[i] < substreams) return flow_violation(i, flows[i], substreams);
  return r;
}

namespace reference {

FeasibilityResult verify_feasible(const Topology& topology, std::span<const int> capacities,
                                  int substreams) {
  FeasibilityResult r = structural_checks(topology, capacities, substreams);
  if (!r.ok) return r;
  const FlowNetwork net(topology);
  std::vector<int> flow(net.arcs());
  std::vector<std::size_t> parent;
  for (NodeId i = 1; i < topology.size(); ++i) {
    const int f = net.max_flow(kPeercaster, i, substreams, flow, parent);
    if (f < substreams) return flow_violation(i, f, substreams);
  }
  return r;
}

}  // namespace reference

}  // namespace overlay
