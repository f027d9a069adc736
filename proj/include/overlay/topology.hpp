#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "overlay/delay_space.hpp"

namespace overlay {

/// Upload capacity of every node in substream units; u[0] is the peercaster.
struct CapacityProfile {
  std::vector<int> u;

  /// u[0] = peercaster_capacity, every other node drawn with equal
  /// probability from `choices`.
  static CapacityProfile random(std::size_t peers, int peercaster_capacity,
                                std::span<const int> choices, std::uint64_t seed);

  std::size_t size() const noexcept { return u.size(); }
};

/// (uploader, downloader, multiplicity) with multiplicity > 0.
struct Edge {
  NodeId uploader = 0;
  NodeId downloader = 0;
  int multiplicity = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed multigraph of upload connections. Each downloader keeps its
/// connections in the order they were made (connection k is the k-th
/// entry), so an uploader used twice appears twice.
class Topology {
public:
  Topology() = default;
  Topology(std::size_t nodes, std::vector<int> capacity);

  std::size_t size() const noexcept { return uploaders_.size(); }

  void add_connection(NodeId uploader, NodeId downloader);

  std::span<const NodeId> uploaders_of(NodeId downloader) const {
    return uploaders_.at(downloader);
  }
  int in_multiplicity(NodeId i) const { return static_cast<int>(uploaders_.at(i).size()); }
  int out_multiplicity(NodeId i) const { return out_count_.at(i); }

  int capacity(NodeId i) const { return capacity_.at(i); }
  int residual(NodeId i) const { return capacity_.at(i) - out_count_.at(i); }
  std::span<const int> capacities() const noexcept { return capacity_; }

  /// Distinct (uploader, downloader) pairs sorted by uploader then downloader.
  std::vector<Edge> edges() const;

  /// Same edge multiset and capacities. Connection order is not compared.
  friend bool operator==(const Topology& a, const Topology& b) {
    return a.capacity_ == b.capacity_ && a.edges() == b.edges();
  }

private:
  std::vector<std::vector<NodeId>> uploaders_;
  std::vector<int> out_count_;
  std::vector<int> capacity_;
};

/// `uploader,downloader,multiplicity`
void write_topology_csv(std::ostream& out, const Topology& topology);
/// `node,u,residual_u`
void write_capacity_csv(std::ostream& out, const Topology& topology);

/// Reads the two files written above. Node count is taken from the
/// capacity file. Throws std::runtime_error on malformed input.
Topology read_topology_csv(std::istream& edges, std::istream& capacities);

}  // namespace overlay
