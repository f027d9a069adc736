#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "overlay/delay_space.hpp"
#include "overlay/policy.hpp"
#include "overlay/rng.hpp"
#include "overlay/topology.hpp"

namespace overlay {

/// No remaining peer satisfies u_i + F >= M.
class AdmissionStuck : public std::runtime_error {
public:
  AdmissionStuck(std::vector<NodeId> pending, long long spare);
  const std::vector<NodeId>& pending() const noexcept { return pending_; }
  long long spare() const noexcept { return spare_; }

private:
  std::vector<NodeId> pending_;
  long long spare_;
};

/// A connection was required but no connected node had upload capacity left.
class CapacityExhausted : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Incremental admission procedure. Starting with only the peercaster
/// connected and F = u_0 - M, it repeatedly
///   1. picks an unadmitted peer i with u_i + F >= M  (select_next_peer),
///   2. gives it M connections from connected nodes with spare upload
///      capacity  (select_uploaders),
///   3. sets F := F + u_i - M  (admit).
///
/// Fixed policies keep, for every unadmitted peer, its best score over
/// eligible uploaders and refresh it as uploaders join or run out of
/// capacity; the scans over unadmitted peers are OpenMP loops.
class Builder {
public:
  Builder(const DelaySpace& space, const CapacityProfile& caps, PolicySpec policy,
          int substreams, std::uint64_t seed);

  bool done() const noexcept { return admitted_count_ == space_->size(); }

  /// Next peer to admit, or nullopt when no unadmitted peer passes the guard.
  std::optional<NodeId> select_next_peer();

  /// The M uploaders for `peer`, in connection order, possibly repeated.
  /// Does not modify the state.
  std::vector<NodeId> select_uploaders(NodeId peer);

  /// Records the connections, updates F and the path delay of `peer`.
  void admit(NodeId peer, std::span<const NodeId> uploaders);

  /// Runs the loop to completion. Throws AdmissionStuck.
  Topology run();

  long long spare() const noexcept { return spare_; }
  /// Shortest peercaster->j delay for connected j, +inf otherwise.
  double path_delay(NodeId j) const { return path_delay_.at(j); }
  bool connected(NodeId j) const { return connected_.at(j) != 0; }
  int residual(NodeId j) const { return residual_.at(j); }
  /// Nodes still waiting for admission, ascending.
  std::vector<NodeId> pending() const;
  const Topology& topology() const noexcept { return topology_; }
  /// Penalty added per earlier use of an uploader within one peer's round.
  double penalty() const noexcept { return penalty_; }

private:
  double connection_score(NodeId peer, NodeId uploader) const;
  void insert_eligible(NodeId j);
  bool guard(NodeId i) const { return caps_[i] + spare_ >= substreams_; }
  void refresh_best(NodeId i);
  std::optional<NodeId> next_growing();
  std::optional<NodeId> next_fixed();

  const DelaySpace* space_;
  std::vector<int> caps_;
  PolicySpec policy_;
  int substreams_;
  Rng rng_;
  double penalty_;

  Topology topology_;
  std::vector<char> connected_;
  std::vector<int> residual_;
  std::vector<double> path_delay_;
  std::vector<NodeId> eligible_;  // connected with residual > 0, ascending
  long long spare_;
  std::size_t admitted_count_ = 1;

  // Growing: next arrival plus peers that failed the guard on arrival.
  NodeId next_arrival_ = 1;
  std::vector<NodeId> deferred_;

  // Fixed: unadmitted peers and their best (score, uploader).
  std::vector<NodeId> unadmitted_;
  std::vector<double> best_score_;
  std::vector<NodeId> best_uploader_;
};

/// Builds a feasible topology. FR is the growing procedure applied to the
/// arrival order, which the generators already make uniformly random;
/// with the same seed FR and GR produce identical topologies.
Topology build(const DelaySpace& space, const CapacityProfile& caps, PolicySpec policy,
               int substreams, std::uint64_t seed);

namespace reference {

/// Straightforward implementation of the same admission rules with no
/// score caching and no parallel loops: every selection rescans all
/// unadmitted peers against all eligible uploaders. Kept for testing the
/// production builder.
Topology build(const DelaySpace& space, const CapacityProfile& caps, PolicySpec policy,
               int substreams, std::uint64_t seed);

}  // namespace reference

}  // namespace overlay
