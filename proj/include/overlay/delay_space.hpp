#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace overlay {

using NodeId = std::uint32_t;

/// Index of the peercaster in every delay space and topology.
inline constexpr NodeId kPeercaster = 0;

/// A point in the delay plane; both components in seconds.
struct Coord {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Coord&, const Coord&) = default;
};

enum class Distribution { Flat, TightCluster, LooseCluster };

std::string_view to_string(Distribution kind);
/// Accepts "flat", "tight", "loose". Throws std::invalid_argument otherwise.
Distribution parse_distribution(std::string_view name);

/// Parameters of a node distribution.
///
///   half_width   D   components of cluster seeds (and flat nodes) are drawn from (-D, D)
///   perturbation d   per-step perturbation is drawn from (-d, d)
///   new_cluster  p   probability of starting a new cluster after each recorded node
///   peers        N   number of peers; N+1 coordinates are generated
struct DistributionSpec {
  Distribution kind = Distribution::Flat;
  double half_width = 0.25;
  double perturbation = 0.0;
  double new_cluster = 1.0;
  std::size_t peers = 0;
  std::uint64_t seed = 0;

  /// The standard parameter sets: D = 0.25 for all kinds; tight
  /// d = 0.005, loose d = 0.05; p = 0.01 for both clustered kinds.
  static DistributionSpec standard(Distribution kind, std::size_t peers,
                                   std::uint64_t seed);

  /// Throws std::invalid_argument when the parameters are out of range.
  void validate() const;
};

/// Immutable set of N+1 coordinates; node 0 is the peercaster.
class DelaySpace {
public:
  DelaySpace() = default;
  explicit DelaySpace(std::vector<Coord> coords);

  std::size_t size() const noexcept { return coords_.size(); }
  /// Number of peers (nodes other than the peercaster).
  std::size_t peers() const noexcept { return coords_.empty() ? 0 : coords_.size() - 1; }

  std::span<const Coord> coords() const noexcept { return coords_; }
  const Coord& coord(NodeId i) const;

  /// Euclidean delay in seconds. Throws std::out_of_range on bad ids.
  double delay(NodeId i, NodeId j) const;
  /// Same as delay() without the bounds check.
  double delay_unchecked(NodeId i, NodeId j) const noexcept;

  /// Largest pairwise delay (the diameter of the point set).
  double max_delay() const noexcept { return max_delay_; }

  friend bool operator==(const DelaySpace& a, const DelaySpace& b) {
    return a.coords_ == b.coords_;
  }

private:
  std::vector<Coord> coords_;
  double max_delay_ = 0.0;
};

/// Generator output plus the cluster each node was drawn in. Flat spaces
/// have no clusters: every label is 0 and cluster_count is 0.
struct GeneratedSpace {
  DelaySpace space;
  std::vector<std::size_t> cluster_of;
  std::size_t cluster_count = 0;
};

GeneratedSpace generate_detailed(const DistributionSpec& spec);
DelaySpace generate(const DistributionSpec& spec);

/// Writes `node,x,y`, one row per node, node 0 first.
void write_space_csv(std::ostream& out, const DelaySpace& space);

/// Formats a double so that parsing it back yields the identical value.
std::string format_double(double v);

}  // namespace overlay
