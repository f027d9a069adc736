#include "overlay/delay_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "overlay/rng.hpp"

namespace overlay {

namespace {

double cross(const Coord& o, const Coord& a, const Coord& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Diameter via the convex hull (monotone chain), then all hull pairs.
double diameter(std::vector<Coord> pts) {
  if (pts.size() < 2) return 0.0;
  std::sort(pts.begin(), pts.end(), [](const Coord& a, const Coord& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  std::vector<Coord> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 1 ? k - 1 : k);
  double best = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j)
      best = std::max(best, std::hypot(hull[i].x - hull[j].x, hull[i].y - hull[j].y));
  return best;
}

}  // namespace

std::string_view to_string(Distribution kind) {
  switch (kind) {
    case Distribution::Flat: return "flat";
    case Distribution::TightCluster: return "tight";
    case Distribution::LooseCluster: return "loose";
  }
  return "?";
}

Distribution parse_distribution(std::string_view name) {
  if (name == "flat") return Distribution::Flat;
  if (name == "tight") return Distribution::TightCluster;
  if (name == "loose") return Distribution::LooseCluster;
  throw std::invalid_argument("unknown distribution '" + std::string(name) + "'");
}

DistributionSpec DistributionSpec::standard(Distribution kind, std::size_t peers,
                                            std::uint64_t seed) {
  DistributionSpec s;
  s.kind = kind;
  s.half_width = 0.25;
  s.peers = peers;
  s.seed = seed;
  switch (kind) {
    case Distribution::Flat:
      break;
    case Distribution::TightCluster:
      s.perturbation = 0.005;
      s.new_cluster = 0.01;
      break;
    case Distribution::LooseCluster:
      s.perturbation = 0.05;
      s.new_cluster = 0.01;
      break;
  }
  return s;
}

void DistributionSpec::validate() const {
  if (peers == 0)
    throw std::invalid_argument("distribution needs at least one peer besides the peercaster");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("half width D must be positive");
  if (kind != Distribution::Flat) {
    if (!(perturbation > 0.0 && perturbation < half_width))
      throw std::invalid_argument("perturbation d must satisfy 0 < d < D");
    if (!(new_cluster > 0.0 && new_cluster <= 1.0))
      throw std::invalid_argument("new-cluster probability p must satisfy 0 < p <= 1");
  }
}

DelaySpace::DelaySpace(std::vector<Coord> coords) : coords_(std::move(coords)) {
  for (const auto& c : coords_)
    if (!std::isfinite(c.x) || !std::isfinite(c.y))
      throw std::invalid_argument("coordinates must be finite");
  max_delay_ = diameter(coords_);
}

const Coord& DelaySpace::coord(NodeId i) const {
  if (i >= coords_.size()) throw std::out_of_range("node id out of range");
  return coords_[i];
}

double DelaySpace::delay(NodeId i, NodeId j) const {
  if (i >= coords_.size() || j >= coords_.size())
    throw std::out_of_range("node id out of range");
  return delay_unchecked(i, j);
}

double DelaySpace::delay_unchecked(NodeId i, NodeId j) const noexcept {
  const Coord& a = coords_[i];
  const Coord& b = coords_[j];
  return std::hypot(a.x - b.x, a.y - b.y);
}

GeneratedSpace generate_detailed(const DistributionSpec& spec) {
  spec.validate();
  const std::size_t total = spec.peers + 1;
  Rng rng(derive_seed(spec.seed, {hash_key("delay_space"), hash_key("coords")}));
  const double D = spec.half_width;

  GeneratedSpace out;
  std::vector<Coord> coords;
  coords.reserve(total);
  out.cluster_of.reserve(total);

  if (spec.kind == Distribution::Flat) {
    for (std::size_t i = 0; i < total; ++i) {
      Coord c;
      c.x = rng.uniform(-D, D);
      c.y = rng.uniform(-D, D);
      coords.push_back(c);
      out.cluster_of.push_back(0);
    }
    out.cluster_count = 0;
    out.space = DelaySpace(std::move(coords));
    return out;
  }

  const double d = spec.perturbation;
  Coord pos;
  bool start_cluster = true;
  std::size_t cluster = 0;
  while (coords.size() < total) {
    if (start_cluster) {
      pos.x = rng.uniform(-D, D);
      pos.y = rng.uniform(-D, D);
      ++out.cluster_count;
      cluster = out.cluster_count - 1;
    }
    // Perturbations accumulate on the running position.
    pos.x += rng.uniform(-d, d);
    pos.y += rng.uniform(-d, d);
    coords.push_back(pos);
    out.cluster_of.push_back(cluster);
    start_cluster = rng.uniform_open() < spec.new_cluster;
  }

  // Randomize node order so that arrival order is not by cluster.
  Rng shuffle(derive_seed(spec.seed, {hash_key("delay_space"), hash_key("shuffle")}));
  for (std::size_t i = total - 1; i > 0; --i) {
    const std::size_t j = shuffle.below(i + 1);
    std::swap(coords[i], coords[j]);
    std::swap(out.cluster_of[i], out.cluster_of[j]);
  }
  out.space = DelaySpace(std::move(coords));
  return out;
}

DelaySpace generate(const DistributionSpec& spec) {
  return generate_detailed(spec).space;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_space_csv(std::ostream& out, const DelaySpace& space) {
  out << "node,x,y\n";
  const auto coords = space.coords();
  for (std::size_t i = 0; i < coords.size(); ++i)
    out << i << ',' << format_double(coords[i].x) << ',' << format_double(coords[i].y) << '\n';
}

}  // namespace overlay
