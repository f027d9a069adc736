#include "overlay/topology.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <stdexcept>

#include "overlay/csv.hpp"
#include "overlay/rng.hpp"

namespace overlay {

namespace csv {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(',', start);
    out.emplace_back(line.substr(start, end == std::string_view::npos ? end : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

void expect_header(std::istream& in, std::string_view expected) {
  std::string line;
  if (!next_line(in, line) || line != expected)
    throw std::runtime_error("expected CSV header '" + std::string(expected) + "'");
}

long long to_int(const std::string& field) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw std::runtime_error("not an integer: '" + field + "'");
  return v;
}

double to_double(const std::string& field) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw std::runtime_error("not a number: '" + field + "'");
  return v;
}

}  // namespace csv

CapacityProfile CapacityProfile::random(std::size_t peers, int peercaster_capacity,
                                        std::span<const int> choices, std::uint64_t seed) {
  if (choices.empty()) throw std::invalid_argument("capacity choice set is empty");
  CapacityProfile caps;
  caps.u.reserve(peers + 1);
  caps.u.push_back(peercaster_capacity);
  Rng rng(derive_seed(seed, {hash_key("capacity")}));
  for (std::size_t i = 0; i < peers; ++i) caps.u.push_back(choices[rng.below(choices.size())]);
  return caps;
}

Topology::Topology(std::size_t nodes, std::vector<int> capacity)
    : uploaders_(nodes), out_count_(nodes, 0), capacity_(std::move(capacity)) {
  if (capacity_.size() != nodes)
    throw std::invalid_argument("capacity vector length must equal node count");
}

void Topology::add_connection(NodeId uploader, NodeId downloader) {
  if (uploader >= size() || downloader >= size())
    throw std::out_of_range("connection endpoint out of range");
  uploaders_[downloader].push_back(uploader);
  ++out_count_[uploader];
}

std::vector<Edge> Topology::edges() const {
  std::vector<Edge> out;
  for (NodeId d = 0; d < size(); ++d) {
    std::vector<NodeId> ups = uploaders_[d];
    std::sort(ups.begin(), ups.end());
    for (std::size_t k = 0; k < ups.size();) {
      std::size_t run = k;
      while (run < ups.size() && ups[run] == ups[k]) ++run;
      out.push_back(Edge{ups[k], d, static_cast<int>(run - k)});
      k = run;
    }
  }
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
    return a.uploader != b.uploader ? a.uploader < b.uploader : a.downloader < b.downloader;
  });
  return out;
}

void write_topology_csv(std::ostream& out, const Topology& topology) {
  out << "uploader,downloader,multiplicity\n";
  for (const Edge& e : topology.edges())
    out << e.uploader << ',' << e.downloader << ',' << e.multiplicity << '\n';
}

void write_capacity_csv(std::ostream& out, const Topology& topology) {
  out << "node,u,residual_u\n";
  for (NodeId i = 0; i < topology.size(); ++i)
    out << i << ',' << topology.capacity(i) << ',' << topology.residual(i) << '\n';
}

Topology read_topology_csv(std::istream& edges, std::istream& capacities) {
  csv::expect_header(capacities, "node,u,residual_u");
  std::vector<int> caps;
  std::vector<long long> residual;
  std::string line;
  while (csv::next_line(capacities, line)) {
    auto f = csv::split(line);
    if (f.size() != 3) throw std::runtime_error("capacity row needs 3 fields: " + line);
    if (csv::to_int(f[0]) != static_cast<long long>(caps.size()))
      throw std::runtime_error("capacity rows must list nodes 0..N in order");
    caps.push_back(static_cast<int>(csv::to_int(f[1])));
    residual.push_back(csv::to_int(f[2]));
  }
  if (caps.empty()) throw std::runtime_error("capacity file lists no nodes");

  Topology topo(caps.size(), caps);
  csv::expect_header(edges, "uploader,downloader,multiplicity");
  while (csv::next_line(edges, line)) {
    auto f = csv::split(line);
    if (f.size() != 3) throw std::runtime_error("edge row needs 3 fields: " + line);
    const long long up = csv::to_int(f[0]);
    const long long down = csv::to_int(f[1]);
    const long long mult = csv::to_int(f[2]);
    const auto n = static_cast<long long>(caps.size());
    if (up < 0 || up >= n || down < 0 || down >= n)
      throw std::runtime_error("edge endpoint out of range: " + line);
    if (mult <= 0) throw std::runtime_error("multiplicity must be positive: " + line);
    for (long long k = 0; k < mult; ++k)
      topo.add_connection(static_cast<NodeId>(up), static_cast<NodeId>(down));
  }
  for (NodeId i = 0; i < topo.size(); ++i)
    if (topo.residual(i) != residual[i])
      throw std::runtime_error("residual_u of node " + std::to_string(i) +
                               " disagrees with the edge file");
  return topo;
}

}  // namespace overlay
