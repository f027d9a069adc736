#include <map>

#include "overlay/metrics.hpp"

namespace overlay::reference {

namespace {

// Per node i: how many of its paths pass each intermediate node.
std::vector<std::map<NodeId, long long>> through_counts(const PathTable& paths) {
  std::vector<std::map<NodeId, long long>> out(paths.size());
  for (NodeId i = 1; i < paths.size(); ++i)
    for (std::size_t k = 0; k < paths.connections(i); ++k)
      for (NodeId v : paths.path(i, k))
        if (v != kPeercaster && v != i) ++out[i][v];
  return out;
}

}  // namespace

CountMetric node_vulnerability(const PathTable& paths, int substreams) {
  CountMetric m;
  m.per_node.assign(paths.size(), 0);
  long long sum = 0;
  const auto counts = through_counts(paths);
  for (NodeId i = 1; i < paths.size(); ++i) {
    for (const auto& [v, c] : counts[i]) m.per_node[i] = std::max(m.per_node[i], c);
    sum += m.per_node[i];
  }
  if (paths.size() > 1)
    m.value = static_cast<double>(sum) / (static_cast<double>(paths.size() - 1) * substreams);
  return m;
}

CountMetric system_vulnerability(const PathTable& paths, int substreams) {
  CountMetric m;
  m.per_node.assign(paths.size(), 0);
  const auto counts = through_counts(paths);
  for (NodeId i = 1; i < paths.size(); ++i)
    for (const auto& [v, c] : counts[i]) m.per_node[v] += c;
  long long best = 0;
  for (long long s : m.per_node) best = std::max(best, s);
  if (paths.size() > 1)
    m.value = static_cast<double>(best) / (static_cast<double>(paths.size() - 1) * substreams);
  return m;
}

}  // namespace overlay::reference
