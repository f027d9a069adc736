#include <limits>
#include <string>

#include "overlay/builder.hpp"

namespace overlay::reference {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

}  // namespace

Topology build(const DelaySpace& space, const CapacityProfile& caps, PolicySpec policy,
               int substreams, std::uint64_t seed) {
  const std::size_t n = space.size();
  const int M = substreams;
  if (n < 2 || caps.u.size() != n || M < 1 || caps.u[0] < M)
    throw std::invalid_argument("reference::build: invalid input");

  Rng rng(derive_seed(seed, {hash_key("builder"), hash_key("connections")}));
  double penalty = static_cast<double>(n - 1) * space.max_delay();
  if (!(penalty > 0.0)) penalty = 1.0;

  Topology topo(n, caps.u);
  std::vector<char> connected(n, 0);
  std::vector<int> residual = caps.u;
  std::vector<double> d(n, kInf);
  connected[0] = 1;
  d[0] = 0.0;
  long long F = caps.u[0] - M;

  auto score = [&](NodeId i, NodeId j) {
    switch (policy.score) {
      case Score::Closest: return space.delay_unchecked(i, j);
      case Score::LeastDelay: return d[j] + space.delay_unchecked(i, j);
      case Score::Random: break;
    }
    return 0.0;
  };
  const bool in_order = policy.ordering == Ordering::Growing || policy.score == Score::Random;

  for (std::size_t admitted = 1; admitted < n; ++admitted) {
    NodeId peer = kNoNode;
    double peer_score = kInf;
    for (NodeId i = 1; i < n; ++i) {
      if (connected[i] || caps.u[i] + F < M) continue;
      if (in_order) {
        peer = i;
        break;
      }
      double s = kInf;
      for (NodeId j = 0; j < n; ++j)
        if (connected[j] && residual[j] > 0 && score(i, j) < s) s = score(i, j);
      if (peer == kNoNode || s < peer_score) {
        peer = i;
        peer_score = s;
      }
    }
    if (peer == kNoNode) {
      std::vector<NodeId> pending;
      for (NodeId i = 1; i < n; ++i)
        if (!connected[i]) pending.push_back(i);
      throw AdmissionStuck(pending, F);
    }

    std::vector<int> uses(n, 0);
    std::vector<NodeId> chosen;
    for (int c = 0; c < M; ++c) {
      std::vector<NodeId> open;
      for (NodeId j = 0; j < n; ++j)
        if (connected[j] && residual[j] - uses[j] > 0) open.push_back(j);
      if (open.empty()) throw CapacityExhausted("reference::build: no uploader left");
      NodeId pick = kNoNode;
      if (policy.score == Score::Random ||
          (policy.diversity == Diversity::SmallWorld && c == M - 1)) {
        pick = open[rng.below(open.size())];
      } else {
        double best = kInf;
        for (NodeId j : open) {
          double s = score(peer, j);
          if (policy.diversity != Diversity::None) s += uses[j] * penalty;
          if (pick == kNoNode || s < best) {
            pick = j;
            best = s;
          }
        }
      }
      ++uses[pick];
      chosen.push_back(pick);
    }

    double dp = kInf;
    for (NodeId j : chosen) {
      --residual[j];
      topo.add_connection(j, peer);
      dp = std::min(dp, d[j] + space.delay_unchecked(j, peer));
    }
    d[peer] = dp;
    connected[peer] = 1;
    F += caps.u[peer] - M;
  }
  return topo;
}

}  // namespace overlay::reference
