#include "overlay/builder.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>

namespace overlay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
// Below this many candidates the OpenMP fork costs more than the scan.
constexpr std::ptrdiff_t kParallelMin = 2048;

bool random_order(const PolicySpec& p) {
  return p.ordering == Ordering::Growing || p.score == Score::Random;
}

struct Candidate {
  double score = kInf;
  NodeId id = kNoNode;
  bool better_than(const Candidate& o) const {
    if (id == kNoNode) return false;
    if (o.id == kNoNode) return true;
    return score < o.score || (score == o.score && id < o.id);
  }
};

}  // namespace

AdmissionStuck::AdmissionStuck(std::vector<NodeId> pending, long long spare)
    : std::runtime_error("admission stuck: " + std::to_string(pending.size()) +
                         " peer(s) cannot satisfy u_i + F >= M with F = " +
                         std::to_string(spare)),
      pending_(std::move(pending)),
      spare_(spare) {}

Builder::Builder(const DelaySpace& space, const CapacityProfile& caps, PolicySpec policy,
                 int substreams, std::uint64_t seed)
    : space_(&space),
      caps_(caps.u),
      policy_(policy),
      substreams_(substreams),
      rng_(derive_seed(seed, {hash_key("builder"), hash_key("connections")})) {
  const std::size_t n = space.size();
  if (n < 2) throw std::invalid_argument("build needs at least one peer");
  if (caps_.size() != n) throw std::invalid_argument("capacity profile size differs from space");
  if (substreams_ < 1) throw std::invalid_argument("M must be at least 1");
  if (caps_[kPeercaster] < substreams_)
    throw std::invalid_argument("peercaster capacity must be at least M");
  for (int u : caps_)
    if (u < 0) throw std::invalid_argument("capacities must be nonnegative");

  penalty_ = static_cast<double>(n - 1) * space.max_delay();
  if (!(penalty_ > 0.0)) penalty_ = 1.0;

  topology_ = Topology(n, caps_);
  connected_.assign(n, 0);
  residual_ = caps_;
  path_delay_.assign(n, kInf);
  connected_[kPeercaster] = 1;
  path_delay_[kPeercaster] = 0.0;
  eligible_.push_back(kPeercaster);
  spare_ = caps_[kPeercaster] - substreams_;

  if (!random_order(policy_)) {
    unadmitted_.reserve(n - 1);
    for (NodeId i = 1; i < n; ++i) unadmitted_.push_back(i);
    best_score_.assign(n, kInf);
    best_uploader_.assign(n, kNoNode);
    for (NodeId i : unadmitted_) {
      best_score_[i] = connection_score(i, kPeercaster);
      best_uploader_[i] = kPeercaster;
    }
  }
}

double Builder::connection_score(NodeId peer, NodeId uploader) const {
  const double d = space_->delay_unchecked(peer, uploader);
  switch (policy_.score) {
    case Score::Random: return 0.0;
    case Score::Closest: return d;
    case Score::LeastDelay: return path_delay_[uploader] + d;
  }
  return d;
}

void Builder::insert_eligible(NodeId j) {
  eligible_.insert(std::lower_bound(eligible_.begin(), eligible_.end(), j), j);
}

void Builder::refresh_best(NodeId i) {
  Candidate best;
  for (NodeId j : eligible_) {
    Candidate c{connection_score(i, j), j};
    if (c.better_than(best)) best = c;
  }
  best_score_[i] = best.score;
  best_uploader_[i] = best.id;
}

std::vector<NodeId> Builder::pending() const {
  std::vector<NodeId> out;
  for (NodeId i = 1; i < connected_.size(); ++i)
    if (!connected_[i]) out.push_back(i);
  return out;
}

std::optional<NodeId> Builder::select_next_peer() {
  if (done()) return std::nullopt;
  return random_order(policy_) ? next_growing() : next_fixed();
}

std::optional<NodeId> Builder::next_growing() {
  // Lowest-index unadmitted peer passing the guard. Deferred peers all
  // precede the next arrival, so they are retried first.
  for (auto it = deferred_.begin(); it != deferred_.end();) {
    if (connected_[*it]) {
      it = deferred_.erase(it);
      continue;
    }
    if (guard(*it)) return *it;
    ++it;
  }
  while (next_arrival_ < connected_.size()) {
    const NodeId i = next_arrival_;
    if (connected_[i]) {
      ++next_arrival_;
      continue;
    }
    if (guard(i)) return i;
    deferred_.push_back(i);
    ++next_arrival_;
  }
  return std::nullopt;
}

std::optional<NodeId> Builder::next_fixed() {
  Candidate best;
  const auto count = static_cast<std::ptrdiff_t>(unadmitted_.size());
#pragma omp parallel if (count >= kParallelMin)
  {
    Candidate local;
#pragma omp for nowait schedule(static)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      const NodeId i = unadmitted_[k];
      if (!guard(i)) continue;
      Candidate c{best_score_[i], i};
      if (c.better_than(local)) local = c;
    }
#pragma omp critical(overlay_next_fixed)
    if (local.better_than(best)) best = local;
  }
  if (best.id == kNoNode) return std::nullopt;
  return best.id;
}

std::vector<NodeId> Builder::select_uploaders(NodeId peer) {
  if (peer >= connected_.size() || peer == kPeercaster || connected_[peer])
    throw std::invalid_argument("select_uploaders: peer is not an unadmitted peer");

  std::vector<NodeId> chosen;
  chosen.reserve(substreams_);
  // Uses of each uploader within this round.
  std::vector<std::pair<NodeId, int>> used;
  auto uses = [&used](NodeId j) {
    for (const auto& [id, k] : used)
      if (id == j) return k;
    return 0;
  };
  auto record = [&used](NodeId j) {
    for (auto& [id, k] : used)
      if (id == j) {
        ++k;
        return;
      }
    used.emplace_back(j, 1);
  };

  std::vector<NodeId> candidates;
  for (int c = 0; c < substreams_; ++c) {
    const bool random_pick = policy_.score == Score::Random ||
                             (policy_.diversity == Diversity::SmallWorld && c == substreams_ - 1);
    NodeId pick = kNoNode;
    if (random_pick) {
      candidates.clear();
      for (NodeId j : eligible_)
        if (j != peer && residual_[j] - uses(j) > 0) candidates.push_back(j);
      if (!candidates.empty()) pick = candidates[rng_.below(candidates.size())];
    } else {
      const bool penalize = policy_.diversity != Diversity::None;
      Candidate best;
      for (NodeId j : eligible_) {
        if (j == peer) continue;
        const int k = uses(j);
        if (residual_[j] - k <= 0) continue;
        Candidate cand{connection_score(peer, j) + (penalize ? k * penalty_ : 0.0), j};
        if (cand.better_than(best)) best = cand;
      }
      pick = best.id;
    }
    if (pick == kNoNode)
      throw CapacityExhausted("no connected node has upload capacity for peer " +
                              std::to_string(peer));
    chosen.push_back(pick);
    record(pick);
  }
  return chosen;
}

void Builder::admit(NodeId peer, std::span<const NodeId> uploaders) {
  if (peer >= connected_.size() || peer == kPeercaster || connected_[peer])
    throw std::invalid_argument("admit: peer is not an unadmitted peer");
  if (static_cast<int>(uploaders.size()) != substreams_)
    throw std::invalid_argument("admit: exactly M uploaders are required");
  if (!guard(peer)) throw std::invalid_argument("admit: peer fails u_i + F >= M");

  for (std::size_t k = 0; k < uploaders.size(); ++k) {
    const NodeId j = uploaders[k];
    if (j >= connected_.size() || !connected_[j] || j == peer)
      throw std::invalid_argument("admit: uploader is not connected");
    const auto uses = std::count(uploaders.begin(), uploaders.begin() + k + 1, j);
    if (residual_[j] < uses)
      throw CapacityExhausted("uploader " + std::to_string(j) + " has no capacity left");
  }

  std::vector<NodeId> exhausted;
  double best_delay = kInf;
  for (NodeId j : uploaders) {
    --residual_[j];
    topology_.add_connection(j, peer);
    best_delay = std::min(best_delay, path_delay_[j] + space_->delay_unchecked(j, peer));
    if (residual_[j] == 0) exhausted.push_back(j);
  }
  path_delay_[peer] = best_delay;
  connected_[peer] = 1;
  spare_ += caps_[peer] - substreams_;
  ++admitted_count_;

  for (NodeId j : exhausted) {
    auto it = std::lower_bound(eligible_.begin(), eligible_.end(), j);
    if (it != eligible_.end() && *it == j) eligible_.erase(it);
  }
  const bool peer_uploads = residual_[peer] > 0;
  if (peer_uploads) insert_eligible(peer);

  if (random_order(policy_)) return;

  auto pos = std::find(unadmitted_.begin(), unadmitted_.end(), peer);
  if (pos != unadmitted_.end()) {
    *pos = unadmitted_.back();
    unadmitted_.pop_back();
  }

  const auto count = static_cast<std::ptrdiff_t>(unadmitted_.size());
#pragma omp parallel for if (count >= kParallelMin) schedule(static)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const NodeId i = unadmitted_[k];
    const NodeId b = best_uploader_[i];
    if (b != kNoNode && residual_[b] == 0) {
      refresh_best(i);
    } else if (peer_uploads) {
      Candidate cur{best_score_[i], b};
      Candidate c{connection_score(i, peer), peer};
      if (c.better_than(cur)) {
        best_score_[i] = c.score;
        best_uploader_[i] = peer;
      }
    }
  }
}

Topology Builder::run() {
  while (!done()) {
    const auto peer = select_next_peer();
    if (!peer) throw AdmissionStuck(pending(), spare_);
    const auto ups = select_uploaders(*peer);
    admit(*peer, ups);
  }
  return topology_;
}

Topology build(const DelaySpace& space, const CapacityProfile& caps, PolicySpec policy,
               int substreams, std::uint64_t seed) {
  Builder b(space, caps, policy, substreams, seed);
  return b.run();
}

}  // namespace overlay
