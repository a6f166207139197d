#include <algorithm>

#include "shardbench/balancers.hpp"

namespace shardbench {
namespace {

bool point_less(const ConsistentRingBalancer::Point& a, const ConsistentRingBalancer::Point& b) {
  if (a.position != b.position) return a.position < b.position;
  if (a.shard != b.shard) return a.shard < b.shard;
  return a.replica < b.replica;
}

}  // namespace

ConsistentRingBalancer::ConsistentRingBalancer(std::vector<ShardId> initial,
                                               std::uint32_t points_per_shard, Seed seed)
    : Balancer(std::move(initial), seed), points_per_shard_(points_per_shard) {
  if (points_per_shard_ == 0) {
    throw Error(Errc::kConfiguration, "ring needs at least one point per shard");
  }
  on_add(membership_.live());
}

void ConsistentRingBalancer::on_add(std::span<const ShardId> ids) {
  points_.reserve(points_.size() + ids.size() * points_per_shard_);
  for (ShardId shard : ids) {
    for (std::uint32_t replica = 0; replica < points_per_shard_; ++replica) {
      points_.push_back({hash_pair(shard, replica, seed_), shard, replica});
    }
  }
  std::sort(points_.begin(), points_.end(), point_less);
}

void ConsistentRingBalancer::on_remove(std::span<const ShardId> ids) {
  auto gone = [&](const Point& p) {
    return std::binary_search(ids.begin(), ids.end(), p.shard);
  };
  points_.erase(std::remove_if(points_.begin(), points_.end(), gone), points_.end());
}

ShardId ConsistentRingBalancer::lookup(HashValue key) const {
  if (points_.empty()) {
    throw Error(Errc::kPlacementImpossible, "no live shards");
  }
  // First point at or past the key; the top of the range wraps to the start.
  // Equal positions sort by (shard, replica), so a key sitting exactly on a
  // point resolves to that point group's first entry.
  auto it = std::lower_bound(points_.begin(), points_.end(), key,
                             [](const Point& p, HashValue k) { return p.position < k; });
  if (it == points_.end()) it = points_.begin();
  return it->shard;
}

}  // namespace shardbench
