// Linear, Jump and Rendezvous: stateless beyond the live set and the seed.

#include "shardbench/balancers.hpp"

namespace shardbench {
namespace {

const std::vector<ShardId>& require_live(const Membership& membership) {
  if (membership.live().empty()) {
    throw Error(Errc::kPlacementImpossible, "no live shards");
  }
  return membership.live();
}

}  // namespace

std::uint32_t jump_consistent_hash(std::uint64_t key, std::uint32_t buckets) {
  if (buckets == 0) {
    throw Error(Errc::kPlacementImpossible, "no buckets");
  }
  std::int64_t b = -1;
  std::int64_t j = 0;
  while (j < static_cast<std::int64_t>(buckets)) {
    b = j;
    key = key * 2862933555777941757ull + 1;
    j = static_cast<std::int64_t>(
        static_cast<double>(b + 1) *
        (static_cast<double>(1ll << 31) / static_cast<double>((key >> 33) + 1)));
  }
  return static_cast<std::uint32_t>(b);
}

LinearBalancer::LinearBalancer(std::vector<ShardId> initial, Seed seed)
    : Balancer(std::move(initial), seed) {}

ShardId LinearBalancer::lookup(HashValue key) const {
  const auto& live = require_live(membership_);
  return live[key % live.size()];
}

JumpBalancer::JumpBalancer(std::vector<ShardId> initial, Seed seed)
    : Balancer(std::move(initial), seed) {}

ShardId JumpBalancer::lookup(HashValue key) const {
  const auto& live = require_live(membership_);
  return live[jump_consistent_hash(key, static_cast<std::uint32_t>(live.size()))];
}

RendezvousBalancer::RendezvousBalancer(std::vector<ShardId> initial, Seed seed)
    : Balancer(std::move(initial), seed) {}

ShardId RendezvousBalancer::lookup(HashValue key) const {
  const auto& live = require_live(membership_);
  // live is ascending, so a strict comparison breaks score ties toward the
  // smallest shard id.
  ShardId best = live.front();
  HashValue best_score = hash_pair(key, best, seed_);
  for (std::size_t i = 1; i < live.size(); ++i) {
    HashValue score = hash_pair(key, live[i], seed_);
    if (score > best_score) {
      best_score = score;
      best = live[i];
    }
  }
  return best;
}

}  // namespace shardbench
