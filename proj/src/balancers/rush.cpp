#include <algorithm>

#include "shardbench/balancers.hpp"

namespace shardbench {
namespace {

constexpr std::uint64_t kDescendTag = 0x5255534844534331ull;
constexpr std::uint64_t kPickTag = 0x5255534850434B31ull;

void insert_sorted(std::vector<ShardId>& v, ShardId id) {
  v.insert(std::lower_bound(v.begin(), v.end(), id), id);
}

}  // namespace

RushBalancer::RushBalancer(std::vector<ShardId> initial, Seed seed)
    : Balancer(std::move(initial), seed),
      descend_seed_{mix64(seed.value ^ kDescendTag)},
      pick_seed_{mix64(seed.value ^ kPickTag)} {
  if (!membership_.live().empty()) {
    epochs_.push_back({membership_.live(), membership_.live()});
  }
}

void RushBalancer::on_add(std::span<const ShardId> ids) {
  std::vector<ShardId> fresh;
  for (ShardId id : ids) {
    bool revived = false;
    for (Epoch& epoch : epochs_) {
      if (std::binary_search(epoch.members.begin(), epoch.members.end(), id)) {
        insert_sorted(epoch.live, id);
        revived = true;
        break;
      }
    }
    if (!revived) fresh.push_back(id);
  }
  if (!fresh.empty()) {
    epochs_.push_back({fresh, fresh});
  }
}

void RushBalancer::on_remove(std::span<const ShardId> ids) {
  for (ShardId id : ids) {
    for (Epoch& epoch : epochs_) {
      auto it = std::lower_bound(epoch.live.begin(), epoch.live.end(), id);
      if (it != epoch.live.end() && *it == id) {
        epoch.live.erase(it);
        break;
      }
    }
  }
}

ShardId RushBalancer::lookup(HashValue key) const {
  std::size_t total = 0;
  for (const Epoch& epoch : epochs_) total += epoch.live.size();
  if (total == 0) {
    throw Error(Errc::kPlacementImpossible, "no live shards");
  }

  // Walk newest to oldest: keep the key here with probability equal to this
  // epoch's share of the live shards seen so far, else descend.
  std::size_t older = total;
  for (std::size_t j = epochs_.size(); j-- > 0;) {
    const Epoch& epoch = epochs_[j];
    const std::size_t weight = epoch.live.size();
    older -= weight;
    if (weight == 0) continue;
    if (older > 0) {
      const HashValue draw = hash_pair(key, j, descend_seed_);
      const auto lhs = static_cast<unsigned __int128>(draw) * (weight + older);
      const auto rhs = static_cast<unsigned __int128>(weight) << 64;
      if (lhs >= rhs) continue;  // descend to older epochs
    }
    return epoch.live[hash_pair(key, j, pick_seed_) % weight];
  }
  // Unreachable: the oldest nonempty epoch always takes the key.
  throw Error(Errc::kPlacementImpossible, "no live shards");
}

}  // namespace shardbench
