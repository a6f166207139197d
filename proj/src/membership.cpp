#include "shardbench/membership.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace shardbench {
namespace {

std::vector<ShardId> sorted_unique(std::vector<ShardId> ids) {
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw Error(Errc::kDuplicateShard, "duplicate shard id in set");
  }
  return ids;
}

}  // namespace

Membership::Membership(std::vector<ShardId> initial)
    : initial_(sorted_unique(std::move(initial))), live_(initial_) {}

Membership Membership::dense(std::uint32_t n) {
  std::vector<ShardId> ids(n);
  std::iota(ids.begin(), ids.end(), ShardId{0});
  return Membership(std::move(ids));
}

bool Membership::is_live(ShardId id) const {
  return std::binary_search(live_.begin(), live_.end(), id);
}

void Membership::add_shards(std::span<const ShardId> ids) {
  std::vector<ShardId> batch = sorted_unique({ids.begin(), ids.end()});
  for (ShardId id : batch) {
    if (is_live(id)) {
      throw Error(Errc::kDuplicateShard, "shard " + std::to_string(id) + " is already live");
    }
  }
  std::vector<ShardId> merged;
  merged.reserve(live_.size() + batch.size());
  std::merge(live_.begin(), live_.end(), batch.begin(), batch.end(), std::back_inserter(merged));
  live_ = std::move(merged);
  history_.push_back({Event::Kind::kAdd, std::move(batch)});
}

void Membership::remove_shards(std::span<const ShardId> ids) {
  std::vector<ShardId> batch = sorted_unique({ids.begin(), ids.end()});
  for (ShardId id : batch) {
    if (!is_live(id)) {
      throw Error(Errc::kUnknownShard, "shard " + std::to_string(id) + " is not live");
    }
  }
  std::vector<ShardId> remaining;
  remaining.reserve(live_.size() - batch.size());
  std::set_difference(live_.begin(), live_.end(), batch.begin(), batch.end(),
                      std::back_inserter(remaining));
  live_ = std::move(remaining);
  history_.push_back({Event::Kind::kRemove, std::move(batch)});
}

}  // namespace shardbench
