#include <algorithm>
#include <numeric>
#include <string>

#include "shardbench/balancers.hpp"

namespace shardbench {
namespace {

constexpr std::uint64_t kEntryTag = 0x414E4348454E5431ull;
constexpr std::uint64_t kHopTag = 0x414E4348484F5031ull;

}  // namespace

AnchorBalancer::AnchorBalancer(std::vector<ShardId> initial, std::uint32_t capacity, Seed seed)
    : Balancer(std::move(initial), seed),
      capacity_(capacity),
      live_count_(capacity),
      sizes_(capacity, 0),
      working_(capacity),
      slot_of_(capacity),
      successor_(capacity),
      entry_seed_{mix64(seed.value ^ kEntryTag)},
      hop_seed_{mix64(seed.value ^ kHopTag)} {
  if (capacity_ == 0) {
    throw Error(Errc::kConfiguration, "anchor capacity must be positive");
  }
  if (membership_.size() > capacity_) {
    throw Error(Errc::kCapacity, "more shards than anchor buckets");
  }
  if (!membership_.live().empty() && membership_.live().back() >= capacity_) {
    throw Error(Errc::kInvalidArgument, "anchor shard ids must be below the capacity");
  }
  std::iota(working_.begin(), working_.end(), ShardId{0});
  std::iota(slot_of_.begin(), slot_of_.end(), std::uint32_t{0});
  std::iota(successor_.begin(), successor_.end(), ShardId{0});
  // Start from the full anchor set and retire the unused buckets from the
  // top down, so the revival stack hands back the smallest absent id first.
  for (std::uint32_t id = capacity_; id-- > 0;) {
    if (!membership_.is_live(id)) remove_bucket(id);
  }
}

void AnchorBalancer::remove_bucket(ShardId bucket) {
  removal_stack_.push_back(bucket);
  --live_count_;
  sizes_[bucket] = live_count_;
  working_[slot_of_[bucket]] = working_[live_count_];
  slot_of_[working_[live_count_]] = slot_of_[bucket];
  successor_[bucket] = working_[slot_of_[bucket]];
}

ShardId AnchorBalancer::revive_bucket() {
  const ShardId bucket = removal_stack_.back();
  removal_stack_.pop_back();
  sizes_[bucket] = 0;
  slot_of_[working_[live_count_]] = live_count_;
  working_[slot_of_[bucket]] = bucket;
  successor_[bucket] = bucket;
  ++live_count_;
  return bucket;
}

ShardId AnchorBalancer::peek_next() const {
  if (removal_stack_.empty()) {
    throw Error(Errc::kCapacity, "anchor working set is full");
  }
  return removal_stack_.back();
}

ShardId AnchorBalancer::add_next() {
  const ShardId revived = peek_next();
  membership_.add_shards(std::span<const ShardId>(&revived, 1));
  revive_bucket();
  return revived;
}

void AnchorBalancer::validate_add(std::span<const ShardId> ids) const {
  if (ids.size() > removal_stack_.size()) {
    throw Error(Errc::kCapacity, "anchor working set is full");
  }
  // Additions revive buckets in reverse removal order; the batch must be
  // exactly the top of the stack (in any order within the batch).
  std::vector<ShardId> expected(removal_stack_.end() - ids.size(), removal_stack_.end());
  std::sort(expected.begin(), expected.end());
  std::vector<ShardId> batch(ids.begin(), ids.end());
  std::sort(batch.begin(), batch.end());
  if (batch != expected) {
    throw Error(Errc::kInvalidArgument,
                "anchor revives buckets in stack order; next batch must be the most "
                "recently removed ids");
  }
}

void AnchorBalancer::on_add(std::span<const ShardId> ids) {
  for (std::size_t i = 0; i < ids.size(); ++i) revive_bucket();
}

void AnchorBalancer::on_remove(std::span<const ShardId> ids) {
  for (ShardId id : ids) remove_bucket(id);
}

ShardId AnchorBalancer::lookup(HashValue key) const {
  if (live_count_ == 0) {
    throw Error(Errc::kPlacementImpossible, "no live shards");
  }
  ShardId bucket = static_cast<ShardId>(hash_pair(key, 0, entry_seed_) % capacity_);
  while (sizes_[bucket] > 0) {  // bucket was removed
    // Re-hash into the working set recorded at this bucket's removal; hops
    // through successors resolve buckets that had left it even earlier.
    ShardId h = static_cast<ShardId>(hash_pair(bucket, key, hop_seed_) % sizes_[bucket]);
    while (sizes_[h] >= sizes_[bucket]) {
      h = successor_[h];
    }
    bucket = h;
  }
  return bucket;
}

}  // namespace shardbench
