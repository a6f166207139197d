#pragma once

#include <memory>
#include <span>
#include <vector>

#include "shardbench/hash.hpp"
#include "shardbench/membership.hpp"
#include "shardbench/types.hpp"

namespace shardbench {

/// Jump consistent hash (Lamport & Veach recurrence). Maps a key to a bucket
/// index in [0, buckets) in O(log buckets) expected iterations. Appending a
/// bucket moves keys only onto the new bucket:
///   jump_consistent_hash(k, n + 1) is either jump_consistent_hash(k, n) or n.
/// Throws kPlacementImpossible when buckets == 0.
std::uint32_t jump_consistent_hash(std::uint64_t key, std::uint32_t buckets);

/// Uniform interface over the seven shard-placement algorithms: lookup,
/// add shards, remove shards, enumerate shards.
///
/// Lookups are const and touch no mutable state, so any number of readers may
/// run concurrently on an unchanging balancer. Mutations require exclusive
/// access and leave the balancer in the new observable state (single writer,
/// multiple readers, no torn observations).
class Balancer {
 public:
  virtual ~Balancer() = default;

  virtual Algorithm algorithm() const = 0;

  /// Maps a key to a live shard. Throws kPlacementImpossible when no shard
  /// is live.
  virtual ShardId lookup(HashValue key) const = 0;

  /// Adds one batch of shards. Throws kDuplicateShard on already-live ids;
  /// AnchorHash additionally requires the batch to match its revival stack
  /// and throws kCapacity when full.
  void add_shards(std::span<const ShardId> ids);

  /// Removes one batch of live shards. Throws kUnknownShard on non-live ids.
  void remove_shards(std::span<const ShardId> ids);

  /// Live shard ids, sorted ascending.
  const std::vector<ShardId>& shards() const { return membership_.live(); }
  const Membership& membership() const { return membership_; }
  Seed seed() const { return seed_; }

  /// Builds a balancer from an initial shard set (empty history).
  static std::unique_ptr<Balancer> create(Algorithm algorithm, std::span<const ShardId> initial,
                                          const BalancerParams& params = {}, Seed seed = {});

  /// Builds a balancer by replaying a membership's full mutation history, so
  /// that history-dependent algorithms reconstruct their exact state.
  static std::unique_ptr<Balancer> create(Algorithm algorithm, const Membership& membership,
                                          const BalancerParams& params = {}, Seed seed = {});

 protected:
  Balancer(std::vector<ShardId> initial, Seed seed)
      : membership_(std::move(initial)), seed_(seed) {}

  virtual void validate_add(std::span<const ShardId> ids) const;
  virtual void on_add(std::span<const ShardId>) {}
  virtual void on_remove(std::span<const ShardId>) {}

  Membership membership_;
  Seed seed_;
};

/// Uniform one-shot facade: builds the algorithm's state from the membership
/// (including history) and resolves one key. Prefer a long-lived Balancer for
/// bulk lookups.
ShardId balancer_lookup(Algorithm algorithm, const Membership& membership,
                        const BalancerParams& params, Seed seed, HashValue key);

/// key mod n over the sorted live id list (the modulo scheme of hash
/// partitioning; sorting restores dense indexes over sparse ids).
class LinearBalancer : public Balancer {
 public:
  LinearBalancer(std::vector<ShardId> initial, Seed seed);
  Algorithm algorithm() const override { return Algorithm::kLinear; }
  ShardId lookup(HashValue key) const override;
};

/// jump_consistent_hash index into the sorted live id list. Dense renumbering
/// makes intermediate removals well-defined; it also makes them expensive,
/// since every index past the hole shifts.
class JumpBalancer : public Balancer {
 public:
  JumpBalancer(std::vector<ShardId> initial, Seed seed);
  Algorithm algorithm() const override { return Algorithm::kJump; }
  ShardId lookup(HashValue key) const override;
};

/// Highest-random-weight hashing: the key goes to the live shard with the
/// largest hash_pair(key, shard) score. Equal scores (probability ~2^-64)
/// resolve toward the smallest shard id.
class RendezvousBalancer : public Balancer {
 public:
  RendezvousBalancer(std::vector<ShardId> initial, Seed seed);
  Algorithm algorithm() const override { return Algorithm::kRendezvous; }
  ShardId lookup(HashValue key) const override;
};

/// Consistent hashing ring with a fixed number of points per shard. A key is
/// owned by the first point at or clockwise after it, wrapping at the top of
/// the 64-bit circle. Colliding point positions sort by (shard, replica).
class ConsistentRingBalancer : public Balancer {
 public:
  struct Point {
    HashValue position;
    ShardId shard;
    std::uint32_t replica;
  };

  ConsistentRingBalancer(std::vector<ShardId> initial, std::uint32_t points_per_shard, Seed seed);
  Algorithm algorithm() const override { return Algorithm::kConsistent; }
  ShardId lookup(HashValue key) const override;

  std::uint32_t points_per_shard() const { return points_per_shard_; }
  const std::vector<Point>& points() const { return points_; }  // sorted

 protected:
  void on_add(std::span<const ShardId> ids) override;
  void on_remove(std::span<const ShardId> ids) override;

 private:
  std::uint32_t points_per_shard_;
  std::vector<Point> points_;
};

/// Maglev lookup table: each shard walks its own permutation of the
/// prime-sized table and claims slots round-robin until every slot is owned.
/// Lookup is a single modulo. Any membership change rebuilds the table from
/// the current live set only.
class MaglevBalancer : public Balancer {
 public:
  MaglevBalancer(std::vector<ShardId> initial, std::uint32_t table_size, Seed seed);
  Algorithm algorithm() const override { return Algorithm::kMaglev; }
  ShardId lookup(HashValue key) const override;

  std::uint32_t table_size() const { return table_size_; }
  const std::vector<ShardId>& table() const { return table_; }  // empty when no shard is live

 protected:
  void validate_add(std::span<const ShardId> ids) const override;
  void on_add(std::span<const ShardId> ids) override;
  void on_remove(std::span<const ShardId> ids) override;

 private:
  void rebuild();

  std::uint32_t table_size_;
  std::vector<ShardId> table_;
};

/// RUSH_R over sub-clusters ("epochs"): every batch of ids first added in one
/// mutation forms an epoch. A lookup walks epochs newest to oldest, keeping a
/// key with probability proportional to the epoch's live share, then draws a
/// uniform member. Removal marks the id dead in its epoch; re-adding a known
/// id revives it in its original epoch, so a remove/add round trip restores
/// the exact mapping.
class RushBalancer : public Balancer {
 public:
  struct Epoch {
    std::vector<ShardId> members;  // ids added together, immutable, sorted
    std::vector<ShardId> live;     // live subset, sorted
  };

  RushBalancer(std::vector<ShardId> initial, Seed seed);
  Algorithm algorithm() const override { return Algorithm::kRush; }
  ShardId lookup(HashValue key) const override;

  const std::vector<Epoch>& epochs() const { return epochs_; }

 protected:
  void on_add(std::span<const ShardId> ids) override;
  void on_remove(std::span<const ShardId> ids) override;

 private:
  std::vector<Epoch> epochs_;
  Seed descend_seed_;
  Seed pick_seed_;
};

/// AnchorHash over a fixed anchor set of `capacity` buckets; bucket ids are
/// the shard ids and must stay below the capacity. Removal records the
/// working-set size and a successor so lookups re-hash removed buckets onto
/// live ones; additions revive the most recently removed bucket (stack
/// discipline), restoring its exact pre-removal mapping.
class AnchorBalancer : public Balancer {
 public:
  AnchorBalancer(std::vector<ShardId> initial, std::uint32_t capacity, Seed seed);
  Algorithm algorithm() const override { return Algorithm::kAnchor; }
  ShardId lookup(HashValue key) const override;

  std::uint32_t capacity() const { return capacity_; }

  /// Revives the most recently removed bucket and returns its id.
  /// Throws kCapacity when every bucket is already live.
  ShardId add_next();

  /// The bucket the next add_next() would revive.
  ShardId peek_next() const;

 protected:
  void validate_add(std::span<const ShardId> ids) const override;
  void on_add(std::span<const ShardId> ids) override;
  void on_remove(std::span<const ShardId> ids) override;

 private:
  void remove_bucket(ShardId bucket);
  ShardId revive_bucket();

  std::uint32_t capacity_;
  std::uint32_t live_count_;
  std::vector<std::uint32_t> sizes_;    // working-set size recorded at removal; 0 = live
  std::vector<ShardId> working_;        // live buckets, swap-with-last order
  std::vector<std::uint32_t> slot_of_;  // bucket -> its index in working_
  std::vector<ShardId> successor_;      // bucket -> bucket that took its slot on removal
  std::vector<ShardId> removal_stack_;
  Seed entry_seed_;
  Seed hop_seed_;
};

}  // namespace shardbench
