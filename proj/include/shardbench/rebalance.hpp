#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "shardbench/balancers.hpp"
#include "shardbench/types.hpp"

namespace shardbench {

/// Simulated master-data record: a golden-record id and its source-system
/// external key (1:1), plus the placement key hashed from the external key.
struct Record {
  std::array<std::uint8_t, 16> etalon_id;     // UUID bytes
  std::array<std::uint8_t, 16> external_key;  // UUID bytes
  HashValue key;
};

class RecordPopulation {
 public:
  RecordPopulation() = default;

  /// Deterministically generates `count` records; the placement key of each
  /// record is hash64(external_key bytes, workload_seed).
  static RecordPopulation generate(std::size_t count, Seed workload_seed);

  const std::vector<Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  /// Indices of the records carrying `key` (almost always exactly one).
  const std::vector<std::uint32_t>& records_with_key(HashValue key) const;

 private:
  std::vector<Record> records_;
  std::unordered_map<HashValue, std::vector<std::uint32_t>> by_key_;
  std::vector<std::uint32_t> no_records_;
};

/// Owner shard per record, aligned with RecordPopulation::records().
struct Assignment {
  std::vector<ShardId> owner;
};

struct DistributionStats {
  std::vector<ShardId> shard_ids;       // the live shards the stats cover
  std::vector<std::uint64_t> counts;    // per-shard record counts, incl. zeros
  double mean = 0.0;
  double variance = 0.0;                // population variance of the counts
  std::uint64_t min_count = 0;
  std::uint64_t max_count = 0;
};

struct Move {
  HashValue key;
  ShardId from;
  ShardId to;
};

/// The exact set of per-key moves implied by a membership change: every key
/// whose lookup under the new balancer differs from its old owner, once.
struct MigrationPlan {
  std::vector<Move> moves;
};

struct RebalanceReport {
  std::string label;
  std::uint64_t moved = 0;
  std::uint64_t optimal = 0;
  double ratio = 1.0;          // moved / optimal; see ratio_infinite
  bool ratio_infinite = false; // optimal == 0 but records moved anyway
  DistributionStats stats_before;
  DistributionStats stats_after;
  double elapsed_seconds = 0.0;
};

/// Assigns every record through the balancer. Throws kPlacementImpossible
/// when the balancer has no live shard.
Assignment distribute(const RecordPopulation& population, const Balancer& balancer);

/// Per-shard counts over the balancer's current live set (zero-count shards
/// included), plus mean / population variance / min / max.
DistributionStats compute_stats(const RecordPopulation& population, const Assignment& assignment,
                                const std::vector<ShardId>& live_shards);

/// Keys whose owner under `new_balancer` differs from `old_assignment`.
MigrationPlan plan_migration(const RecordPopulation& population, const Assignment& old_assignment,
                             const Balancer& new_balancer);

/// Minimum number of records that must move for the membership change:
/// every record on a removed shard, plus the ceil of the added shards'
/// proportional share of the remaining records.
std::uint64_t optimal_moves(const RecordPopulation& population, const Assignment& old_assignment,
                            std::span<const ShardId> removed, std::size_t added_count,
                            std::size_t live_after);

/// Applies the plan in place. Throws kInconsistentPlan when a move's `from`
/// does not match the current owner or its key is not in the population.
void apply_plan(const RecordPopulation& population, Assignment& assignment,
                const MigrationPlan& plan);

/// moved/optimal with the zero-optimal guard: 0/0 reports ratio 1,
/// moved > 0 with optimal 0 reports the infinite marker.
void set_ratio(RebalanceReport& report);

}  // namespace shardbench
