#include "shardbench/rebalance.hpp"

#include <algorithm>
#include <limits>

namespace shardbench {
namespace {

constexpr std::uint64_t kExternalKeyTagLo = 0x1357FD0213F0A201ull;
constexpr std::uint64_t kExternalKeyTagHi = 0x1357FD0213F0A202ull;
constexpr std::uint64_t kEtalonTagLo = 0x1357FD0213F0A203ull;
constexpr std::uint64_t kEtalonTagHi = 0x1357FD0213F0A204ull;

void write_be(std::uint64_t v, std::uint8_t* out) {
  for (int i = 7; i >= 0; --i) {
    out[7 - i] = static_cast<std::uint8_t>(v >> (8 * i));
  }
}

std::array<std::uint8_t, 16> make_uuid(std::uint64_t index, std::uint64_t tag_lo,
                                       std::uint64_t tag_hi, Seed seed) {
  std::array<std::uint8_t, 16> bytes;
  write_be(hash_pair(index, tag_hi, seed), bytes.data());
  write_be(hash_pair(index, tag_lo, seed), bytes.data() + 8);
  bytes[6] = static_cast<std::uint8_t>((bytes[6] & 0x0F) | 0x40);  // version 4
  bytes[8] = static_cast<std::uint8_t>((bytes[8] & 0x3F) | 0x80);  // variant
  return bytes;
}

}  // namespace

RecordPopulation RecordPopulation::generate(std::size_t count, Seed workload_seed) {
  RecordPopulation population;
  population.records_.reserve(count);
  population.by_key_.reserve(count * 2);
  for (std::size_t i = 0; i < count; ++i) {
    Record record;
    record.etalon_id = make_uuid(i, kEtalonTagLo, kEtalonTagHi, workload_seed);
    record.external_key = make_uuid(i, kExternalKeyTagLo, kExternalKeyTagHi, workload_seed);
    record.key = hash64(record.external_key, workload_seed);
    population.by_key_[record.key].push_back(static_cast<std::uint32_t>(i));
    population.records_.push_back(record);
  }
  return population;
}

const std::vector<std::uint32_t>& RecordPopulation::records_with_key(HashValue key) const {
  auto it = by_key_.find(key);
  return it == by_key_.end() ? no_records_ : it->second;
}

Assignment distribute(const RecordPopulation& population, const Balancer& balancer) {
  Assignment assignment;
  assignment.owner.reserve(population.size());
  for (const Record& record : population.records()) {
    assignment.owner.push_back(balancer.lookup(record.key));
  }
  return assignment;
}

DistributionStats compute_stats(const RecordPopulation& population, const Assignment& assignment,
                                const std::vector<ShardId>& live_shards) {
  DistributionStats stats;
  stats.shard_ids = live_shards;
  stats.counts.assign(live_shards.size(), 0);
  for (std::size_t i = 0; i < population.size(); ++i) {
    auto it = std::lower_bound(live_shards.begin(), live_shards.end(), assignment.owner[i]);
    if (it == live_shards.end() || *it != assignment.owner[i]) {
      throw Error(Errc::kInvalidArgument, "assignment references a shard outside the live set");
    }
    ++stats.counts[static_cast<std::size_t>(it - live_shards.begin())];
  }
  if (stats.counts.empty()) return stats;

  // Exact integer sums; the single final division keeps the result
  // bit-reproducible across platforms.
  std::uint64_t sum = 0;
  unsigned __int128 sum_sq = 0;
  stats.min_count = std::numeric_limits<std::uint64_t>::max();
  for (std::uint64_t c : stats.counts) {
    sum += c;
    sum_sq += static_cast<unsigned __int128>(c) * c;
    stats.min_count = std::min(stats.min_count, c);
    stats.max_count = std::max(stats.max_count, c);
  }
  const auto m = static_cast<std::uint64_t>(stats.counts.size());
  stats.mean = static_cast<double>(sum) / static_cast<double>(m);
  const unsigned __int128 numerator =
      sum_sq * m - static_cast<unsigned __int128>(sum) * sum;  // m * sum((c - mean)^2)
  stats.variance = static_cast<double>(numerator) / (static_cast<double>(m) * m);
  return stats;
}

MigrationPlan plan_migration(const RecordPopulation& population, const Assignment& old_assignment,
                             const Balancer& new_balancer) {
  if (old_assignment.owner.size() != population.size()) {
    throw Error(Errc::kInvalidArgument, "assignment does not cover the population");
  }
  MigrationPlan plan;
  for (std::size_t i = 0; i < population.size(); ++i) {
    const HashValue key = population.records()[i].key;
    // Records sharing a key (vanishingly rare) share an owner and one move.
    if (population.records_with_key(key).front() != i) continue;
    const ShardId now = old_assignment.owner[i];
    const ShardId next = new_balancer.lookup(key);
    if (now != next) {
      plan.moves.push_back({key, now, next});
    }
  }
  return plan;
}

std::uint64_t optimal_moves(const RecordPopulation& population, const Assignment& old_assignment,
                            std::span<const ShardId> removed, std::size_t added_count,
                            std::size_t live_after) {
  std::vector<ShardId> removed_sorted(removed.begin(), removed.end());
  std::sort(removed_sorted.begin(), removed_sorted.end());
  std::uint64_t on_removed = 0;
  for (std::size_t i = 0; i < old_assignment.owner.size(); ++i) {
    if (std::binary_search(removed_sorted.begin(), removed_sorted.end(),
                           old_assignment.owner[i])) {
      ++on_removed;
    }
  }
  std::uint64_t inflow = 0;
  if (added_count > 0) {
    if (live_after == 0) {
      throw Error(Errc::kInvalidArgument, "no live shards after the change");
    }
    const std::uint64_t remaining = population.size() - on_removed;
    const auto numerator = static_cast<unsigned __int128>(remaining) * added_count;
    inflow = static_cast<std::uint64_t>((numerator + live_after - 1) / live_after);
  }
  return on_removed + inflow;
}

void apply_plan(const RecordPopulation& population, Assignment& assignment,
                const MigrationPlan& plan) {
  for (const Move& move : plan.moves) {
    const auto& indices = population.records_with_key(move.key);
    if (indices.empty()) {
      throw Error(Errc::kInconsistentPlan, "plan references a key outside the population");
    }
    for (std::uint32_t index : indices) {
      if (assignment.owner[index] != move.from) {
        throw Error(Errc::kInconsistentPlan, "plan `from` does not match the current owner");
      }
      assignment.owner[index] = move.to;
    }
  }
}

void set_ratio(RebalanceReport& report) {
  report.ratio_infinite = false;
  if (report.optimal == 0) {
    if (report.moved == 0) {
      report.ratio = 1.0;
    } else {
      report.ratio = std::numeric_limits<double>::infinity();
      report.ratio_infinite = true;
    }
    return;
  }
  report.ratio = static_cast<double>(report.moved) / static_cast<double>(report.optimal);
}

}  // namespace shardbench
