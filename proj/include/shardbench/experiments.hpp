#pragma once

#include <string>
#include <vector>

#include "shardbench/rebalance.hpp"
#include "shardbench/types.hpp"

namespace shardbench {

enum class RemovalMode { kRandom, kHighestIds };

std::string_view to_string(RemovalMode mode);
std::optional<RemovalMode> removal_mode_from_string(std::string_view name);

struct ExperimentConfig {
  std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::uint32_t record_count = 10'000;
  std::uint32_t initial_shards = 32;
  std::uint32_t shards_to_drop = 8;
  std::uint32_t node_count = 4;
  std::uint32_t shards_per_node = 8;
  std::uint32_t trials = 10;
  std::uint64_t timing_lookups = 1'000'000;
  Seed seed{42};
  RemovalMode removal_mode = RemovalMode::kRandom;
  BalancerParams params;

  void validate_simulation() const;  // throws kConfiguration
  void validate_node_walk() const;   // throws kConfiguration
};

/// One row of the simulation report: metrics averaged over the trials.
struct Table1Row {
  Algorithm algorithm;
  double lookup_ns = 0.0;
  double variance_before = 0.0;
  double variance_after = 0.0;
  double moved_ratio = 0.0;
  bool ratio_infinite = false;
};

/// Distribute -> drop shards -> replan, per algorithm, averaged over trials.
/// The trial index is folded into the seed; within one trial every algorithm
/// sees the same workload and the same drop set.
std::vector<Table1Row> run_simulation_experiment(const ExperimentConfig& config);

struct TimingRow {
  Algorithm algorithm;
  double mean_lookup_ns = 0.0;
};

/// Mean wall-clock per lookup at the configured shard count, warm-up
/// excluded, rows sorted fastest first. Only the ordering is meaningful.
std::vector<TimingRow> run_timing_experiment(const ExperimentConfig& config);

struct NodeWalkStep {
  std::string label;
  RebalanceReport report;                // stats + moved/optimal/ratio + time
  std::vector<std::uint64_t> counts;     // per shard of the full universe, after the step
};

struct NodeWalkTrace {
  Algorithm algorithm;
  std::vector<ShardId> shard_universe;   // node_count * shards_per_node ids
  std::vector<std::uint64_t> initial_counts;
  std::vector<NodeWalkStep> steps;       // 6: three removals, three additions
  bool roundtrip_restored = false;       // final mapping equals the initial one
};

/// Removes nodes 1..3 one by one (each node = one atomic batch of its
/// shards), then adds them back newest-first, re-planning and re-applying at
/// every step. Elapsed time per step covers planning + applying only.
std::vector<NodeWalkTrace> run_node_walk(const ExperimentConfig& config);

enum class Grade { kLow, kMedium, kHigh };

std::string_view to_string(Grade grade);
std::optional<Grade> grade_from_string(std::string_view name);

/// Relative thresholds: uniformity compares a row's mean variance against
/// the best row's, speed compares lookup time against the fastest row's,
/// rebalancing grades the moved ratio directly.
struct GradeThresholds {
  double uniformity_high = 1.3;
  double uniformity_medium = 1.6;
  double rebalance_high = 1.05;
  double rebalance_medium = 1.5;
  double speed_high = 2.0;
  double speed_medium = 50.0;
};

struct GradeRow {
  Algorithm algorithm;
  Grade uniformity;
  Grade rebalancing;
  Grade lookup_speed;
};

/// Low/Medium/High per algorithm on the three criteria.
/// Throws kIncompleteInput when rows is empty.
std::vector<GradeRow> grade(const std::vector<Table1Row>& rows,
                            const GradeThresholds& thresholds = {});

}  // namespace shardbench
