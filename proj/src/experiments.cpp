#include "shardbench/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace shardbench {
namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kTrialTag = 0x5452AA017BD541C3ull;
constexpr std::uint64_t kDropTag = 0x44524F5053454C31ull;

volatile std::uint64_t g_lookup_sink = 0;  // keeps timed lookups observable

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Seed trial_seed(Seed base, std::uint32_t trial) {
  return Seed{hash_pair(base.value, trial, Seed{kTrialTag})};
}

/// The shards dropped in one trial; identical for every algorithm so the
/// rows stay comparable.
std::vector<ShardId> select_drop_set(const std::vector<ShardId>& live, std::uint32_t count,
                                     RemovalMode mode, Seed seed) {
  std::vector<ShardId> picked;
  if (mode == RemovalMode::kHighestIds) {
    picked.assign(live.end() - count, live.end());
    return picked;
  }
  std::vector<ShardId> order = live;
  std::sort(order.begin(), order.end(), [&](ShardId a, ShardId b) {
    const HashValue ha = hash_pair(a, kDropTag, seed);
    const HashValue hb = hash_pair(b, kDropTag, seed);
    return ha != hb ? ha < hb : a < b;
  });
  picked.assign(order.begin(), order.begin() + count);
  std::sort(picked.begin(), picked.end());
  return picked;
}

struct TimedDistribute {
  Assignment assignment;
  double mean_lookup_ns = 0.0;
};

TimedDistribute timed_distribute(const RecordPopulation& population, const Balancer& balancer) {
  TimedDistribute out;
  out.assignment.owner.reserve(population.size());
  std::uint64_t sink = 0;
  const auto start = Clock::now();
  for (const Record& record : population.records()) {
    const ShardId owner = balancer.lookup(record.key);
    sink += owner;
    out.assignment.owner.push_back(owner);
  }
  const double elapsed = seconds_since(start);
  g_lookup_sink = sink;
  out.mean_lookup_ns = population.size() == 0
                           ? 0.0
                           : elapsed * 1e9 / static_cast<double>(population.size());
  return out;
}

std::vector<ShardId> node_shards(std::uint32_t node, std::uint32_t shards_per_node) {
  std::vector<ShardId> ids(shards_per_node);
  std::iota(ids.begin(), ids.end(), (node - 1) * shards_per_node);
  return ids;
}

std::vector<std::uint64_t> universe_counts(const RecordPopulation& population,
                                           const Assignment& assignment,
                                           const std::vector<ShardId>& universe) {
  std::vector<std::uint64_t> counts(universe.size(), 0);
  for (std::size_t i = 0; i < population.size(); ++i) {
    auto it = std::lower_bound(universe.begin(), universe.end(), assignment.owner[i]);
    ++counts[static_cast<std::size_t>(it - universe.begin())];
  }
  return counts;
}

Grade grade_relative(double value, double best, double high, double medium) {
  double ratio;
  if (best > 0.0) {
    ratio = value / best;
  } else {
    ratio = value == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  if (ratio <= high) return Grade::kHigh;
  if (ratio <= medium) return Grade::kMedium;
  return Grade::kLow;
}

}  // namespace

std::string_view to_string(RemovalMode mode) {
  return mode == RemovalMode::kRandom ? "random" : "highest-ids";
}

std::optional<RemovalMode> removal_mode_from_string(std::string_view name) {
  if (name == "random") return RemovalMode::kRandom;
  if (name == "highest-ids" || name == "highest") return RemovalMode::kHighestIds;
  return std::nullopt;
}

std::string_view to_string(Grade grade) {
  switch (grade) {
    case Grade::kLow: return "Low";
    case Grade::kMedium: return "Medium";
    case Grade::kHigh: return "High";
  }
  return "?";
}

std::optional<Grade> grade_from_string(std::string_view name) {
  if (name == "Low" || name == "low") return Grade::kLow;
  if (name == "Medium" || name == "medium") return Grade::kMedium;
  if (name == "High" || name == "high") return Grade::kHigh;
  return std::nullopt;
}

void ExperimentConfig::validate_simulation() const {
  if (algorithms.empty()) {
    throw Error(Errc::kConfiguration, "no algorithms selected");
  }
  if (record_count == 0) {
    throw Error(Errc::kConfiguration, "record count must be positive");
  }
  if (initial_shards == 0) {
    throw Error(Errc::kConfiguration, "shard count must be positive");
  }
  if (shards_to_drop >= initial_shards) {
    throw Error(Errc::kConfiguration, "must drop fewer shards than exist");
  }
  if (trials == 0) {
    throw Error(Errc::kConfiguration, "trial count must be positive");
  }
}

void ExperimentConfig::validate_node_walk() const {
  if (algorithms.empty()) {
    throw Error(Errc::kConfiguration, "no algorithms selected");
  }
  if (record_count == 0) {
    throw Error(Errc::kConfiguration, "record count must be positive");
  }
  if (shards_per_node == 0) {
    throw Error(Errc::kConfiguration, "shards per node must be positive");
  }
  if (node_count < 4) {
    throw Error(Errc::kConfiguration, "the walk removes three nodes; need at least four");
  }
}

std::vector<Table1Row> run_simulation_experiment(const ExperimentConfig& config) {
  config.validate_simulation();

  std::vector<Table1Row> rows;
  rows.reserve(config.algorithms.size());
  for (Algorithm algorithm : config.algorithms) {
    rows.push_back({algorithm});
  }

  for (std::uint32_t trial = 0; trial < config.trials; ++trial) {
    const Seed seed = trial_seed(config.seed, trial);
    const RecordPopulation population = RecordPopulation::generate(config.record_count, seed);
    const Membership initial = Membership::dense(config.initial_shards);
    const std::vector<ShardId> drop =
        select_drop_set(initial.live(), config.shards_to_drop, config.removal_mode, seed);

    for (std::size_t i = 0; i < config.algorithms.size(); ++i) {
      auto balancer = Balancer::create(config.algorithms[i], initial.live(), config.params, seed);
      auto [assignment, lookup_ns] = timed_distribute(population, *balancer);
      const DistributionStats before = compute_stats(population, assignment, balancer->shards());

      if (!drop.empty()) balancer->remove_shards(drop);
      const MigrationPlan plan = plan_migration(population, assignment, *balancer);
      const std::uint64_t optimal =
          optimal_moves(population, assignment, drop, 0, balancer->shards().size());
      apply_plan(population, assignment, plan);
      const DistributionStats after = compute_stats(population, assignment, balancer->shards());

      RebalanceReport report;
      report.moved = plan.moves.size();
      report.optimal = optimal;
      set_ratio(report);

      rows[i].lookup_ns += lookup_ns;
      rows[i].variance_before += before.variance;
      rows[i].variance_after += after.variance;
      rows[i].moved_ratio += report.ratio;
      rows[i].ratio_infinite = rows[i].ratio_infinite || report.ratio_infinite;
    }
  }

  const auto trials = static_cast<double>(config.trials);
  for (Table1Row& row : rows) {
    row.lookup_ns /= trials;
    row.variance_before /= trials;
    row.variance_after /= trials;
    row.moved_ratio /= trials;
  }
  return rows;
}

std::vector<TimingRow> run_timing_experiment(const ExperimentConfig& config) {
  config.validate_simulation();

  const RecordPopulation population =
      RecordPopulation::generate(config.record_count, config.seed);
  const Membership membership = Membership::dense(config.initial_shards);

  std::vector<TimingRow> rows;
  rows.reserve(config.algorithms.size());
  for (Algorithm algorithm : config.algorithms) {
    auto balancer = Balancer::create(algorithm, membership.live(), config.params, config.seed);
    const auto& records = population.records();
    const std::uint64_t total = std::max<std::uint64_t>(config.timing_lookups, records.size());

    std::uint64_t sink = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {  // warm-up pass
      sink += balancer->lookup(records[i].key);
    }
    const auto start = Clock::now();
    for (std::uint64_t i = 0; i < total; ++i) {
      sink += balancer->lookup(records[i % records.size()].key);
    }
    const double elapsed = seconds_since(start);
    g_lookup_sink = sink;
    rows.push_back({algorithm, elapsed * 1e9 / static_cast<double>(total)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const TimingRow& a, const TimingRow& b) {
    return a.mean_lookup_ns < b.mean_lookup_ns;
  });
  return rows;
}

std::vector<NodeWalkTrace> run_node_walk(const ExperimentConfig& config) {
  config.validate_node_walk();

  const RecordPopulation population =
      RecordPopulation::generate(config.record_count, config.seed);
  const std::uint32_t universe_size = config.node_count * config.shards_per_node;
  const Membership initial = Membership::dense(universe_size);

  // Remove nodes 1..3 one by one, then revive them newest-first so the
  // anchor revival stack hands back exactly the departed node's shards.
  struct WalkStep {
    bool remove;
    std::uint32_t node;
  };
  const std::array<WalkStep, 6> walk = {{{true, 1}, {true, 2}, {true, 3},
                                         {false, 3}, {false, 2}, {false, 1}}};

  std::vector<NodeWalkTrace> traces;
  traces.reserve(config.algorithms.size());
  for (Algorithm algorithm : config.algorithms) {
    NodeWalkTrace trace;
    trace.algorithm = algorithm;
    trace.shard_universe = initial.live();

    auto balancer = Balancer::create(algorithm, initial.live(), config.params, config.seed);
    Assignment assignment = distribute(population, *balancer);
    const Assignment initial_assignment = assignment;
    trace.initial_counts = universe_counts(population, assignment, trace.shard_universe);

    for (const WalkStep& step : walk) {
      const std::vector<ShardId> batch = node_shards(step.node, config.shards_per_node);
      RebalanceReport report;
      report.label = (step.remove ? "remove-node-" : "add-node-") + std::to_string(step.node);
      report.stats_before = compute_stats(population, assignment, balancer->shards());

      const auto start = Clock::now();
      if (step.remove) {
        balancer->remove_shards(batch);
      } else {
        balancer->add_shards(batch);
      }
      const MigrationPlan plan = plan_migration(population, assignment, *balancer);
      report.optimal = step.remove
                           ? optimal_moves(population, assignment, batch, 0,
                                           balancer->shards().size())
                           : optimal_moves(population, assignment, {}, batch.size(),
                                           balancer->shards().size());
      apply_plan(population, assignment, plan);
      report.elapsed_seconds = seconds_since(start);

      report.moved = plan.moves.size();
      set_ratio(report);
      report.stats_after = compute_stats(population, assignment, balancer->shards());

      NodeWalkStep out;
      out.label = report.label;
      out.counts = universe_counts(population, assignment, trace.shard_universe);
      out.report = std::move(report);
      trace.steps.push_back(std::move(out));
    }

    trace.roundtrip_restored = assignment.owner == initial_assignment.owner;
    traces.push_back(std::move(trace));
  }
  return traces;
}

std::vector<GradeRow> grade(const std::vector<Table1Row>& rows, const GradeThresholds& thresholds) {
  if (rows.empty()) {
    throw Error(Errc::kIncompleteInput, "no rows to grade");
  }
  double best_variance = std::numeric_limits<double>::max();
  double best_time = std::numeric_limits<double>::max();
  for (const Table1Row& row : rows) {
    best_variance = std::min(best_variance, (row.variance_before + row.variance_after) / 2.0);
    best_time = std::min(best_time, row.lookup_ns);
  }

  std::vector<GradeRow> grades;
  grades.reserve(rows.size());
  for (const Table1Row& row : rows) {
    GradeRow out;
    out.algorithm = row.algorithm;
    out.uniformity = grade_relative((row.variance_before + row.variance_after) / 2.0,
                                    best_variance, thresholds.uniformity_high,
                                    thresholds.uniformity_medium);
    if (row.ratio_infinite) {
      out.rebalancing = Grade::kLow;
    } else if (row.moved_ratio <= thresholds.rebalance_high) {
      out.rebalancing = Grade::kHigh;
    } else if (row.moved_ratio <= thresholds.rebalance_medium) {
      out.rebalancing = Grade::kMedium;
    } else {
      out.rebalancing = Grade::kLow;
    }
    out.lookup_speed =
        grade_relative(row.lookup_ns, best_time, thresholds.speed_high, thresholds.speed_medium);
    grades.push_back(out);
  }
  return grades;
}

}  // namespace shardbench
