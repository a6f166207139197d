#include "shardbench.h"

#include <cstring>
#include <new>
#include <string>

#include "shardbench/balancers.hpp"
#include "shardbench/experiments.hpp"
#include "shardbench/report_io.hpp"
#include "shardbench/version.hpp"

namespace sb = shardbench;

struct sb_balancer {
  std::unique_ptr<sb::Balancer> impl;
};

namespace {

thread_local std::string t_last_error;

sb_status status_from(sb::Errc code) {
  switch (code) {
    case sb::Errc::kPlacementImpossible: return SB_ERR_PLACEMENT_IMPOSSIBLE;
    case sb::Errc::kCapacity: return SB_ERR_CAPACITY;
    case sb::Errc::kUnknownShard: return SB_ERR_UNKNOWN_SHARD;
    case sb::Errc::kDuplicateShard: return SB_ERR_DUPLICATE_SHARD;
    case sb::Errc::kConfiguration: return SB_ERR_CONFIGURATION;
    case sb::Errc::kInconsistentPlan: return SB_ERR_INCONSISTENT_PLAN;
    case sb::Errc::kIncompleteInput: return SB_ERR_INCOMPLETE_INPUT;
    case sb::Errc::kInvalidArgument: return SB_ERR_INVALID_ARGUMENT;
  }
  return SB_ERR_INTERNAL;
}

sb_status fail(sb_status status, const char* message) {
  t_last_error = message;
  return status;
}

template <typename Fn>
sb_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return SB_OK;
  } catch (const sb::Error& e) {
    t_last_error = e.what();
    return status_from(e.code());
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
    return SB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return SB_ERR_INTERNAL;
  }
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

bool valid_algorithm(sb_algorithm algorithm) {
  return algorithm >= 0 && algorithm < SB_ALG_COUNT;
}

sb::Algorithm to_cpp(sb_algorithm algorithm) {
  return static_cast<sb::Algorithm>(static_cast<int>(algorithm));
}

sb::BalancerParams to_cpp(const sb_params* params) {
  if (params == nullptr) return {};
  sb::BalancerParams out;
  out.ring_points_per_shard = params->ring_points_per_shard;
  out.maglev_table_size = params->maglev_table_size;
  out.anchor_capacity = params->anchor_capacity;
  return out;
}

sb::ExperimentConfig to_cpp(const sb_experiment_config& config) {
  sb::ExperimentConfig out;
  out.algorithms.clear();
  for (int i = 0; i < SB_ALG_COUNT; ++i) {
    if (config.algorithm_mask == 0 || (config.algorithm_mask & (1u << i)) != 0) {
      out.algorithms.push_back(to_cpp(static_cast<sb_algorithm>(i)));
    }
  }
  out.record_count = config.record_count;
  out.initial_shards = config.initial_shards;
  out.shards_to_drop = config.shards_to_drop;
  out.node_count = config.node_count;
  out.shards_per_node = config.shards_per_node;
  out.trials = config.trials;
  out.timing_lookups = config.timing_lookups;
  out.seed = sb::Seed{config.seed};
  out.removal_mode = config.removal_mode == SB_REMOVAL_HIGHEST_IDS ? sb::RemovalMode::kHighestIds
                                                                   : sb::RemovalMode::kRandom;
  out.params = to_cpp(&config.params);
  return out;
}

nlohmann::json config_to_json(const sb::ExperimentConfig& config) {
  nlohmann::json algorithms = nlohmann::json::array();
  for (sb::Algorithm a : config.algorithms) {
    algorithms.push_back(sb::to_string(a));
  }
  return {
      {"algorithms", std::move(algorithms)},
      {"record_count", config.record_count},
      {"initial_shards", config.initial_shards},
      {"shards_to_drop", config.shards_to_drop},
      {"node_count", config.node_count},
      {"shards_per_node", config.shards_per_node},
      {"trials", config.trials},
      {"timing_lookups", config.timing_lookups},
      {"removal_mode", sb::to_string(config.removal_mode)},
      {"ring_points_per_shard", config.params.ring_points_per_shard},
      {"maglev_table_size", config.params.maglev_table_size},
      {"anchor_capacity", config.params.anchor_capacity},
  };
}

sb::GradeThresholds to_cpp(const sb_grade_thresholds* thresholds) {
  if (thresholds == nullptr) return {};
  sb::GradeThresholds out;
  out.uniformity_high = thresholds->uniformity_high;
  out.uniformity_medium = thresholds->uniformity_medium;
  out.rebalance_high = thresholds->rebalance_high;
  out.rebalance_medium = thresholds->rebalance_medium;
  out.speed_high = thresholds->speed_high;
  out.speed_medium = thresholds->speed_medium;
  return out;
}

}  // namespace

extern "C" {

const char* sb_version(void) { return sb::kVersionString; }

const char* sb_status_name(sb_status status) {
  switch (status) {
    case SB_OK: return "ok";
    case SB_ERR_PLACEMENT_IMPOSSIBLE: return "placement-impossible";
    case SB_ERR_CAPACITY: return "capacity";
    case SB_ERR_UNKNOWN_SHARD: return "unknown-shard";
    case SB_ERR_DUPLICATE_SHARD: return "duplicate-shard";
    case SB_ERR_CONFIGURATION: return "configuration";
    case SB_ERR_INCONSISTENT_PLAN: return "inconsistent-plan";
    case SB_ERR_INCOMPLETE_INPUT: return "incomplete-input";
    case SB_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case SB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sb_last_error_message(void) { return t_last_error.c_str(); }

void sb_string_free(char* text) { delete[] text; }

const char* sb_algorithm_name(sb_algorithm algorithm) {
  if (!valid_algorithm(algorithm)) return nullptr;
  return sb::to_string(to_cpp(algorithm)).data();
}

sb_status sb_algorithm_from_name(const char* name, sb_algorithm* out_algorithm) {
  if (name == nullptr || out_algorithm == nullptr) {
    return fail(SB_ERR_INVALID_ARGUMENT, "null argument");
  }
  const auto algorithm = sb::algorithm_from_string(name);
  if (!algorithm) {
    return fail(SB_ERR_INVALID_ARGUMENT, "unknown algorithm name");
  }
  *out_algorithm = static_cast<sb_algorithm>(static_cast<int>(*algorithm));
  return SB_OK;
}

void sb_params_init(sb_params* params) {
  if (params == nullptr) return;
  const sb::BalancerParams defaults;
  params->ring_points_per_shard = defaults.ring_points_per_shard;
  params->maglev_table_size = defaults.maglev_table_size;
  params->anchor_capacity = defaults.anchor_capacity;
}

void sb_experiment_config_init(sb_experiment_config* config) {
  if (config == nullptr) return;
  const sb::ExperimentConfig defaults;
  config->algorithm_mask = 0;
  config->record_count = defaults.record_count;
  config->initial_shards = defaults.initial_shards;
  config->shards_to_drop = defaults.shards_to_drop;
  config->node_count = defaults.node_count;
  config->shards_per_node = defaults.shards_per_node;
  config->trials = defaults.trials;
  config->timing_lookups = defaults.timing_lookups;
  config->seed = defaults.seed.value;
  config->removal_mode = SB_REMOVAL_RANDOM;
  sb_params_init(&config->params);
}

void sb_grade_thresholds_init(sb_grade_thresholds* thresholds) {
  if (thresholds == nullptr) return;
  const sb::GradeThresholds defaults;
  thresholds->uniformity_high = defaults.uniformity_high;
  thresholds->uniformity_medium = defaults.uniformity_medium;
  thresholds->rebalance_high = defaults.rebalance_high;
  thresholds->rebalance_medium = defaults.rebalance_medium;
  thresholds->speed_high = defaults.speed_high;
  thresholds->speed_medium = defaults.speed_medium;
}

uint64_t sb_hash64(const void* data, size_t size, uint64_t seed) {
  return sb::hash64({static_cast<const std::uint8_t*>(data), size}, sb::Seed{seed});
}

uint64_t sb_hash_pair(uint64_t a, uint64_t b, uint64_t seed) {
  return sb::hash_pair(a, b, sb::Seed{seed});
}

sb_status sb_jump_consistent_hash(uint64_t key, uint32_t buckets, uint32_t* out_bucket) {
  if (out_bucket == nullptr) {
    return fail(SB_ERR_INVALID_ARGUMENT, "null output");
  }
  return guarded([&] { *out_bucket = sb::jump_consistent_hash(key, buckets); });
}

sb_status sb_balancer_create(sb_algorithm algorithm, const sb_params* params, uint64_t seed,
                             const uint32_t* shard_ids, size_t shard_count,
                             sb_balancer** out_balancer) {
  if (out_balancer == nullptr || (shard_ids == nullptr && shard_count > 0)) {
    return fail(SB_ERR_INVALID_ARGUMENT, "null argument");
  }
  if (!valid_algorithm(algorithm)) {
    return fail(SB_ERR_INVALID_ARGUMENT, "unknown algorithm");
  }
  *out_balancer = nullptr;
  return guarded([&] {
    auto impl = sb::Balancer::create(to_cpp(algorithm), {shard_ids, shard_count},
                                     to_cpp(params), sb::Seed{seed});
    *out_balancer = new sb_balancer{std::move(impl)};
  });
}

void sb_balancer_destroy(sb_balancer* balancer) { delete balancer; }

sb_status sb_balancer_lookup(const sb_balancer* balancer, uint64_t key, uint32_t* out_shard) {
  if (balancer == nullptr || out_shard == nullptr) {
    return fail(SB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] { *out_shard = balancer->impl->lookup(key); });
}

sb_status sb_balancer_add_shards(sb_balancer* balancer, const uint32_t* shard_ids,
                                 size_t shard_count) {
  if (balancer == nullptr || shard_ids == nullptr) {
    return fail(SB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] { balancer->impl->add_shards({shard_ids, shard_count}); });
}

sb_status sb_balancer_remove_shards(sb_balancer* balancer, const uint32_t* shard_ids,
                                    size_t shard_count) {
  if (balancer == nullptr || shard_ids == nullptr) {
    return fail(SB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] { balancer->impl->remove_shards({shard_ids, shard_count}); });
}

sb_status sb_balancer_shard_count(const sb_balancer* balancer, size_t* out_count) {
  if (balancer == nullptr || out_count == nullptr) {
    return fail(SB_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out_count = balancer->impl->shards().size();
  return SB_OK;
}

sb_status sb_balancer_shards(const sb_balancer* balancer, uint32_t* out_shards, size_t capacity,
                             size_t* out_count) {
  if (balancer == nullptr || out_count == nullptr || (out_shards == nullptr && capacity > 0)) {
    return fail(SB_ERR_INVALID_ARGUMENT, "null argument");
  }
  const auto& live = balancer->impl->shards();
  *out_count = live.size();
  const size_t n = live.size() < capacity ? live.size() : capacity;
  for (size_t i = 0; i < n; ++i) {
    out_shards[i] = live[i];
  }
  return SB_OK;
}

sb_status sb_anchor_add_next(sb_balancer* balancer, uint32_t* out_shard) {
  if (balancer == nullptr || out_shard == nullptr) {
    return fail(SB_ERR_INVALID_ARGUMENT, "null argument");
  }
  auto* anchor = dynamic_cast<sb::AnchorBalancer*>(balancer->impl.get());
  if (anchor == nullptr) {
    return fail(SB_ERR_INVALID_ARGUMENT, "not an AnchorHash balancer");
  }
  return guarded([&] { *out_shard = anchor->add_next(); });
}

sb_status sb_run_simulation(const sb_experiment_config* config, char** out_json, char** out_csv) {
  if (config == nullptr || out_json == nullptr) {
    return fail(SB_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out_json = nullptr;
  if (out_csv != nullptr) *out_csv = nullptr;
  return guarded([&] {
    const sb::ExperimentConfig cpp_config = to_cpp(*config);
    const auto rows = sb::run_simulation_experiment(cpp_config);
    sb::ReportMeta meta{"table1", cpp_config.seed.value, config_to_json(cpp_config)};
    *out_json = copy_string(sb::table1_to_json(rows, meta));
    if (out_csv != nullptr) *out_csv = copy_string(sb::table1_to_csv(rows));
  });
}

sb_status sb_run_timing(const sb_experiment_config* config, char** out_json) {
  if (config == nullptr || out_json == nullptr) {
    return fail(SB_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out_json = nullptr;
  return guarded([&] {
    const sb::ExperimentConfig cpp_config = to_cpp(*config);
    const auto rows = sb::run_timing_experiment(cpp_config);
    sb::ReportMeta meta{"timing", cpp_config.seed.value, config_to_json(cpp_config)};
    *out_json = copy_string(sb::timing_to_json(rows, meta));
  });
}

sb_status sb_run_node_walk(const sb_experiment_config* config, char** out_json,
                           char** out_steps_csv, char** out_distribution_csv) {
  if (config == nullptr || out_json == nullptr) {
    return fail(SB_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out_json = nullptr;
  if (out_steps_csv != nullptr) *out_steps_csv = nullptr;
  if (out_distribution_csv != nullptr) *out_distribution_csv = nullptr;
  return guarded([&] {
    const sb::ExperimentConfig cpp_config = to_cpp(*config);
    const auto traces = sb::run_node_walk(cpp_config);
    sb::ReportMeta meta{"nodewalk", cpp_config.seed.value, config_to_json(cpp_config)};
    *out_json = copy_string(sb::nodewalk_to_json(traces, meta));
    if (out_steps_csv != nullptr) {
      *out_steps_csv = copy_string(sb::nodewalk_steps_to_csv(traces));
    }
    if (out_distribution_csv != nullptr) {
      *out_distribution_csv = copy_string(sb::nodewalk_distribution_to_csv(traces));
    }
  });
}

sb_status sb_grade(const char* table1_text, const sb_grade_thresholds* thresholds,
                   const char* source, char** out_json, char** out_csv) {
  if (table1_text == nullptr || out_json == nullptr) {
    return fail(SB_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out_json = nullptr;
  if (out_csv != nullptr) *out_csv = nullptr;
  return guarded([&] {
    const std::string text(table1_text);
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
      throw sb::Error(sb::Errc::kIncompleteInput, "table1 input is empty");
    }
    const auto rows = text[first] == '{' ? sb::parse_table1_json(text)
                                         : sb::parse_table1_csv(text);
    const sb::GradeThresholds cpp_thresholds = to_cpp(thresholds);
    const auto grades = sb::grade(rows, cpp_thresholds);
    sb::ReportMeta meta{"grades", 0,
                        {{"source", source == nullptr ? "" : source},
                         {"rows", rows.size()}}};
    *out_json = copy_string(sb::grades_to_json(grades, cpp_thresholds, meta));
    if (out_csv != nullptr) *out_csv = copy_string(sb::grades_to_csv(grades));
  });
}

}  // extern "C"
