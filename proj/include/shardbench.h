/*
 * shardbench C API: shard-placement algorithms, the rebalance simulator and
 * the benchmark experiment drivers behind a stable extern "C" surface.
 *
 * Conventions:
 *   - Every fallible call returns sb_status; SB_OK is 0.
 *   - sb_last_error_message() returns a thread-local detail string for the
 *     most recent failure on the calling thread.
 *   - Strings returned through char** are heap-allocated; release them with
 *     sb_string_free().
 *   - sb_balancer is an opaque handle; destroy it with sb_balancer_destroy().
 */

#ifndef SHARDBENCH_H
#define SHARDBENCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SB_API __declspec(dllexport)
#else
#define SB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sb_status {
  SB_OK = 0,
  SB_ERR_PLACEMENT_IMPOSSIBLE = 1, /* no live shard can own the key */
  SB_ERR_CAPACITY = 2,             /* anchor set or maglev table exhausted */
  SB_ERR_UNKNOWN_SHARD = 3,
  SB_ERR_DUPLICATE_SHARD = 4,
  SB_ERR_CONFIGURATION = 5,
  SB_ERR_INCONSISTENT_PLAN = 6,
  SB_ERR_INCOMPLETE_INPUT = 7,
  SB_ERR_INVALID_ARGUMENT = 8,
  SB_ERR_INTERNAL = 9
} sb_status;

typedef enum sb_algorithm {
  SB_ALG_LINEAR = 0,
  SB_ALG_CONSISTENT = 1,
  SB_ALG_RENDEZVOUS = 2,
  SB_ALG_RUSH_R = 3,
  SB_ALG_MAGLEV = 4,
  SB_ALG_JUMP = 5,
  SB_ALG_ANCHORHASH = 6,
  SB_ALG_COUNT = 7
} sb_algorithm;

typedef enum sb_removal_mode {
  SB_REMOVAL_RANDOM = 0,
  SB_REMOVAL_HIGHEST_IDS = 1
} sb_removal_mode;

typedef struct sb_balancer sb_balancer;

typedef struct sb_params {
  uint32_t ring_points_per_shard; /* default 16 */
  uint32_t maglev_table_size;     /* default 103, must be prime */
  uint32_t anchor_capacity;       /* default 64 */
} sb_params;

typedef struct sb_experiment_config {
  uint32_t algorithm_mask; /* bit (1u << sb_algorithm); 0 selects all */
  uint32_t record_count;
  uint32_t initial_shards;
  uint32_t shards_to_drop;
  uint32_t node_count;
  uint32_t shards_per_node;
  uint32_t trials;
  uint64_t timing_lookups;
  uint64_t seed;
  int removal_mode; /* sb_removal_mode */
  sb_params params;
} sb_experiment_config;

typedef struct sb_grade_thresholds {
  double uniformity_high;
  double uniformity_medium;
  double rebalance_high;
  double rebalance_medium;
  double speed_high;
  double speed_medium;
} sb_grade_thresholds;

SB_API const char* sb_version(void);
SB_API const char* sb_status_name(sb_status status);
SB_API const char* sb_last_error_message(void);
SB_API void sb_string_free(char* text);

SB_API const char* sb_algorithm_name(sb_algorithm algorithm);
SB_API sb_status sb_algorithm_from_name(const char* name, sb_algorithm* out_algorithm);

SB_API void sb_params_init(sb_params* params);
SB_API void sb_experiment_config_init(sb_experiment_config* config);
SB_API void sb_grade_thresholds_init(sb_grade_thresholds* thresholds);

/* Deterministic, seedable hashing shared by everything above the C ABI. */
SB_API uint64_t sb_hash64(const void* data, size_t size, uint64_t seed);
SB_API uint64_t sb_hash_pair(uint64_t a, uint64_t b, uint64_t seed);
SB_API sb_status sb_jump_consistent_hash(uint64_t key, uint32_t buckets, uint32_t* out_bucket);

/* Balancer handles. `params` may be NULL for the defaults. */
SB_API sb_status sb_balancer_create(sb_algorithm algorithm, const sb_params* params,
                                    uint64_t seed, const uint32_t* shard_ids, size_t shard_count,
                                    sb_balancer** out_balancer);
SB_API void sb_balancer_destroy(sb_balancer* balancer);
SB_API sb_status sb_balancer_lookup(const sb_balancer* balancer, uint64_t key,
                                    uint32_t* out_shard);
SB_API sb_status sb_balancer_add_shards(sb_balancer* balancer, const uint32_t* shard_ids,
                                        size_t shard_count);
SB_API sb_status sb_balancer_remove_shards(sb_balancer* balancer, const uint32_t* shard_ids,
                                           size_t shard_count);
SB_API sb_status sb_balancer_shard_count(const sb_balancer* balancer, size_t* out_count);
/* Copies up to `capacity` live ids (sorted ascending) into out_shards. */
SB_API sb_status sb_balancer_shards(const sb_balancer* balancer, uint32_t* out_shards,
                                    size_t capacity, size_t* out_count);
/* AnchorHash only: revives the most recently removed bucket. */
SB_API sb_status sb_anchor_add_next(sb_balancer* balancer, uint32_t* out_shard);

/*
 * Experiment drivers. Each returns the full JSON report; the *_csv outputs
 * are the fixed-schema CSV renderings of the same data. CSV pointers may be
 * NULL when only the JSON is wanted.
 */
SB_API sb_status sb_run_simulation(const sb_experiment_config* config, char** out_json,
                                   char** out_csv);
SB_API sb_status sb_run_timing(const sb_experiment_config* config, char** out_json);
SB_API sb_status sb_run_node_walk(const sb_experiment_config* config, char** out_json,
                                  char** out_steps_csv, char** out_distribution_csv);

/*
 * Grades a table1 report (CSV or JSON text, auto-detected) into the
 * Low/Medium/High criteria table. `thresholds` may be NULL for the defaults;
 * `source` is echoed into the report metadata.
 */
SB_API sb_status sb_grade(const char* table1_text, const sb_grade_thresholds* thresholds,
                          const char* source, char** out_json, char** out_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SHARDBENCH_H */
