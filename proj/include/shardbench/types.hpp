#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace shardbench {

/// Dense, externally visible shard identifier. Unique within a membership.
using ShardId = std::uint32_t;

/// 64-bit key / hash output. Full range, no reserved sentinels.
using HashValue = std::uint64_t;

/// Seed for the frozen mixing function. Identical seeds produce bit-identical
/// hash outputs for identical inputs on every platform; all randomness in the
/// library routes through a seed, never through ambient entropy.
struct Seed {
  std::uint64_t value = 0;
};

enum class Algorithm {
  kLinear,
  kConsistent,
  kRendezvous,
  kRush,
  kMaglev,
  kJump,
  kAnchor,
};

inline constexpr std::array<Algorithm, 7> kAllAlgorithms = {
    Algorithm::kLinear,  Algorithm::kConsistent, Algorithm::kRendezvous,
    Algorithm::kRush,    Algorithm::kMaglev,     Algorithm::kJump,
    Algorithm::kAnchor,
};

std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> algorithm_from_string(std::string_view name);

/// Tunables, frozen by default at the benchmark's reference values.
struct BalancerParams {
  std::uint32_t ring_points_per_shard = 16;
  std::uint32_t maglev_table_size = 103;  // prime
  std::uint32_t anchor_capacity = 64;
};

enum class Errc {
  kPlacementImpossible,  // empty membership / no live shard
  kCapacity,             // anchor full, or more shards than maglev slots
  kUnknownShard,         // removing an id that is not live
  kDuplicateShard,       // adding an id that is already live
  kConfiguration,        // invalid parameter (e.g. non-prime maglev table)
  kInconsistentPlan,     // migration plan does not match the assignment
  kIncompleteInput,      // report input missing or empty
  kInvalidArgument,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace shardbench
