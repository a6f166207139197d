#pragma once

#include <span>
#include <vector>

#include "shardbench/types.hpp"

namespace shardbench {

/// The ordered set of live shard identifiers plus the mutation history that
/// history-dependent algorithms (RUSH_R, AnchorHash) replay. The live set is
/// always the fold of the event log over the initial set.
class Membership {
 public:
  struct Event {
    enum class Kind { kAdd, kRemove };
    Kind kind;
    std::vector<ShardId> ids;  // the batch mutated in one call
  };

  Membership() = default;
  explicit Membership(std::vector<ShardId> initial);

  /// Convenience: initial membership {0, 1, ..., n-1}.
  static Membership dense(std::uint32_t n);

  void add_shards(std::span<const ShardId> ids);     // throws kDuplicateShard
  void remove_shards(std::span<const ShardId> ids);  // throws kUnknownShard

  const std::vector<ShardId>& live() const { return live_; }  // sorted ascending
  const std::vector<ShardId>& initial() const { return initial_; }
  const std::vector<Event>& history() const { return history_; }

  bool is_live(ShardId id) const;
  std::size_t size() const { return live_.size(); }

 private:
  std::vector<ShardId> initial_;
  std::vector<ShardId> live_;
  std::vector<Event> history_;
};

}  // namespace shardbench
