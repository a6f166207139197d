#include <string>

#include "shardbench/balancers.hpp"

namespace shardbench {
namespace {

constexpr std::uint64_t kOffsetSalt = 0x4D61674F66667331ull;
constexpr std::uint64_t kSkipSalt = 0x4D6167536B697031ull;

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; d * static_cast<std::uint64_t>(d) <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

}  // namespace

MaglevBalancer::MaglevBalancer(std::vector<ShardId> initial, std::uint32_t table_size, Seed seed)
    : Balancer(std::move(initial), seed), table_size_(table_size) {
  if (!is_prime(table_size_)) {
    throw Error(Errc::kConfiguration,
                "maglev table size " + std::to_string(table_size_) + " is not prime");
  }
  if (membership_.size() > table_size_) {
    throw Error(Errc::kCapacity, "more shards than maglev table slots");
  }
  rebuild();
}

void MaglevBalancer::validate_add(std::span<const ShardId> ids) const {
  if (membership_.size() + ids.size() > table_size_) {
    throw Error(Errc::kCapacity, "more shards than maglev table slots");
  }
}

void MaglevBalancer::on_add(std::span<const ShardId>) { rebuild(); }

void MaglevBalancer::on_remove(std::span<const ShardId>) { rebuild(); }

void MaglevBalancer::rebuild() {
  const auto& live = membership_.live();
  table_.clear();
  if (live.empty()) return;

  const std::uint32_t m = table_size_;
  const std::size_t n = live.size();

  // (offset, skip) per shard; the skip is nonzero and m is prime, so each
  // shard's preference walk is a full permutation of the table.
  std::vector<std::uint32_t> offset(n), skip(n), next(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    offset[i] = static_cast<std::uint32_t>(hash_pair(live[i], kOffsetSalt, seed_) % m);
    skip[i] = static_cast<std::uint32_t>(1 + hash_pair(live[i], kSkipSalt, seed_) % (m - 1));
  }

  constexpr ShardId kFree = ~ShardId{0};
  table_.assign(m, kFree);
  std::uint32_t filled = 0;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t slot = (offset[i] + static_cast<std::uint64_t>(next[i]) * skip[i]) % m;
      while (table_[slot] != kFree) {
        ++next[i];
        slot = (offset[i] + static_cast<std::uint64_t>(next[i]) * skip[i]) % m;
      }
      table_[slot] = live[i];
      ++next[i];
      if (++filled == m) return;
    }
  }
}

ShardId MaglevBalancer::lookup(HashValue key) const {
  if (table_.empty()) {
    throw Error(Errc::kPlacementImpossible, "no live shards");
  }
  return table_[key % table_size_];
}

}  // namespace shardbench
