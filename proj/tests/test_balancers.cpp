#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "shardbench/balancers.hpp"

using namespace shardbench;

namespace {

std::vector<HashValue> make_keys(std::size_t count, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<HashValue> keys(count);
  for (auto& k : keys) k = rng.next();
  return keys;
}

std::map<ShardId, std::uint64_t> count_owners(const Balancer& balancer,
                                              const std::vector<HashValue>& keys) {
  std::map<ShardId, std::uint64_t> counts;
  for (ShardId shard : balancer.shards()) counts[shard] = 0;
  for (HashValue key : keys) ++counts[balancer.lookup(key)];
  return counts;
}

std::vector<ShardId> dense_ids(std::uint32_t n) { return Membership::dense(n).live(); }

}  // namespace

TEST_CASE("linear: single shard owns everything") {
  LinearBalancer balancer({0}, Seed{1});
  for (HashValue key : make_keys(50, 3)) {
    CHECK(balancer.lookup(key) == 0);
  }
}

TEST_CASE("linear: key mod n indexes the sorted live list") {
  LinearBalancer balancer({0, 1, 2}, Seed{1});
  CHECK(balancer.lookup(5) == 2);  // 5 mod 3

  LinearBalancer sparse({30, 10, 20}, Seed{1});
  CHECK(sparse.lookup(0) == 10);
  CHECK(sparse.lookup(1) == 20);
  CHECK(sparse.lookup(2) == 30);
  CHECK(sparse.lookup(5) == 30);
}

TEST_CASE("linear: 10k uniform keys over 32 shards stay inside the binomial band") {
  LinearBalancer balancer(dense_ids(32), Seed{0});
  const auto counts = count_owners(balancer, make_keys(10000, 0xB1ABa));
  for (const auto& [shard, count] : counts) {
    CHECK(count >= 250);
    CHECK(count <= 380);
  }
}

TEST_CASE("linear: empty membership cannot place") {
  LinearBalancer balancer({}, Seed{0});
  CHECK_THROWS_AS(balancer.lookup(1), Error);
}

TEST_CASE("jump: one bucket, and the n=0 error") {
  CHECK(jump_consistent_hash(123456, 1) == 0);
  CHECK(jump_consistent_hash(0, 1) == 0);
  CHECK_THROWS_AS(jump_consistent_hash(1, 0), Error);

  JumpBalancer balancer({4}, Seed{0});
  CHECK(balancer.lookup(99) == 4);
}

TEST_CASE("jump: appending a bucket only ever moves keys onto it") {
  for (HashValue key : make_keys(2000, 0x12f)) {
    for (std::uint32_t n = 1; n < 16; ++n) {
      const std::uint32_t before = jump_consistent_hash(key, n);
      const std::uint32_t after = jump_consistent_hash(key, n + 1);
      CHECK((after == before || after == n));
    }
  }
}

TEST_CASE("rendezvous: single shard, and argmax behavior under removal") {
  RendezvousBalancer single({7}, Seed{5});
  CHECK(single.lookup(42) == 7);

  const Seed seed{99};
  for (HashValue key : make_keys(64, 0xA11)) {
    RendezvousBalancer balancer(dense_ids(8), seed);
    const ShardId winner = balancer.lookup(key);

    // Removing a non-winner keeps the owner.
    const ShardId bystander = winner == 0 ? 1 : 0;
    balancer.remove_shards(std::vector<ShardId>{bystander});
    CHECK(balancer.lookup(key) == winner);

    // Removing the winner re-runs the argmax over the survivors.
    balancer.remove_shards(std::vector<ShardId>{winner});
    HashValue best_score = 0;
    ShardId best = 0;
    bool first = true;
    for (ShardId shard : balancer.shards()) {
      const HashValue score = hash_pair(key, shard, seed);
      if (first || score > best_score) {
        best_score = score;
        best = shard;
        first = false;
      }
    }
    CHECK(balancer.lookup(key) == best);
  }
}

TEST_CASE("ring: structural invariants and the single shard case") {
  ConsistentRingBalancer balancer({3}, 16, Seed{2});
  CHECK(balancer.points().size() == 16);
  for (HashValue key : make_keys(32, 9)) {
    CHECK(balancer.lookup(key) == 3);
  }

  ConsistentRingBalancer ring(dense_ids(32), 16, Seed{2});
  CHECK(ring.points().size() == 32 * 16);
  CHECK(std::is_sorted(ring.points().begin(), ring.points().end(),
                       [](const auto& a, const auto& b) { return a.position < b.position; }));
  std::map<ShardId, int> per_shard;
  for (const auto& point : ring.points()) ++per_shard[point.shard];
  for (const auto& [shard, count] : per_shard) CHECK(count == 16);
}

TEST_CASE("ring: a key exactly on a point belongs to that point") {
  ConsistentRingBalancer ring(dense_ids(32), 16, Seed{11});
  const auto& points = ring.points();
  for (std::size_t i = 0; i < points.size(); i += 37) {
    if (i > 0 && points[i - 1].position == points[i].position) continue;
    CHECK(ring.lookup(points[i].position) == points[i].shard);
  }
  // Wrap: a key above the highest point lands on the lowest point.
  if (points.back().position != ~HashValue{0}) {
    CHECK(ring.lookup(points.back().position + 1) == points.front().shard);
  }
}

TEST_CASE("ring: removing a shard erases exactly its points") {
  ConsistentRingBalancer ring(dense_ids(8), 16, Seed{4});
  const auto before = ring.points();
  ring.remove_shards(std::vector<ShardId>{5});
  CHECK(ring.points().size() == before.size() - 16);
  for (const auto& point : ring.points()) {
    CHECK(point.shard != 5);
  }
  // The surviving points are bit-identical to their pre-removal versions.
  std::size_t j = 0;
  for (const auto& point : before) {
    if (point.shard == 5) continue;
    CHECK(ring.points()[j].position == point.position);
    CHECK(ring.points()[j].shard == point.shard);
    ++j;
  }
}

TEST_CASE("rush: single epoch, single shard") {
  RushBalancer balancer({9}, Seed{1});
  REQUIRE(balancer.epochs().size() == 1);
  for (HashValue key : make_keys(32, 5)) {
    CHECK(balancer.lookup(key) == 9);
  }
}

TEST_CASE("rush: two equal epochs split the keys near-evenly") {
  RushBalancer balancer(dense_ids(16), Seed{77});
  std::vector<ShardId> second_batch;
  for (ShardId id = 16; id < 32; ++id) second_batch.push_back(id);
  balancer.add_shards(second_batch);
  REQUIRE(balancer.epochs().size() == 2);
  CHECK(balancer.epochs()[0].live.size() == 16);
  CHECK(balancer.epochs()[1].live.size() == 16);

  const auto keys = make_keys(10000, 0x2051);
  std::uint64_t newest = 0;
  for (HashValue key : keys) {
    if (balancer.lookup(key) >= 16) ++newest;
  }
  // Binomial(10000, 1/2): three sigmas around 5000.
  CHECK(newest >= 4850);
  CHECK(newest <= 5150);
}

TEST_CASE("rush: re-adding a removed shard revives it inside its epoch") {
  RushBalancer balancer(dense_ids(8), Seed{3});
  const auto keys = make_keys(4000, 0xF00);
  std::vector<ShardId> before;
  for (HashValue key : keys) before.push_back(balancer.lookup(key));

  balancer.remove_shards(std::vector<ShardId>{2, 5});
  CHECK(balancer.epochs().size() == 1);
  CHECK(balancer.epochs()[0].live.size() == 6);
  balancer.add_shards(std::vector<ShardId>{2, 5});
  CHECK(balancer.epochs().size() == 1);  // no new epoch: ids rejoin their batch

  for (std::size_t i = 0; i < keys.size(); ++i) {
    CHECK(balancer.lookup(keys[i]) == before[i]);
  }
}

TEST_CASE("maglev: one shard owns the whole table") {
  MaglevBalancer balancer({6}, 103, Seed{0});
  CHECK(balancer.table().size() == 103);
  for (ShardId owner : balancer.table()) CHECK(owner == 6);
}

TEST_CASE("maglev: lookup is table[key mod M]") {
  MaglevBalancer balancer(dense_ids(32), 103, Seed{12});
  CHECK(balancer.lookup(0) == balancer.table()[0]);
  CHECK(balancer.lookup(104) == balancer.table()[1]);
  for (HashValue key : make_keys(200, 8)) {
    CHECK(balancer.lookup(key) == balancer.table()[key % 103]);
  }
}

TEST_CASE("maglev: slot ownership stays balanced across seeds") {
  // ceil(M/n) - floor(M/n) + 1 slots of spread allowed; round-robin filling
  // actually achieves spread <= 1.
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    MaglevBalancer balancer(dense_ids(32), 103, Seed{seed});
    std::map<ShardId, std::uint64_t> slots;
    for (ShardId owner : balancer.table()) ++slots[owner];
    CHECK(slots.size() == 32);  // every live shard owns at least one slot
    std::uint64_t low = ~0ull, high = 0;
    for (const auto& [shard, count] : slots) {
      low = std::min(low, count);
      high = std::max(high, count);
    }
    CHECK(high - low <= 2);
  }
}

TEST_CASE("maglev: lookups track slot ownership within three sigmas") {
  MaglevBalancer balancer(dense_ids(32), 103, Seed{21});
  std::map<ShardId, double> slots;
  for (ShardId owner : balancer.table()) ++slots[owner];

  const auto keys = make_keys(10000, 0x3A61EF);
  const auto counts = count_owners(balancer, keys);
  for (const auto& [shard, count] : counts) {
    const double p = slots[shard] / 103.0;
    const double expected = 10000.0 * p;
    const double sigma = std::sqrt(10000.0 * p * (1.0 - p));
    CHECK(std::abs(static_cast<double>(count) - expected) <= 3.0 * sigma);
  }
}

TEST_CASE("maglev: capacity and configuration errors") {
  CHECK_THROWS_AS(MaglevBalancer(dense_ids(8), 6, Seed{0}), Error);   // not prime
  CHECK_THROWS_AS(MaglevBalancer(dense_ids(8), 7, Seed{0}), Error);   // 8 shards > 7 slots
  MaglevBalancer balancer(dense_ids(7), 7, Seed{0});
  CHECK_THROWS_AS(balancer.add_shards(std::vector<ShardId>{7}), Error);
  CHECK(balancer.shards().size() == 7);  // failed add leaves the state alone
}

TEST_CASE("anchor: remove then add restores the exact mapping (stack inverse)") {
  AnchorBalancer balancer(dense_ids(32), 64, Seed{13});
  const auto keys = make_keys(10000, 0xA3C);
  std::vector<ShardId> before;
  before.reserve(keys.size());
  for (HashValue key : keys) before.push_back(balancer.lookup(key));

  balancer.remove_shards(std::vector<ShardId>{11});
  CHECK(balancer.peek_next() == 11);
  CHECK(balancer.add_next() == 11);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    CHECK(balancer.lookup(keys[i]) == before[i]);
  }
}

TEST_CASE("anchor: removal moves exactly the removed shard's keys") {
  AnchorBalancer balancer(dense_ids(32), 64, Seed{6});
  const auto keys = make_keys(10000, 0xD00D);
  std::vector<ShardId> before;
  for (HashValue key : keys) before.push_back(balancer.lookup(key));

  const ShardId victim = 17;
  std::uint64_t on_victim = 0;
  for (ShardId owner : before) on_victim += owner == victim ? 1 : 0;

  balancer.remove_shards(std::vector<ShardId>{victim});
  std::uint64_t moved = 0;
  std::map<ShardId, std::uint64_t> gains;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const ShardId now = balancer.lookup(keys[i]);
    if (now != before[i]) {
      ++moved;
      CHECK(before[i] == victim);  // only the victim's keys may move
      ++gains[now];
    }
  }
  CHECK(moved == on_victim);
  // At this scale every survivor picks up some of the orphaned keys.
  CHECK(gains.size() == balancer.shards().size());
}

TEST_CASE("anchor: revived bucket receives about a 1/n share") {
  AnchorBalancer balancer(dense_ids(32), 64, Seed{31});
  balancer.remove_shards(std::vector<ShardId>{4});
  const auto keys = make_keys(10000, 0xFEED);
  std::vector<ShardId> before;
  for (HashValue key : keys) before.push_back(balancer.lookup(key));

  CHECK(balancer.add_next() == 4);
  std::uint64_t inflow = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const ShardId now = balancer.lookup(keys[i]);
    if (now != before[i]) {
      CHECK(now == 4);  // additions move keys only onto the revived bucket
      ++inflow;
    }
  }
  // Binomial(10000, 1/32): three sigmas around 312.5.
  CHECK(inflow >= 260);
  CHECK(inflow <= 365);
}

TEST_CASE("anchor: capacity, id range and stack-order errors") {
  CHECK_THROWS_AS(AnchorBalancer(dense_ids(65), 64, Seed{0}), Error);
  CHECK_THROWS_AS(AnchorBalancer({64}, 64, Seed{0}), Error);

  AnchorBalancer full(dense_ids(64), 64, Seed{0});
  CHECK_THROWS_AS(full.add_next(), Error);
  try {
    full.add_next();
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kCapacity);
  }

  AnchorBalancer balancer(dense_ids(32), 64, Seed{0});
  balancer.remove_shards(std::vector<ShardId>{3});
  balancer.remove_shards(std::vector<ShardId>{9});
  // 3 is buried under 9 on the stack.
  CHECK_THROWS_AS(balancer.add_shards(std::vector<ShardId>{3}), Error);
  CHECK(balancer.shards().size() == 30);
  balancer.add_shards(std::vector<ShardId>{9});
  balancer.add_shards(std::vector<ShardId>{3});
  CHECK(balancer.shards().size() == 32);
}

TEST_CASE("anchor: batch additions accept the stack top as a set") {
  AnchorBalancer balancer(dense_ids(32), 64, Seed{0});
  balancer.remove_shards(std::vector<ShardId>{2, 12, 22});
  balancer.add_shards(std::vector<ShardId>{22, 2, 12});  // any order within the batch
  CHECK(balancer.shards() == dense_ids(32));
}

TEST_CASE("facade dispatches to the algorithm and is deterministic") {
  const Membership membership = Membership::dense(5);
  const BalancerParams params;
  const Seed seed{41};

  LinearBalancer linear(membership.live(), seed);
  for (HashValue key : make_keys(1000, 0xFACADE)) {
    CHECK(balancer_lookup(Algorithm::kLinear, membership, params, seed, key) ==
          linear.lookup(key));
  }
  for (Algorithm algorithm : kAllAlgorithms) {
    const HashValue key = 0x123456789;
    CHECK(balancer_lookup(algorithm, membership, params, seed, key) ==
          balancer_lookup(algorithm, membership, params, seed, key));
  }
}
