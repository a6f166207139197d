#include "shardbench/balancers.hpp"

#include <string>

namespace shardbench {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kLinear: return "Linear";
    case Algorithm::kConsistent: return "Consistent";
    case Algorithm::kRendezvous: return "Rendezvous";
    case Algorithm::kRush: return "RUSH_R";
    case Algorithm::kMaglev: return "Maglev";
    case Algorithm::kJump: return "Jump";
    case Algorithm::kAnchor: return "AnchorHash";
  }
  return "?";
}

std::optional<Algorithm> algorithm_from_string(std::string_view name) {
  auto eq = [&](std::string_view canon) {
    if (name.size() != canon.size()) return false;
    for (std::size_t i = 0; i < name.size(); ++i) {
      char a = name[i], b = canon[i];
      if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
      if (b >= 'A' && b <= 'Z') b = static_cast<char>(b - 'A' + 'a');
      if (a != b) return false;
    }
    return true;
  };
  for (Algorithm a : kAllAlgorithms) {
    if (eq(to_string(a))) return a;
  }
  if (eq("rush")) return Algorithm::kRush;
  if (eq("anchor")) return Algorithm::kAnchor;
  return std::nullopt;
}

void Balancer::validate_add(std::span<const ShardId>) const {}

void Balancer::add_shards(std::span<const ShardId> ids) {
  if (ids.empty()) {
    throw Error(Errc::kInvalidArgument, "empty shard batch");
  }
  validate_add(ids);
  membership_.add_shards(ids);
  on_add(membership_.history().back().ids);
}

void Balancer::remove_shards(std::span<const ShardId> ids) {
  if (ids.empty()) {
    throw Error(Errc::kInvalidArgument, "empty shard batch");
  }
  membership_.remove_shards(ids);
  on_remove(membership_.history().back().ids);
}

std::unique_ptr<Balancer> Balancer::create(Algorithm algorithm, std::span<const ShardId> initial,
                                           const BalancerParams& params, Seed seed) {
  std::vector<ShardId> ids(initial.begin(), initial.end());
  switch (algorithm) {
    case Algorithm::kLinear:
      return std::make_unique<LinearBalancer>(std::move(ids), seed);
    case Algorithm::kConsistent:
      return std::make_unique<ConsistentRingBalancer>(std::move(ids), params.ring_points_per_shard,
                                                      seed);
    case Algorithm::kRendezvous:
      return std::make_unique<RendezvousBalancer>(std::move(ids), seed);
    case Algorithm::kRush:
      return std::make_unique<RushBalancer>(std::move(ids), seed);
    case Algorithm::kMaglev:
      return std::make_unique<MaglevBalancer>(std::move(ids), params.maglev_table_size, seed);
    case Algorithm::kJump:
      return std::make_unique<JumpBalancer>(std::move(ids), seed);
    case Algorithm::kAnchor:
      return std::make_unique<AnchorBalancer>(std::move(ids), params.anchor_capacity, seed);
  }
  throw Error(Errc::kInvalidArgument, "unknown algorithm");
}

std::unique_ptr<Balancer> Balancer::create(Algorithm algorithm, const Membership& membership,
                                           const BalancerParams& params, Seed seed) {
  auto balancer = create(algorithm, membership.initial(), params, seed);
  for (const Membership::Event& event : membership.history()) {
    if (event.kind == Membership::Event::Kind::kAdd) {
      balancer->add_shards(event.ids);
    } else {
      balancer->remove_shards(event.ids);
    }
  }
  return balancer;
}

ShardId balancer_lookup(Algorithm algorithm, const Membership& membership,
                        const BalancerParams& params, Seed seed, HashValue key) {
  return Balancer::create(algorithm, membership, params, seed)->lookup(key);
}

}  // namespace shardbench
