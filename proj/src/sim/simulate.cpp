#include <algorithm>
#include <cmath>
#include <numbers>

#include "hopcap/error.hpp"
#include "hopcap/oracle_sim.hpp"
#include "hopcap/rng.hpp"

namespace hopcap {

namespace {

struct Resolved {
  EntityId e1 = 0;
  std::optional<std::size_t> r;
  std::size_t a = 0;
};

Resolved resolve(const World& world, const Query& query) {
  Resolved out;
  if (query.e1 >= world.size()) throw DomainError("query entity out of range");
  out.e1 = query.e1;
  const auto a = world.config.find_attribute(query.a);
  if (!a) throw DomainError("unknown attribute '" + query.a + "'");
  out.a = *a;
  if (query.r) {
    const auto r = world.config.find_relation(*query.r);
    if (!r) throw DomainError("unknown relation '" + *query.r + "'");
    out.r = *r;
  }
  if (is_two_hop(query.kind) != out.r.has_value()) throw DomainError("query kind does not match its relation");
  return out;
}

double chance(const World& world, std::size_t a) { return 1.0 / static_cast<double>(world.config.value_pool(a)); }

double fallback_prob(const World& world, std::size_t a, FallbackPool fallback) {
  return fallback == FallbackPool::Entity ? 1.0 / static_cast<double>(world.size()) : chance(world, a);
}

double compose(double p1, double p2, double miss) { return std::min(1.0, p1 * p2 + (1.0 - p1) * miss); }

void check_profile(const World& world, const ReliabilityProfile& profile) {
  if (profile.entities != world.size() || profile.attributes != world.config.attribute_count() ||
      profile.relations != world.config.relation_count()) {
    throw DomainError("reliability profile does not match the world");
  }
}

}  // namespace

double simulate_two_hop_prob(const World& world, const ReliabilityProfile& profile, const Query& query,
                             FallbackPool fallback) {
  check_profile(world, profile);
  const auto q = resolve(world, query);
  if (!q.r) throw DomainError("simulate_two_hop_prob needs a two-hop query");
  if (profile.model_kind == ModelKind::Independent) return profile.memo.at(profile.memo_index(q.e1, *q.r, q.a));
  const EntityId e2 = world.relation_target(q.e1, *q.r);
  return compose(profile.first_hop(q.e1, *q.r), profile.second_hop(e2, q.a), fallback_prob(world, q.a, fallback));
}

TrainExposure TrainExposure::from_train(const World& world, const std::vector<QAItem>& train) {
  TrainExposure ex;
  ex.entities = world.size();
  ex.relations = world.config.relation_count();
  ex.attributes = world.config.attribute_count();
  const std::size_t per_fact = ex.entities * ex.attributes;
  ex.fact.assign(per_fact, false);
  ex.first_hop.assign(per_fact, false);
  ex.second_hop.assign(per_fact, false);
  ex.full.assign(per_fact * ex.relations, false);
  for (const auto& item : train) {
    const auto q = resolve(world, item.query);
    if (!q.r) {
      ex.fact[q.e1 * ex.attributes + q.a] = true;
      continue;
    }
    const EntityId e2 = world.relation_target(q.e1, *q.r);
    ex.fact[q.e1 * ex.attributes + *q.r] = true;
    ex.fact[e2 * ex.attributes + q.a] = true;
    ex.first_hop[q.e1 * ex.attributes + *q.r] = true;
    ex.second_hop[e2 * ex.attributes + q.a] = true;
    ex.full[(static_cast<std::size_t>(q.e1) * ex.relations + *q.r) * ex.attributes + q.a] = true;
  }
  return ex;
}

double simulate_question_prob(const World& world, const ReliabilityProfile& profile, const TrainExposure& exposure,
                              const Query& query, FallbackPool fallback) {
  check_profile(world, profile);
  if (exposure.entities != world.size() || exposure.attributes != world.config.attribute_count()) {
    throw DomainError("train exposure does not match the world");
  }
  const auto q = resolve(world, query);
  const std::size_t A = exposure.attributes;
  auto fact_or_chance = [&](EntityId e, std::size_t a, double p) {
    return exposure.fact[e * A + a] ? p : chance(world, a);
  };

  if (!q.r) return fact_or_chance(q.e1, q.a, profile.one_hop(q.e1, q.a));

  const std::size_t r = *q.r;
  const EntityId e2 = world.relation_target(q.e1, r);
  const double miss = fallback_prob(world, q.a, fallback);
  switch (profile.model_kind) {
    case ModelKind::Recurrent:
      return compose(fact_or_chance(q.e1, r, profile.first_hop(q.e1, r)),
                     fact_or_chance(e2, q.a, profile.second_hop(e2, q.a)), miss);
    case ModelKind::TwoFunction:
      if (!exposure.first_hop[q.e1 * A + r] || !exposure.second_hop[e2 * A + q.a]) return chance(world, q.a);
      return compose(profile.first_hop(q.e1, r), profile.second_hop(e2, q.a), miss);
    case ModelKind::Independent:
      if (!exposure.full[(static_cast<std::size_t>(q.e1) * exposure.relations + r) * A + q.a]) {
        return chance(world, q.a);
      }
      return profile.memo.at(profile.memo_index(q.e1, r, q.a));
  }
  return chance(world, q.a);
}

std::vector<LossRecord> generate_loss_log(const World& world, const ReliabilityProfile& profile,
                                          const SplitSet& splits, const SimulationOptions& options) {
  if (!(options.noise_sd >= 0.0)) throw DomainError("noise must be non-negative");
  const auto exposure = TrainExposure::from_train(world, splits.train);
  std::vector<LossRecord> records;
  records.reserve(splits.item_count());
  for (const auto* item : splits.all_items()) {
    const double q = simulate_question_prob(world, profile, exposure, item->query, options.fallback);
    records.push_back({item->qid, item->split, item->query.kind, std::min(0.0, std::log(q))});
  }
  std::sort(records.begin(), records.end(), [](const LossRecord& x, const LossRecord& y) { return x.qid < y.qid; });

  if (options.noise_sd > 0.0) {
    // Box-Muller in canonical qid order so the draw sequence is reproducible.
    auto rng = make_rng(options.seed, "loss-noise");
    for (auto& rec : records) {
      const double u1 = 1.0 - uniform_unit(rng);  // (0, 1]
      const double u2 = uniform_unit(rng);
      const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      rec.logprob_nats = std::min(0.0, rec.logprob_nats + options.noise_sd * z);
    }
  }
  return records;
}

}  // namespace hopcap
