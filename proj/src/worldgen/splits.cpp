#include "hopcap/splits.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "hopcap/error.hpp"
#include "hopcap/rng.hpp"

namespace hopcap {

std::string_view holdout_name(HoldoutKind kind) noexcept {
  switch (kind) {
    case HoldoutKind::E1: return "heldout_e1";
    case HoldoutKind::R: return "heldout_r";
    case HoldoutKind::E2: return "heldout_e2";
    case HoldoutKind::A: return "heldout_a";
    case HoldoutKind::E1R: return "heldout_e1r";
    case HoldoutKind::E2A: return "heldout_e2a";
    case HoldoutKind::Full: return "heldout_full";
  }
  return "heldout_full";
}

std::optional<HoldoutKind> parse_holdout_name(std::string_view name) noexcept {
  for (const auto kind : kHoldoutKinds) {
    if (holdout_name(kind) == name) return kind;
  }
  return std::nullopt;
}

double SplitOptions::fraction(HoldoutKind kind) const {
  const auto it = holdout_fractions.find(kind);
  return it == holdout_fractions.end() ? 0.0 : it->second;
}

SplitOptions SplitOptions::uniform(double fraction, double mix_ratio, std::uint64_t seed, bool chain_of_thought) {
  SplitOptions o;
  for (const auto kind : kHoldoutKinds) o.holdout_fractions[kind] = fraction;
  o.mix_ratio = mix_ratio;
  o.seed = seed;
  o.chain_of_thought = chain_of_thought;
  return o;
}

std::size_t SplitSet::item_count() const noexcept {
  std::size_t n = train.size();
  for (const auto& [name, items] : heldout) n += items.size();
  return n;
}

std::vector<const QAItem*> SplitSet::all_items() const {
  std::vector<const QAItem*> out;
  out.reserve(item_count());
  for (const auto& item : train) out.push_back(&item);
  for (const auto kind : kHoldoutKinds) {
    const auto it = heldout.find(std::string(holdout_name(kind)));
    if (it == heldout.end()) continue;
    for (const auto& item : it->second) out.push_back(&item);
  }
  return out;
}

std::uint64_t holdout_count(double fraction, std::uint64_t pool) {
  if (fraction <= 0.0) return 0;
  const auto k = static_cast<std::uint64_t>(std::ceil(fraction * static_cast<double>(pool)));
  return std::min(k, pool);
}

nlohmann::json holdout_manifest_to_json(const HoldoutManifest& m, const WorldConfig& config) {
  nlohmann::json j;
  j["heldout_e1"] = m.e1;
  j["heldout_e2"] = m.e2;
  auto& r = j["heldout_r"] = nlohmann::json::array();
  for (const auto x : m.r) r.push_back(config.relations.at(x));
  auto& a = j["heldout_a"] = nlohmann::json::array();
  for (const auto x : m.a) a.push_back(config.attribute_name(x));
  auto& e1r = j["heldout_e1r"] = nlohmann::json::array();
  for (const auto& [e, x] : m.e1r) e1r.push_back({e, config.relations.at(x)});
  auto& e2a = j["heldout_e2a"] = nlohmann::json::array();
  for (const auto& [e, x] : m.e2a) e2a.push_back({e, config.attribute_name(x)});
  auto& full = j["heldout_full"] = nlohmann::json::array();
  for (const auto& t : m.full) full.push_back({t[0], config.relations.at(t[1]), config.attribute_name(t[2])});
  return j;
}

HoldoutManifest holdout_manifest_from_json(const nlohmann::json& j, const WorldConfig& config) {
  auto relation = [&](const nlohmann::json& v) {
    const auto r = config.find_relation(v.get<std::string>());
    if (!r) throw DataError("holdout manifest names unknown relation " + v.dump());
    return *r;
  };
  auto attribute = [&](const nlohmann::json& v) {
    const auto a = config.find_attribute(v.get<std::string>());
    if (!a) throw DataError("holdout manifest names unknown attribute " + v.dump());
    return *a;
  };
  HoldoutManifest m;
  try {
    m.e1 = j.at("heldout_e1").get<std::vector<EntityId>>();
    m.e2 = j.at("heldout_e2").get<std::vector<EntityId>>();
    for (const auto& v : j.at("heldout_r")) m.r.push_back(relation(v));
    for (const auto& v : j.at("heldout_a")) m.a.push_back(attribute(v));
    for (const auto& v : j.at("heldout_e1r")) m.e1r.emplace_back(v.at(0).get<EntityId>(), relation(v.at(1)));
    for (const auto& v : j.at("heldout_e2a")) m.e2a.emplace_back(v.at(0).get<EntityId>(), attribute(v.at(1)));
    for (const auto& v : j.at("heldout_full")) {
      m.full.push_back({v.at(0).get<std::uint64_t>(), relation(v.at(1)), attribute(v.at(2))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed holdout manifest: ") + e.what());
  }
  return m;
}

namespace {

std::vector<std::uint64_t> sample_sorted(std::uint64_t seed, HoldoutKind kind, double fraction, std::uint64_t pool) {
  auto rng = make_rng(seed, "holdout", static_cast<std::uint64_t>(kind));
  auto picked = sample_without_replacement(rng, pool, holdout_count(fraction, pool));
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

SplitSet build_splits(const World& world, const SplitOptions& options) {
  const auto& config = world.config;
  const std::uint64_t n = world.size();
  const std::uint64_t n_rel = config.relation_count();
  const std::uint64_t n_attr = config.attribute_count();

  for (const auto& [kind, fraction] : options.holdout_fractions) {
    if (!(fraction >= 0.0 && fraction < 1.0)) {
      throw ConfigError(std::string(holdout_name(kind)) + " fraction must lie in [0, 1)");
    }
  }
  if (!(options.mix_ratio >= 0.0)) throw ConfigError("mix_ratio must be >= 0");
  if (options.mix_ratio > 0.0 && n_rel == 0) throw ConfigError("two-hop questions need at least one relation");

  SplitSet out;
  out.mix_ratio = options.mix_ratio;
  out.chain_of_thought = options.chain_of_thought;
  for (const auto kind : kHoldoutKinds) out.heldout[std::string(holdout_name(kind))];

  // Held-out components, drawn per kind from an independent stream.
  auto& hm = out.holdout_manifest;
  const auto seed = options.seed;
  for (const auto x : sample_sorted(seed, HoldoutKind::E1, options.fraction(HoldoutKind::E1), n))
    hm.e1.push_back(static_cast<EntityId>(x));
  if (n_rel > 0) {
    for (const auto x : sample_sorted(seed, HoldoutKind::R, options.fraction(HoldoutKind::R), n_rel))
      hm.r.push_back(static_cast<std::size_t>(x));
  }
  for (const auto x : sample_sorted(seed, HoldoutKind::E2, options.fraction(HoldoutKind::E2), n))
    hm.e2.push_back(static_cast<EntityId>(x));
  for (const auto x : sample_sorted(seed, HoldoutKind::A, options.fraction(HoldoutKind::A), n_attr))
    hm.a.push_back(static_cast<std::size_t>(x));
  if (n_rel > 0) {
    for (const auto x : sample_sorted(seed, HoldoutKind::E1R, options.fraction(HoldoutKind::E1R), n * n_rel))
      hm.e1r.emplace_back(static_cast<EntityId>(x / n_rel), static_cast<std::size_t>(x % n_rel));
    for (const auto x : sample_sorted(seed, HoldoutKind::Full, options.fraction(HoldoutKind::Full), n * n_rel * n_attr))
      hm.full.push_back({x / (n_rel * n_attr), (x / n_attr) % n_rel, x % n_attr});
  }
  for (const auto x : sample_sorted(seed, HoldoutKind::E2A, options.fraction(HoldoutKind::E2A), n * n_attr))
    hm.e2a.emplace_back(static_cast<EntityId>(x / n_attr), static_cast<std::size_t>(x % n_attr));

  std::vector<std::uint8_t> held_e1(n), held_e2(n), held_r(n_rel), held_a(n_attr);
  std::vector<std::uint8_t> held_e1r(n * n_rel), held_e2a(n * n_attr);
  std::unordered_set<std::uint64_t> held_full;
  for (const auto e : hm.e1) held_e1[e] = 1;
  for (const auto e : hm.e2) held_e2[e] = 1;
  for (const auto r : hm.r) held_r[r] = 1;
  for (const auto a : hm.a) held_a[a] = 1;
  for (const auto& [e, r] : hm.e1r) held_e1r[e * n_rel + r] = 1;
  for (const auto& [e, a] : hm.e2a) held_e2a[e * n_attr + a] = 1;
  for (const auto& t : hm.full) held_full.insert((t[0] * n_rel + t[1]) * n_attr + t[2]);

  std::vector<QAItem> one_hop;
  one_hop.reserve(static_cast<std::size_t>(n * n_attr));
  for (EntityId e = 0; e < n; ++e) {
    for (std::size_t a = 0; a < n_attr; ++a) {
      one_hop.push_back(render_question(world, e, std::nullopt, a, QuestionKind::OneHop));
      one_hop.back().split = kTrainSplit;
    }
  }

  std::vector<QAItem> two_hop_train;
  if (options.mix_ratio > 0.0) {
    const auto kind = options.chain_of_thought ? QuestionKind::TwoHopCoT : QuestionKind::TwoHop;
    two_hop_train.reserve(static_cast<std::size_t>(n * n_rel * n_attr));
    for (EntityId e1 = 0; e1 < n; ++e1) {
      for (std::size_t r = 0; r < n_rel; ++r) {
        const auto e2 = world.relation_target(e1, r);
        for (std::size_t a = 0; a < n_attr; ++a) {
          std::optional<HoldoutKind> match;
          int matches = 0;
          auto test = [&](bool hit, HoldoutKind k) {
            if (hit) {
              ++matches;
              match = k;
            }
          };
          test(held_e1[e1] != 0, HoldoutKind::E1);
          test(held_r[r] != 0, HoldoutKind::R);
          test(held_e2[e2] != 0, HoldoutKind::E2);
          test(held_a[a] != 0, HoldoutKind::A);
          test(held_e1r[e1 * n_rel + r] != 0, HoldoutKind::E1R);
          test(held_e2a[e2 * n_attr + a] != 0, HoldoutKind::E2A);
          test(held_full.contains((e1 * n_rel + r) * n_attr + a), HoldoutKind::Full);
          if (matches > 1) {
            ++out.excluded_overlap;
            continue;
          }
          auto item = render_question(world, e1, r, a, kind);
          if (match) {
            item.split = holdout_name(*match);
            out.heldout[item.split].push_back(std::move(item));
          } else {
            item.split = kTrainSplit;
            two_hop_train.push_back(std::move(item));
          }
        }
      }
    }
    if (two_hop_train.empty()) throw ConfigError("holdout fractions leave no two-hop question in the train set");

    // A held-out full question only tests composition if both of its hop
    // pairs still occur in train; otherwise it goes back to train.
    auto& held = out.heldout[std::string(holdout_name(HoldoutKind::Full))];
    if (!held.empty()) {
      std::vector<std::uint8_t> first(n * n_rel), second(n * n_attr);
      for (const auto& item : two_hop_train) {
        const auto r = *config.find_attribute(*item.query.r);
        first[item.query.e1 * n_rel + r] = 1;
        second[*item.e2 * n_attr + *config.find_attribute(item.query.a)] = 1;
      }
      std::vector<QAItem> kept;
      std::unordered_set<std::uint64_t> returned;
      for (auto& item : held) {
        const auto r = *config.find_attribute(*item.query.r);
        const auto a = *config.find_attribute(item.query.a);
        if (first[item.query.e1 * n_rel + r] && second[*item.e2 * n_attr + a]) {
          kept.push_back(std::move(item));
        } else {
          returned.insert((item.query.e1 * n_rel + r) * n_attr + a);
          item.split = kTrainSplit;
          two_hop_train.push_back(std::move(item));
        }
      }
      held = std::move(kept);
      std::erase_if(hm.full, [&](const auto& t) { return returned.contains((t[0] * n_rel + t[1]) * n_attr + t[2]); });
    }
  }

  // Train stream: one one-hop item after every mix_ratio two-hop items.
  auto order_rng = make_rng(seed, "train-order");
  shuffle(order_rng, one_hop);
  shuffle(order_rng, two_hop_train);
  out.train.reserve(one_hop.size() + two_hop_train.size());
  std::size_t next_two = 0;
  double credit = 0.0;
  for (auto& item : one_hop) {
    credit += options.mix_ratio;
    while (credit >= 1.0 && next_two < two_hop_train.size()) {
      out.train.push_back(std::move(two_hop_train[next_two++]));
      credit -= 1.0;
    }
    out.train.push_back(std::move(item));
  }
  while (next_two < two_hop_train.size()) out.train.push_back(std::move(two_hop_train[next_two++]));
  return out;
}

}  // namespace hopcap
