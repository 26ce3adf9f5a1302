#include "hopcap/generalization.hpp"

#include <cmath>

#include "hopcap/error.hpp"

namespace hopcap {

TrainIndex::TrainIndex(const World& world, const std::vector<QAItem>& train)
    : world_(&world),
      attributes_(world.config.attribute_count()),
      relations_(world.config.relation_count()),
      one_hop_(world.size() * attributes_, false),
      first_hop_(world.size() * attributes_, false),
      second_hop_(world.size() * attributes_, false),
      full_(world.size() * attributes_ * relations_, false) {
  for (const auto& item : train) {
    const auto& q = item.query;
    if (q.e1 >= world.size()) throw DomainError("train item references an unknown entity");
    const auto a = world.config.find_attribute(q.a);
    if (!a) throw DomainError("train item references an unknown attribute");
    if (!q.r) {
      one_hop_[q.e1 * attributes_ + *a] = true;
      continue;
    }
    const auto r = world.config.find_relation(*q.r);
    if (!r) throw DomainError("train item references an unknown relation");
    const EntityId e2 = world.relation_target(q.e1, *r);
    first_hop_[q.e1 * attributes_ + *r] = true;
    second_hop_[e2 * attributes_ + *a] = true;
    full_[(static_cast<std::size_t>(q.e1) * relations_ + *r) * attributes_ + *a] = true;
  }
}

PresenceFlags TrainIndex::presence_flags(const Query& query) const {
  if (query.e1 >= world_->size()) throw DomainError("query references an unknown entity");
  const auto a = world_->config.find_attribute(query.a);
  if (!a) throw DomainError("query references an unknown attribute");
  PresenceFlags f;
  if (!query.r) {
    const bool present = one_hop_[query.e1 * attributes_ + *a];
    return {present, present, present, present};
  }
  const auto r = world_->config.find_relation(*query.r);
  if (!r) throw DomainError("query references an unknown relation");
  const EntityId e2 = world_->relation_target(query.e1, *r);
  f.facts_one_hop_present = one_hop_[query.e1 * attributes_ + *r] && one_hop_[e2 * attributes_ + *a];
  f.first_hop_pair_present = first_hop_[query.e1 * attributes_ + *r];
  f.second_hop_pair_present = second_hop_[e2 * attributes_ + *a];
  f.full_question_present = full_[(static_cast<std::size_t>(query.e1) * relations_ + *r) * attributes_ + *a];
  return f;
}

bool predict_generalization(ModelKind kind, const PresenceFlags& flags) {
  switch (kind) {
    case ModelKind::Independent: return flags.full_question_present;
    case ModelKind::TwoFunction: return flags.first_hop_pair_present && flags.second_hop_pair_present;
    case ModelKind::Recurrent: return flags.facts_one_hop_present;
  }
  return false;
}

const std::array<PredictionRow, 9>& prediction_table() {
  static const std::array<PredictionRow, 9> rows = {{
      {ModelKind::Independent, true, true, true, true},
      {ModelKind::Independent, true, true, false, false},
      {ModelKind::Independent, true, false, false, false},
      {ModelKind::TwoFunction, true, true, true, true},
      {ModelKind::TwoFunction, true, true, false, true},
      {ModelKind::TwoFunction, true, false, false, false},
      {ModelKind::Recurrent, true, true, true, true},
      {ModelKind::Recurrent, true, true, false, true},
      {ModelKind::Recurrent, true, false, false, true},
  }};
  return rows;
}

std::string_view to_string(InferredKind kind) noexcept {
  switch (kind) {
    case InferredKind::Independent: return "independent";
    case InferredKind::TwoFunction: return "2f";
    case InferredKind::Recurrent: return "recurrent";
    case InferredKind::Inconsistent: return "inconsistent";
  }
  return "inconsistent";
}

nlohmann::json GeneralizationSignature::to_json() const {
  nlohmann::json j;
  nlohmann::json hs = nlohmann::json::object();
  for (const auto& [name, h] : holdouts) {
    hs[name] = {{"generalizes", h.generalizes},
                {"delta_bits", h.delta_bits},
                {"observed_bits", h.observed_bits},
                {"baseline_bits", h.baseline_bits},
                {"count", h.count}};
  }
  j["holdouts"] = hs;
  j["threshold_bits"] = threshold_bits;
  j["inferred"] = inferred ? nlohmann::json(to_string(*inferred)) : nlohmann::json(nullptr);
  return j;
}

double uniform_baseline_bits(const WorldConfig& config, const std::vector<QAItem>& items) {
  if (items.empty()) throw DomainError("baseline of an empty split");
  long double sum = 0.0L;
  for (const auto& item : items) {
    const auto a = config.find_attribute(item.query.a);
    if (!a) throw DomainError("unknown attribute '" + item.query.a + "'");
    sum += attribute_entropy(config.value_pool(*a));
  }
  return static_cast<double>(sum / static_cast<long double>(items.size()));
}

std::map<std::string, double> holdout_baselines(const WorldConfig& config, const SplitSet& splits) {
  std::map<std::string, double> out;
  for (const auto& [name, items] : splits.heldout) {
    if (!items.empty()) out[name] = uniform_baseline_bits(config, items);
  }
  return out;
}

GeneralizationSignature evaluate_holdouts(const std::map<std::string, AggregateLoss>& aggregates,
                                          const std::map<std::string, double>& baselines, double threshold_bits) {
  if (!std::isfinite(threshold_bits)) throw DomainError("threshold must be finite");
  GeneralizationSignature sig;
  sig.threshold_bits = threshold_bits;
  for (const auto kind : kHoldoutKinds) {
    const std::string name(holdout_name(kind));
    const auto agg = aggregates.find(name);
    if (agg == aggregates.end()) throw DomainError("missing loss records for split " + name);
    const auto base = baselines.find(name);
    if (base == baselines.end()) throw DomainError("missing baseline for split " + name);
    HoldoutResult h;
    h.observed_bits = agg->second.mean_loss_bits();
    h.baseline_bits = base->second;
    h.delta_bits = h.baseline_bits - h.observed_bits;
    if (std::abs(h.delta_bits) <= kDeltaSnapBits) h.delta_bits = 0.0;
    h.generalizes = h.delta_bits > threshold_bits;
    h.count = agg->second.count;
    sig.holdouts[name] = h;
  }
  return sig;
}

InferredKind classify_algorithm(const GeneralizationSignature& signature) {
  std::size_t yes = 0;
  for (const auto kind : kHoldoutKinds) {
    const auto it = signature.holdouts.find(std::string(holdout_name(kind)));
    if (it == signature.holdouts.end()) return InferredKind::Inconsistent;
    if (it->second.generalizes) ++yes;
  }
  if (yes == 0) return InferredKind::Independent;
  if (yes == kHoldoutKinds.size()) return InferredKind::Recurrent;
  const auto full = signature.holdouts.at(std::string(holdout_name(HoldoutKind::Full)));
  if (yes == 1 && full.generalizes) return InferredKind::TwoFunction;
  return InferredKind::Inconsistent;
}

std::map<std::string, AggregateLoss> aggregate_by_split(std::span<const LossRecord> records, KindFilter kind) {
  std::map<std::string, LossAccumulator> acc;
  for (const auto& r : records) {
    if (!matches(kind, r.kind)) continue;
    if (!std::isfinite(r.logprob_nats)) throw DataError("non-finite logprob for " + r.qid);
    if (r.logprob_nats > 0.0) throw DataError("positive logprob for " + r.qid);
    acc[r.split].add(-r.logprob_nats);
  }
  std::map<std::string, AggregateLoss> out;
  for (const auto& [split, a] : acc) {
    AggregateLoss agg;
    agg.mean_loss_nats = a.mean();
    agg.var_loss_nats = a.variance();
    agg.count = a.count();
    agg.split = split;
    agg.kind = kind;
    out[split] = agg;
  }
  return out;
}

double generalization_gap(const AggregateLoss& train, const AggregateLoss& eval) {
  if (train.kind != eval.kind) throw DomainError("generalization gap across different question kinds");
  return eval.mean_loss_bits() - train.mean_loss_bits();
}

}  // namespace hopcap
