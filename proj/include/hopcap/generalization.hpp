#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hopcap/estimator.hpp"
#include "hopcap/splits.hpp"
#include "hopcap/world.hpp"

namespace hopcap {

struct PresenceFlags {
  bool facts_one_hop_present = false;   // (e1, r) and (e2, a) as one-hop train items
  bool first_hop_pair_present = false;  // (e1, r) as the first hop of a train two-hop item
  bool second_hop_pair_present = false; // (e2, a) as the second hop
  bool full_question_present = false;   // (e1, r, a) itself

  friend bool operator==(const PresenceFlags&, const PresenceFlags&) = default;
};

// Membership tables over the train split.
class TrainIndex {
 public:
  TrainIndex(const World& world, const std::vector<QAItem>& train);

  // One-hop queries report the presence of the item itself in every flag.
  [[nodiscard]] PresenceFlags presence_flags(const Query& query) const;

 private:
  const World* world_;
  std::size_t attributes_;
  std::size_t relations_;
  std::vector<bool> one_hop_;
  std::vector<bool> first_hop_;
  std::vector<bool> second_hop_;
  std::vector<bool> full_;
};

// The three columns of the prediction table: whether the constituent facts,
// both hop pairs, and the full question appear in training.
[[nodiscard]] bool predict_generalization(ModelKind kind, const PresenceFlags& flags);

struct PredictionRow {
  ModelKind kind;
  bool facts;
  bool pairs;
  bool full;
  bool correct;
};
// The nine rows of the prediction table, in canonical order.
[[nodiscard]] const std::array<PredictionRow, 9>& prediction_table();

enum class InferredKind { Independent, TwoFunction, Recurrent, Inconsistent };
[[nodiscard]] std::string_view to_string(InferredKind kind) noexcept;

// Deltas smaller than this (in bits) are floating-point noise and read as 0.
inline constexpr double kDeltaSnapBits = 1e-9;

struct HoldoutResult {
  double observed_bits = 0.0;  // mean per-answer loss
  double baseline_bits = 0.0;  // mean per-answer uniform-guess loss
  double delta_bits = 0.0;     // baseline - observed
  bool generalizes = false;    // delta > threshold
  std::uint64_t count = 0;
};

struct GeneralizationSignature {
  std::map<std::string, HoldoutResult> holdouts;  // keyed by holdout name, all seven
  double threshold_bits = 0.0;
  std::optional<InferredKind> inferred;

  [[nodiscard]] nlohmann::json to_json() const;
};

// Mean of log2 |V_a| over the items of one split: the loss of uniform guessing.
[[nodiscard]] double uniform_baseline_bits(const WorldConfig& config, const std::vector<QAItem>& items);
// Baselines for the seven holdout splits. Empty holdouts are skipped.
[[nodiscard]] std::map<std::string, double> holdout_baselines(const WorldConfig& config, const SplitSet& splits);

// Throws DomainError naming the first holdout missing from either map.
[[nodiscard]] GeneralizationSignature evaluate_holdouts(const std::map<std::string, AggregateLoss>& aggregates,
                                                        const std::map<std::string, double>& baselines,
                                                        double threshold_bits = 0.0);

// Exact signature match: none -> Independent, only heldout_full -> TwoFunction,
// all -> Recurrent, anything else -> Inconsistent.
[[nodiscard]] InferredKind classify_algorithm(const GeneralizationSignature& signature);

// Per-split aggregates over two-hop records (including chain-of-thought items).
[[nodiscard]] std::map<std::string, AggregateLoss> aggregate_by_split(std::span<const LossRecord> records,
                                                                      KindFilter kind = KindFilter::TwoHop);

// eval mean - train mean, in bits. Throws DomainError when kinds differ.
[[nodiscard]] double generalization_gap(const AggregateLoss& train, const AggregateLoss& eval);

}  // namespace hopcap
