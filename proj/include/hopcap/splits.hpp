#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hopcap/questions.hpp"
#include "hopcap/world.hpp"

namespace hopcap {

enum class HoldoutKind { E1, R, E2, A, E1R, E2A, Full };

inline constexpr std::array<HoldoutKind, 7> kHoldoutKinds = {
    HoldoutKind::E1,  HoldoutKind::R,   HoldoutKind::E2,  HoldoutKind::A,
    HoldoutKind::E1R, HoldoutKind::E2A, HoldoutKind::Full};

inline constexpr std::string_view kTrainSplit = "train";

// heldout_e1, heldout_r, heldout_e2, heldout_a, heldout_e1r, heldout_e2a, heldout_full
[[nodiscard]] std::string_view holdout_name(HoldoutKind kind) noexcept;
[[nodiscard]] std::optional<HoldoutKind> parse_holdout_name(std::string_view name) noexcept;

// The held-out components chosen for each holdout kind. Attributes are
// attribute indices (relations first, then properties).
struct HoldoutManifest {
  std::vector<EntityId> e1;
  std::vector<std::size_t> r;
  std::vector<EntityId> e2;
  std::vector<std::size_t> a;
  std::vector<std::pair<EntityId, std::size_t>> e1r;
  std::vector<std::pair<EntityId, std::size_t>> e2a;
  std::vector<std::array<std::uint64_t, 3>> full;  // (e1, r, a)

  friend bool operator==(const HoldoutManifest&, const HoldoutManifest&) = default;
};

[[nodiscard]] nlohmann::json holdout_manifest_to_json(const HoldoutManifest& manifest, const WorldConfig& config);
[[nodiscard]] HoldoutManifest holdout_manifest_from_json(const nlohmann::json& j, const WorldConfig& config);

struct SplitOptions {
  std::map<HoldoutKind, double> holdout_fractions;  // missing kinds hold out nothing
  double mix_ratio = 10.0;                          // two-hop items per one-hop item in the train stream
  bool chain_of_thought = false;                    // render two-hop items as TwoHopCoT
  std::uint64_t seed = 0;

  [[nodiscard]] double fraction(HoldoutKind kind) const;
  [[nodiscard]] static SplitOptions uniform(double fraction, double mix_ratio, std::uint64_t seed,
                                            bool chain_of_thought = false);
};

struct SplitSet {
  std::vector<QAItem> train;
  std::map<std::string, std::vector<QAItem>> heldout;  // keyed by holdout name; all seven always present
  HoldoutManifest holdout_manifest;
  // Two-hop questions featuring components of two or more holdout kinds.
  // They are kept out of train and out of every holdout set so that each
  // holdout set isolates exactly one missing component.
  std::uint64_t excluded_overlap = 0;
  double mix_ratio = 0.0;
  bool chain_of_thought = false;

  [[nodiscard]] std::size_t item_count() const noexcept;
  // Every item, train first then the holdout sets in kHoldoutKinds order.
  [[nodiscard]] std::vector<const QAItem*> all_items() const;

  friend bool operator==(const SplitSet&, const SplitSet&) = default;
};

// Number of components held out for a pool of the given size: ceil(fraction * pool)
// when fraction > 0, else 0.
[[nodiscard]] std::uint64_t holdout_count(double fraction, std::uint64_t pool);

[[nodiscard]] SplitSet build_splits(const World& world, const SplitOptions& options);

}  // namespace hopcap
