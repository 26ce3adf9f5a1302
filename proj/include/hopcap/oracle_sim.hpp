#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hopcap/entropy.hpp"
#include "hopcap/loss_log.hpp"
#include "hopcap/splits.hpp"
#include "hopcap/world.hpp"

namespace hopcap {

// Known per-fact probabilities of answering correctly. Dense storage indexed
// (entity, attribute) or (e1, relation, attribute), attributes in config order.
//
//   Recurrent:    facts only; both hops read it.
//   TwoFunction:  hop1 (first-hop function) and hop2 (second-hop function),
//                 both over (entity, attribute); one-hop questions read hop2.
//                 Only relation entries of hop1 are ever queried.
//   Independent:  memo over (e1, r, a) for two-hop questions; facts answers
//                 one-hop questions and is not counted as content.
struct ReliabilityProfile {
  ModelKind model_kind = ModelKind::Recurrent;
  std::uint64_t entities = 0;
  std::size_t relations = 0;
  std::size_t attributes = 0;
  std::vector<double> facts;
  std::vector<double> hop1;
  std::vector<double> hop2;
  std::vector<double> memo;

  [[nodiscard]] std::size_t fact_index(EntityId e, std::size_t a) const noexcept { return e * attributes + a; }
  [[nodiscard]] std::size_t memo_index(EntityId e1, std::size_t r, std::size_t a) const noexcept {
    return (static_cast<std::size_t>(e1) * relations + r) * attributes + a;
  }

  // Reliability an entity-valued first hop (e1, r) succeeds with.
  [[nodiscard]] double first_hop(EntityId e1, std::size_t r) const;
  // Reliability of the attribute lookup (e, a), second hop or one-hop.
  [[nodiscard]] double second_hop(EntityId e, std::size_t a) const;
  [[nodiscard]] double one_hop(EntityId e, std::size_t a) const;

  // Throws DomainError if sizes do not match the config or any probability
  // falls outside [1/|V_a|, 1].
  void validate(const WorldConfig& config) const;
};

// Every probability equal to p, raised to 1/|V_a| where the pool is smaller
// than 1/p.
[[nodiscard]] ReliabilityProfile uniform_profile(ModelKind kind, const WorldConfig& config, double p);
// p = 1/|N| everywhere (chance for entity-valued facts).
[[nodiscard]] ReliabilityProfile chance_profile(ModelKind kind, const WorldConfig& config);
// Each entry independently `high` with probability high_fraction, else `low`.
[[nodiscard]] ReliabilityProfile two_point_profile(ModelKind kind, const WorldConfig& config, double low,
                                                   double high, double high_fraction, std::uint64_t seed);

// Uniform spread of budget_bits over the counted units of the model kind: a
// unit with answer entropy b gets loss max(0, b - budget/units) bits.
[[nodiscard]] ReliabilityProfile allocate_budget(ModelKind kind, double budget_bits, const WorldConfig& config);

// Number of units ground_truth_content charges for this kind.
[[nodiscard]] std::uint64_t storable_units(ModelKind kind, const WorldConfig& config, bool strict = false);

// Textual reliability selector used by the CLI:
//   0.5 | chance | budget:BITS | mix:LOW:HIGH:FRACTION
struct ReliabilitySpec {
  enum class Type { Value, Chance, Budget, Mixture } type = Type::Value;
  double value = 1.0;  // probability or budget bits
  double low = 0.0;
  double high = 0.0;
  double fraction = 0.0;

  [[nodiscard]] std::string to_string() const;
};
[[nodiscard]] ReliabilitySpec parse_reliability(std::string_view text);
[[nodiscard]] ReliabilityProfile build_profile(ModelKind kind, const WorldConfig& config, const ReliabilitySpec& spec,
                                               std::uint64_t seed);

// Where the mass of a failed first hop lands: uniformly over the |N|
// entities, or (strict) over the answer's own value pool.
enum class FallbackPool { Entity, AnswerPool };

// q = p(e1,r) p(e2,a) + (1 - p(e1,r))/fallback for composed models, memo
// for Independent. Ignores training exposure.
[[nodiscard]] double simulate_two_hop_prob(const World& world, const ReliabilityProfile& profile, const Query& query,
                                           FallbackPool fallback = FallbackPool::Entity);

// Which facts, hop pairs and full questions the train split exposes.
struct TrainExposure {
  std::uint64_t entities = 0;
  std::size_t relations = 0;
  std::size_t attributes = 0;
  std::vector<bool> fact;        // (e, a) in any role
  std::vector<bool> first_hop;   // (e1, r) as the first hop of a two-hop item
  std::vector<bool> second_hop;  // (e2, a) as the second hop
  std::vector<bool> full;        // (e1, r, a) as a two-hop item

  [[nodiscard]] static TrainExposure from_train(const World& world, const std::vector<QAItem>& train);
};

// Probability of the correct answer after training on the exposed items.
// Anything the model kind cannot have learned answers at chance 1/|V_a|
// (TwoFunction: a missing hop pair; Independent: a missing full question;
// Recurrent: a missing fact, at chance inside the composition).
[[nodiscard]] double simulate_question_prob(const World& world, const ReliabilityProfile& profile,
                                            const TrainExposure& exposure, const Query& query,
                                            FallbackPool fallback = FallbackPool::Entity);

struct SimulationOptions {
  FallbackPool fallback = FallbackPool::Entity;
  double noise_sd = 0.0;  // Gaussian noise on ln q, capped at 0
  std::uint64_t seed = 0;
};

// One record per item of the split set, sorted by qid.
[[nodiscard]] std::vector<LossRecord> generate_loss_log(const World& world, const ReliabilityProfile& profile,
                                                        const SplitSet& splits, const SimulationOptions& options = {});

// Matching entropy minus the exact per-fact loss in bits.
[[nodiscard]] double ground_truth_content(const WorldConfig& config, const ReliabilityProfile& profile,
                                          const EntropyOptions& options = {});

// Per-question gradient weight of a two-hop answer relative to a one-hop answer.
[[nodiscard]] double loss_impact_ratio(double mix_ratio, std::uint64_t n_relations);

}  // namespace hopcap
