#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hopcap/entropy.hpp"
#include "hopcap/loss_log.hpp"

namespace hopcap {

inline constexpr double kLn2 = 0.693147180559945309417232121458176568;

[[nodiscard]] inline double nats_to_bits(double nats) noexcept { return nats / kLn2; }

enum class KindFilter { Any, OneHop, TwoHop };  // TwoHop matches CoT items too

[[nodiscard]] std::string_view to_string(KindFilter kind) noexcept;
[[nodiscard]] bool matches(KindFilter filter, QuestionKind kind) noexcept;

struct LossFilter {
  std::optional<std::string> split;  // absent: every split
  KindFilter kind = KindFilter::Any;
};

struct AggregateLoss {
  double mean_loss_nats = 0.0;
  double var_loss_nats = 0.0;  // population variance
  std::uint64_t count = 0;
  std::optional<std::string> split;
  KindFilter kind = KindFilter::Any;

  [[nodiscard]] double mean_loss_bits() const noexcept { return nats_to_bits(mean_loss_nats); }
  [[nodiscard]] nlohmann::json to_json() const;
};

// Welford accumulator; merge() combines partial aggregates in any grouping.
class LossAccumulator {
 public:
  void add(double loss_nats) noexcept;
  void merge(const LossAccumulator& other) noexcept;

  [[nodiscard]] std::uint64_t count() const noexcept { return count_; }
  [[nodiscard]] double mean() const noexcept { return mean_; }
  [[nodiscard]] double variance() const noexcept;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Loss = -logprob. Throws DataError for positive or non-finite logprobs and
// DomainError when no record matches the filter.
[[nodiscard]] AggregateLoss aggregate_losses(std::span<const LossRecord> records, const LossFilter& filter);

enum class Branch { AboveThreshold, BelowThreshold, Clamped };
[[nodiscard]] std::string_view to_string(Branch branch) noexcept;

// Per-hop probabilities imputed from an observed two-hop loss.
struct EffectiveLoss {
  ModelKind model = ModelKind::Recurrent;
  // Recurrent: per-hop loss -ln u. Two-function: summed loss -ln p1 - ln p2.
  double loss_nats = 0.0;
  Branch branch = Branch::AboveThreshold;
  double q_raw = 0.0;    // exp(-mean) with the optional variance factor, before clamping
  double q_tilde = 0.0;  // after clamping to [1/n, 1]
  double u = 0.0;        // geometric-mean hop probability
  double hop1_prob = 0.0;
  double hop2_prob = 0.0;
  std::optional<double> epsilon;  // sqrt(hop1 / hop2), two-function only

  [[nodiscard]] nlohmann::json to_json() const;
};

// 2/n - 1/n^2: the two-hop probability at which the two-function optimum
// switches from pinning the first hop at chance to pinning the second at 1.
[[nodiscard]] double two_function_threshold(double n) noexcept;

// Inverts q = u^2 + (1 - u)/n for the per-hop probability u in [1/n, 1].
// q = exp(-mean), times (1 + var/2) when variance_correction is set.
[[nodiscard]] EffectiveLoss effective_loss_recurrent(double mean_loss_nats, double var_loss_nats, std::uint64_t n,
                                                     bool variance_correction = false);

// Smallest hop-probability product p1*p2 compatible with
// q = p1*p2 + (1 - p1)/n, p1, p2 in [1/n, 1], with q = exp(-mean)(1 + var/2).
[[nodiscard]] EffectiveLoss effective_loss_two_function(double mean_loss_nats, double var_loss_nats,
                                                        std::uint64_t n);

struct FactCounts {
  std::uint64_t entities = 0;
  std::uint64_t relations = 0;
  std::uint64_t attributes = 0;

  [[nodiscard]] static FactCounts from_config(const WorldConfig& config) noexcept;
};

enum class VarianceCorrection { TwoFunctionOnly, Both };
[[nodiscard]] VarianceCorrection parse_variance_correction(std::string_view text);

struct ContentEstimate {
  double entropy_bits = 0.0;
  double total_loss_bits = 0.0;
  double content_bits = 0.0;  // lower bound
  Task task = Task::OneHop;
  std::optional<ModelKind> model_kind;
  std::uint64_t fact_count = 0;
  double unit_loss_bits = 0.0;  // loss charged per counted fact
  std::optional<EffectiveLoss> effective;

  [[nodiscard]] nlohmann::json to_json() const;
};

// content = entropy - fact_count * unit loss, with
//   one-hop:      |N||A| * mean one-hop loss
//   independent:  |N||R||A| * mean two-hop loss
//   recurrent:    |N||A| * per-hop effective loss
//   two-function: |N||A| * summed effective loss
[[nodiscard]] ContentEstimate content_estimate(Task task, std::optional<ModelKind> model_kind,
                                               const EntropyReport& entropy, const AggregateLoss& aggregate,
                                               const FactCounts& counts,
                                               VarianceCorrection correction = VarianceCorrection::TwoFunctionOnly);

// Convenience: entropy and counts from the config.
[[nodiscard]] ContentEstimate estimate_content(const WorldConfig& config, Task task,
                                               std::optional<ModelKind> model_kind, const AggregateLoss& aggregate,
                                               VarianceCorrection correction = VarianceCorrection::TwoFunctionOnly);

[[nodiscard]] double bits_per_parameter(double content_bits, double param_count);

}  // namespace hopcap
