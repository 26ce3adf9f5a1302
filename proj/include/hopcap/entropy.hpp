#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <json.hpp>

#include "hopcap/world.hpp"

namespace hopcap {

enum class ModelKind { Recurrent, TwoFunction, Independent };
enum class Task { OneHop, TwoHop };

// "recurrent" | "2f" | "independent"
[[nodiscard]] std::string_view to_string(ModelKind kind) noexcept;
[[nodiscard]] ModelKind parse_model_kind(std::string_view text);
// "one-hop" | "two-hop"
[[nodiscard]] std::string_view to_string(Task task) noexcept;
[[nodiscard]] Task parse_task(std::string_view text);

// n * log2(n0): the cost of naming n profiles drawn from n0 possible names.
// This overstates the exact log2 C(n0, n); the gap is negligible for n << n0.
[[nodiscard]] double name_selection_entropy(std::uint64_t n, std::uint64_t n0);
// log2 C(n0, n) through lgamma.
[[nodiscard]] double name_selection_exact_bits(std::uint64_t n, std::uint64_t n0);

// n/n0 above which reports carry the exact name entropy next to the approximation.
inline constexpr double kNameApproximationReportRatio = 1e-3;

// log2 of the value-pool size; 0 for a single-valued attribute.
[[nodiscard]] double attribute_entropy(std::uint64_t value_pool_size);

struct EntropyOptions {
  // Charge the second copy of the facts for relations only (first hops can
  // only be relations) instead of for every attribute.
  bool strict_two_function = false;
};

struct EntropyReport {
  double name_bits = 0.0;
  double fact_bits_per_pass = 0.0;  // |N| * sum_a log2 |V_a|
  double multiplier = 1.0;          // total = name + multiplier * fact_bits_per_pass
  double total_bits = 0.0;
  Task task = Task::OneHop;
  std::optional<ModelKind> model_kind;  // absent for one-hop
  bool strict = false;
  // Present when n / n0 > kNameApproximationReportRatio.
  std::optional<double> name_bits_exact;

  [[nodiscard]] nlohmann::json to_json() const;
};

// E1, E2 recurrent (= E1), E2 two-function, E2 independent. model_kind is
// ignored for Task::OneHop and required for Task::TwoHop.
[[nodiscard]] EntropyReport dataset_entropy(const WorldConfig& config, Task task,
                                            std::optional<ModelKind> model_kind = std::nullopt,
                                            const EntropyOptions& options = {});

// Total loss, in bits, of a model that answers every stored unit with the
// uniform distribution over its value pool.
[[nodiscard]] double uniform_guess_loss_bits(const WorldConfig& config, Task task,
                                             std::optional<ModelKind> model_kind = std::nullopt,
                                             const EntropyOptions& options = {});

// Content of the uniform-guessing model: dataset entropy minus its loss.
[[nodiscard]] double baseline_content(const WorldConfig& config, Task task,
                                      std::optional<ModelKind> model_kind = std::nullopt,
                                      const EntropyOptions& options = {});

// Rounds to 6 decimal places for reporting.
[[nodiscard]] double round_bits(double bits) noexcept;

}  // namespace hopcap
