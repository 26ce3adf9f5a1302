#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hopcap/dataset_io.hpp"
#include "hopcap/estimator.hpp"

namespace hopcap {

// ---- loss-log validation ----

enum class Severity { Error, Warning };

struct Issue {
  Severity severity = Severity::Error;
  std::string code;  // malformed | unknown_qid | duplicate_qid | positive_logprob | non_finite |
                     // split_mismatch | kind_mismatch | low_coverage | missing_split
  std::size_t line = 0;  // 1-based; 0 for whole-log findings
  std::string message;
};

struct SplitCoverage {
  std::uint64_t expected = 0;
  std::uint64_t seen = 0;
  [[nodiscard]] double fraction() const noexcept {
    return expected == 0 ? 1.0 : static_cast<double>(seen) / static_cast<double>(expected);
  }
};

struct Diagnostics {
  std::vector<Issue> issues;
  std::map<std::string, SplitCoverage> coverage;
  std::uint64_t records = 0;

  [[nodiscard]] std::size_t error_count() const noexcept;
  [[nodiscard]] std::size_t warning_count() const noexcept;
  [[nodiscard]] bool ok() const noexcept { return error_count() == 0; }
  [[nodiscard]] nlohmann::json to_json() const;
};

// Checks JSONL text against the dataset's question inventory.
[[nodiscard]] Diagnostics validate_loss_log_text(std::string_view jsonl, const SplitSet& splits);
// Throws DataError if the file cannot be read.
[[nodiscard]] Diagnostics validate_loss_log(const std::filesystem::path& path, const SplitSet& splits);

// ---- capacity table ----

struct CapacityPoint {
  std::string label;
  std::optional<double> param_count;
  std::string model_kind;  // "one-hop" for one-hop runs, else the model kind
  std::string task;
  double entropy_bits = 0.0;
  double total_loss_bits = 0.0;
  double content_bits = 0.0;
  std::optional<double> bits_per_param;
  double baseline_bits = 0.0;

  // content below baseline or above entropy; noisy logs can do either
  [[nodiscard]] bool below_baseline() const noexcept { return content_bits < baseline_bits - 1e-6; }
  [[nodiscard]] bool above_entropy() const noexcept { return content_bits > entropy_bits + 1e-6; }
};

[[nodiscard]] CapacityPoint make_capacity_point(std::string label, std::optional<double> param_count,
                                                const ContentEstimate& estimate, double baseline_bits);

inline constexpr std::string_view kCapacityHeader =
    "label,param_count,model_kind,task,entropy_bits,total_loss_bits,content_bits,bits_per_param,baseline_bits";

// Rows sorted by (model_kind, param_count, label); numbers with 6 decimals.
[[nodiscard]] std::string capacity_table(std::vector<CapacityPoint> points);
// Inverse of capacity_table. Throws DataError on malformed input.
[[nodiscard]] std::vector<CapacityPoint> parse_capacity_table(std::string_view csv);

// ---- scaling plot ----

struct PlotOptions {
  double capacity_slope = 2.0;                // bits per parameter
  std::optional<double> observed_slope;       // optional second line, e.g. 1.6
  int width = 720;
  int height = 480;
};

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (param_count, content_bits), sorted by params
};

struct PlotFrame {
  double log_x_min = 0.0;  // log10 parameter range
  double log_x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  std::vector<PlotSeries> series;
  std::vector<double> entropy_lines;
  std::vector<double> baseline_lines;
  std::vector<std::string> skipped;  // labels without a parameter count
};

[[nodiscard]] PlotFrame plot_frame(const std::vector<CapacityPoint>& points, const PlotOptions& options = {});
[[nodiscard]] std::string scaling_plot(const std::vector<CapacityPoint>& points, const PlotOptions& options = {});
// Plot straight from CSV text so every plotted number comes from the table.
[[nodiscard]] std::string scaling_plot_from_csv(std::string_view csv, const PlotOptions& options = {});

// ---- named configs ----

// micro: |N|=100, 10x10x10 names, 3 relations, 1 property of 10 values.
// desk:  |N|=1000, full name pools, 5 relations, birth city and birth date.
// trap:  |N|=1000, full name pools, 4 relations, 4 properties.
// full:  |N|=10000, full name pools, 17 relations, 4 properties.
[[nodiscard]] WorldConfig preset_config(std::string_view name);

}  // namespace hopcap
