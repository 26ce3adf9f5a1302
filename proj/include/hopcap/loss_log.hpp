#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopcap/questions.hpp"

namespace hopcap {

// One observation from a trainer or simulator: the natural-log probability
// of the complete answer to question qid, summed over its answer tokens.
struct LossRecord {
  std::string qid;
  std::string split;
  QuestionKind kind = QuestionKind::OneHop;
  double logprob_nats = 0.0;

  [[nodiscard]] double loss_nats() const noexcept { return -logprob_nats; }

  friend bool operator==(const LossRecord&, const LossRecord&) = default;
};

// {"qid", "split", "kind", "logprob_nats"}
[[nodiscard]] nlohmann::json to_json(const LossRecord& record);
// Structural parse only; value checks belong to aggregation and validation.
[[nodiscard]] LossRecord loss_record_from_json(const nlohmann::json& j);

[[nodiscard]] std::string loss_log_jsonl(std::span<const LossRecord> records);
void write_loss_log(const std::filesystem::path& path, std::span<const LossRecord> records);
// Throws DataError with the offending line number on malformed input.
[[nodiscard]] std::vector<LossRecord> read_loss_log(const std::filesystem::path& path);

// Sidecar written next to a loss log (run.jsonl -> run.json).
struct RunManifest {
  std::string label;
  std::optional<double> param_count;
  std::string dataset_manifest_sha256;
  std::string model;        // free-form producer description
  std::string reliability;  // simulator only
  std::optional<std::uint64_t> seed;

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static RunManifest from_json(const nlohmann::json& j);
};

[[nodiscard]] std::filesystem::path run_manifest_path(const std::filesystem::path& loss_log);
void write_run_manifest(const std::filesystem::path& path, const RunManifest& manifest);
[[nodiscard]] std::optional<RunManifest> read_run_manifest(const std::filesystem::path& path);

}  // namespace hopcap
