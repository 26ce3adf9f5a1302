#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hopcap/splits.hpp"
#include "hopcap/world.hpp"

namespace hopcap {

inline constexpr std::string_view kProfilesFile = "profiles.jsonl";
inline constexpr std::string_view kQaFile = "qa.jsonl";
inline constexpr std::string_view kManifestFile = "manifest.json";

[[nodiscard]] std::string sha256_hex(std::string_view bytes);
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

struct DatasetManifest {
  WorldConfig config;
  std::uint64_t seed = 0;  // split seed; the world seed lives in config
  std::map<std::string, std::uint64_t> counts;
  std::map<std::string, std::string> sha256;  // file name -> hex digest
  double mix_ratio = 0.0;
  bool chain_of_thought = false;
  std::map<std::string, double> holdout_fractions;
  nlohmann::json holdout_manifest;
  std::uint64_t excluded_overlap = 0;

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static DatasetManifest from_json(const nlohmann::json& j);
};

struct Dataset {
  World world;
  SplitSet splits;
  DatasetManifest manifest;
  // sha256 of manifest.json as written; loss logs bind to this value.
  std::string manifest_sha256;
};

// Serialisers used by persist_dataset; exposed so hashes can be computed
// without touching the filesystem.
[[nodiscard]] std::string profiles_jsonl(const World& world);
[[nodiscard]] std::string qa_jsonl(const SplitSet& splits);

// Writes profiles.jsonl, qa.jsonl and manifest.json into dir (created if needed).
DatasetManifest persist_dataset(const SplitSet& splits, const World& world, const SplitOptions& options,
                                const std::filesystem::path& dir);

// Verifies file hashes against the manifest; throws HashMismatchError or DataError.
[[nodiscard]] Dataset load_dataset(const std::filesystem::path& dir);

// Parses manifest.json only.
[[nodiscard]] DatasetManifest load_manifest(const std::filesystem::path& dir);

[[nodiscard]] nlohmann::json qa_item_to_json(const QAItem& item);
[[nodiscard]] QAItem qa_item_from_json(const nlohmann::json& j);

}  // namespace hopcap
