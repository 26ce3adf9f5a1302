#include "hopcap/loss_log.hpp"

#include <fstream>
#include <sstream>

#include "hopcap/error.hpp"

namespace hopcap {

nlohmann::json to_json(const LossRecord& record) {
  return nlohmann::json{{"qid", record.qid},
                        {"split", record.split},
                        {"kind", to_string(record.kind)},
                        {"logprob_nats", record.logprob_nats}};
}

LossRecord loss_record_from_json(const nlohmann::json& j) {
  LossRecord r;
  try {
    r.qid = j.at("qid").get<std::string>();
    r.split = j.at("split").get<std::string>();
    r.kind = parse_question_kind(j.at("kind").get<std::string>());
    const auto& lp = j.at("logprob_nats");
    if (!lp.is_number()) throw DataError("logprob_nats must be a number");
    r.logprob_nats = lp.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed loss record: ") + e.what());
  } catch (const DomainError& e) {
    throw DataError(std::string("malformed loss record: ") + e.what());
  }
  return r;
}

std::string loss_log_jsonl(std::span<const LossRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

void write_loss_log(const std::filesystem::path& path, std::span<const LossRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  const auto text = loss_log_jsonl(records);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::vector<LossRecord> read_loss_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<LossRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(loss_record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.filename().string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path.filename().string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["label"] = label;
  j["param_count"] = param_count ? nlohmann::json(*param_count) : nlohmann::json(nullptr);
  j["dataset_manifest_sha256"] = dataset_manifest_sha256;
  if (!model.empty()) j["model"] = model;
  if (!reliability.empty()) j["reliability"] = reliability;
  if (seed) j["seed"] = *seed;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.label = j.value("label", std::string{});
    if (j.contains("param_count") && !j.at("param_count").is_null()) m.param_count = j.at("param_count").get<double>();
    m.dataset_manifest_sha256 = j.at("dataset_manifest_sha256").get<std::string>();
    m.model = j.value("model", std::string{});
    m.reliability = j.value("reliability", std::string{});
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed run manifest: ") + e.what());
  }
  return m;
}

std::filesystem::path run_manifest_path(const std::filesystem::path& loss_log) {
  auto p = loss_log;
  p.replace_extension(".json");
  return p;
}

void write_run_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << manifest.to_json().dump(2) << '\n';
}

std::optional<RunManifest> read_run_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return RunManifest::from_json(nlohmann::json::parse(ss.str()));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed " + path.string() + ": " + e.what());
  }
}

}  // namespace hopcap
