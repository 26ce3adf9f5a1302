#include "hopcap/dataset_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "hopcap/error.hpp"

namespace hopcap {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
void for_each_line(const std::string& content, const std::string& file, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    const std::string_view line(content.data() + pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(file + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(file + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

nlohmann::json DatasetManifest::to_json() const {
  nlohmann::json j;
  j["format"] = "hopcap-dataset/1";
  j["config"] = config;
  j["seed"] = seed;
  j["counts"] = counts;
  j["sha256"] = sha256;
  j["mix_ratio"] = mix_ratio;
  j["cot"] = chain_of_thought ? "answers" : "none";
  j["holdout_fractions"] = holdout_fractions;
  j["holdout_manifest"] = holdout_manifest;
  j["excluded_overlap"] = excluded_overlap;
  return j;
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& j) {
  DatasetManifest m;
  try {
    m.config = j.at("config").get<WorldConfig>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.counts = j.at("counts").get<std::map<std::string, std::uint64_t>>();
    m.sha256 = j.at("sha256").get<std::map<std::string, std::string>>();
    m.mix_ratio = j.at("mix_ratio").get<double>();
    m.chain_of_thought = j.at("cot").get<std::string>() == "answers";
    m.holdout_fractions = j.at("holdout_fractions").get<std::map<std::string, double>>();
    m.holdout_manifest = j.at("holdout_manifest");
    m.excluded_overlap = j.value("excluded_overlap", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

nlohmann::json qa_item_to_json(const QAItem& item) {
  nlohmann::json j;
  j["qid"] = item.qid;
  j["kind"] = to_string(item.query.kind);
  j["e1"] = item.query.e1;
  j["r"] = item.query.r ? nlohmann::json(*item.query.r) : nlohmann::json(nullptr);
  j["a"] = item.query.a;
  j["e2"] = item.e2 ? nlohmann::json(*item.e2) : nlohmann::json(nullptr);
  j["answer"] = item.answer;
  j["text"] = item.text;
  j["split"] = item.split;
  return j;
}

QAItem qa_item_from_json(const nlohmann::json& j) {
  QAItem item;
  item.qid = j.at("qid").get<std::string>();
  item.query.kind = parse_question_kind(j.at("kind").get<std::string>());
  item.query.e1 = j.at("e1").get<EntityId>();
  if (!j.at("r").is_null()) item.query.r = j.at("r").get<std::string>();
  item.query.a = j.at("a").get<std::string>();
  if (!j.at("e2").is_null()) item.e2 = j.at("e2").get<EntityId>();
  item.answer = j.at("answer").get<std::string>();
  item.text = j.at("text").get<std::string>();
  item.split = j.at("split").get<std::string>();
  if (item.query.kind == QuestionKind::OneHop && (item.query.r || item.e2)) {
    throw DataError("one-hop item " + item.qid + " carries r or e2");
  }
  if (item.query.kind != QuestionKind::OneHop && (!item.query.r || !item.e2)) {
    throw DataError("two-hop item " + item.qid + " lacks r or e2");
  }
  return item;
}

std::string profiles_jsonl(const World& world) {
  const auto& c = world.config;
  std::string out;
  for (const auto& p : world.profiles) {
    nlohmann::json rel = nlohmann::json::object();
    for (std::size_t r = 0; r < c.relations.size(); ++r) rel[c.relations[r]] = p.relation_values[r];
    nlohmann::json prop = nlohmann::json::object();
    for (std::size_t k = 0; k < c.properties.size(); ++k) prop[c.properties[k].name] = p.property_values[k];
    const nlohmann::json j{{"id", p.id},       {"first", p.first},        {"middle", p.middle},
                           {"last", p.last},   {"relations", std::move(rel)}, {"properties", std::move(prop)}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string qa_jsonl(const SplitSet& splits) {
  std::string out;
  for (const auto* item : splits.all_items()) {
    out += qa_item_to_json(*item).dump();
    out += '\n';
  }
  return out;
}

DatasetManifest persist_dataset(const SplitSet& splits, const World& world, const SplitOptions& options,
                                const fs::path& dir) {
  fs::create_directories(dir);
  const auto profiles = profiles_jsonl(world);
  const auto qa = qa_jsonl(splits);
  write_file(dir / kProfilesFile, profiles);
  write_file(dir / kQaFile, qa);

  DatasetManifest m;
  m.config = world.config;
  m.seed = options.seed;
  m.counts[std::string(kTrainSplit)] = splits.train.size();
  for (const auto& [name, items] : splits.heldout) m.counts[name] = items.size();
  m.sha256[std::string(kProfilesFile)] = sha256_hex(profiles);
  m.sha256[std::string(kQaFile)] = sha256_hex(qa);
  m.mix_ratio = splits.mix_ratio;
  m.chain_of_thought = splits.chain_of_thought;
  for (const auto kind : kHoldoutKinds) m.holdout_fractions[std::string(holdout_name(kind))] = options.fraction(kind);
  m.holdout_manifest = holdout_manifest_to_json(splits.holdout_manifest, world.config);
  m.excluded_overlap = splits.excluded_overlap;
  write_file(dir / kManifestFile, m.to_json().dump(2) + "\n");
  return m;
}

DatasetManifest load_manifest(const fs::path& dir) {
  const auto text = read_file(dir / kManifestFile);
  try {
    return DatasetManifest::from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest.json: ") + e.what());
  }
}

Dataset load_dataset(const fs::path& dir) {
  Dataset ds;
  const auto manifest_text = read_file(dir / kManifestFile);
  ds.manifest_sha256 = sha256_hex(manifest_text);
  try {
    ds.manifest = DatasetManifest::from_json(nlohmann::json::parse(manifest_text));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest.json: ") + e.what());
  }
  const auto& config = ds.manifest.config;
  config.validate();

  for (const auto file : {kProfilesFile, kQaFile}) {
    const auto it = ds.manifest.sha256.find(std::string(file));
    if (it == ds.manifest.sha256.end()) throw DataError("manifest lacks a sha256 for " + std::string(file));
    const auto actual = sha256_file(dir / file);
    if (actual != it->second) throw HashMismatchError(std::string(file), it->second, actual);
  }

  // profiles
  ds.world.config = config;
  std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> names;
  for_each_line(read_file(dir / kProfilesFile), std::string(kProfilesFile), [&](const nlohmann::json& j) {
    Profile p;
    p.id = j.at("id").get<EntityId>();
    if (p.id != ds.world.profiles.size()) throw DataError("profile ids must be consecutive from 0");
    p.first = j.at("first").get<std::uint32_t>();
    p.middle = j.at("middle").get<std::uint32_t>();
    p.last = j.at("last").get<std::uint32_t>();
    if (p.first >= config.first_names || p.middle >= config.middle_names || p.last >= config.last_names) {
      throw DataError("name index out of pool range");
    }
    if (!names.emplace(p.first, p.middle, p.last).second) throw DataError("duplicate name triple");
    const auto& rel = j.at("relations");
    for (const auto& r : config.relations) {
      const auto v = rel.at(r).get<EntityId>();
      if (v >= config.n_profiles) throw DataError("relation value out of range");
      p.relation_values.push_back(v);
    }
    const auto& prop = j.at("properties");
    for (const auto& spec : config.properties) {
      const auto v = prop.at(spec.name).get<std::uint64_t>();
      if (v >= spec.pool_size) throw DataError("property value out of range");
      p.property_values.push_back(v);
    }
    ds.world.profiles.push_back(std::move(p));
  });
  if (ds.world.profiles.size() != config.n_profiles) throw DataError("profile count differs from n_profiles");

  // questions
  auto& splits = ds.splits;
  for (const auto kind : kHoldoutKinds) splits.heldout[std::string(holdout_name(kind))];
  std::unordered_set<std::string> qids;
  for_each_line(read_file(dir / kQaFile), std::string(kQaFile), [&](const nlohmann::json& j) {
    auto item = qa_item_from_json(j);
    if (!qids.insert(item.qid).second) throw DataError("duplicate qid " + item.qid);
    if (item.query.e1 >= config.n_profiles) throw DataError("e1 out of range in " + item.qid);
    if (item.e2) {
      const auto r = config.find_relation(*item.query.r);
      const auto a = config.find_attribute(item.query.a);
      if (!r || !a) throw DataError("unknown relation or attribute in " + item.qid);
      if (ds.world.relation_target(item.query.e1, *r) != *item.e2) throw DataError("e2 inconsistent in " + item.qid);
      if (ds.world.answer_text(*item.e2, *a) != item.answer) throw DataError("answer inconsistent in " + item.qid);
    }
    if (item.split == kTrainSplit) {
      splits.train.push_back(std::move(item));
    } else {
      auto it = splits.heldout.find(item.split);
      if (it == splits.heldout.end()) throw DataError("unknown split '" + item.split + "'");
      it->second.push_back(std::move(item));
    }
  });

  splits.holdout_manifest = holdout_manifest_from_json(ds.manifest.holdout_manifest, config);
  splits.excluded_overlap = ds.manifest.excluded_overlap;
  splits.mix_ratio = ds.manifest.mix_ratio;
  splits.chain_of_thought = ds.manifest.chain_of_thought;
  return ds;
}

}  // namespace hopcap
