#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hopcap/error.hpp"
#include "hopcap/report.hpp"

namespace hopcap {

namespace {

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

struct Expected {
  std::string split;
  QuestionKind kind;
};

}  // namespace

std::size_t Diagnostics::error_count() const noexcept {
  std::size_t n = 0;
  for (const auto& i : issues) n += i.severity == Severity::Error ? 1 : 0;
  return n;
}

std::size_t Diagnostics::warning_count() const noexcept { return issues.size() - error_count(); }

nlohmann::json Diagnostics::to_json() const {
  nlohmann::json j;
  j["ok"] = ok();
  j["records"] = records;
  j["errors"] = error_count();
  j["warnings"] = warning_count();
  auto list = nlohmann::json::array();
  for (const auto& i : issues) {
    list.push_back({{"severity", to_string(i.severity)}, {"code", i.code}, {"line", i.line}, {"message", i.message}});
  }
  j["issues"] = list;
  auto cov = nlohmann::json::object();
  for (const auto& [split, c] : coverage) {
    cov[split] = {{"expected", c.expected}, {"seen", c.seen}, {"fraction", c.fraction()}};
  }
  j["coverage"] = cov;
  return j;
}

Diagnostics validate_loss_log_text(std::string_view jsonl, const SplitSet& splits) {
  Diagnostics d;
  std::unordered_map<std::string, Expected> expected;
  for (const auto* item : splits.all_items()) {
    expected.emplace(item->qid, Expected{item->split, item->query.kind});
    ++d.coverage[item->split].expected;
  }
  for (auto& [split, c] : d.coverage) c.seen = 0;

  auto add = [&](Severity s, std::string code, std::size_t line, std::string msg) {
    d.issues.push_back({s, std::move(code), line, std::move(msg)});
  };

  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    auto end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const auto line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty() || line == "\r") continue;

    LossRecord rec;
    try {
      rec = loss_record_from_json(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      add(Severity::Error, "malformed", line_no, e.what());
      continue;
    }
    ++d.records;
    if (!std::isfinite(rec.logprob_nats)) {
      add(Severity::Error, "non_finite", line_no, "logprob is not finite for " + rec.qid);
    } else if (rec.logprob_nats > 0.0) {
      add(Severity::Error, "positive_logprob", line_no, "positive logprob for " + rec.qid);
    }
    const auto it = expected.find(rec.qid);
    if (it == expected.end()) {
      add(Severity::Error, "unknown_qid", line_no, "qid not in dataset: " + rec.qid);
      continue;
    }
    if (!seen.insert(rec.qid).second) {
      add(Severity::Error, "duplicate_qid", line_no, "duplicate qid " + rec.qid);
      continue;
    }
    if (rec.split != it->second.split) {
      add(Severity::Error, "split_mismatch", line_no,
          rec.qid + " belongs to " + it->second.split + ", log says " + rec.split);
    }
    if (rec.kind != it->second.kind) {
      add(Severity::Error, "kind_mismatch", line_no, rec.qid + " has kind " + std::string(hopcap::to_string(it->second.kind)));
    }
    ++d.coverage[it->second.split].seen;
  }

  for (const auto& [split, c] : d.coverage) {
    if (c.expected == 0 || c.seen == c.expected) continue;
    std::ostringstream msg;
    msg.precision(6);
    if (c.seen == 0) {
      msg << "no records for split " << split;
      add(Severity::Warning, "missing_split", 0, msg.str());
    } else {
      msg << "split " << split << " covered " << c.seen << "/" << c.expected << " = " << c.fraction();
      add(Severity::Warning, "low_coverage", 0, msg.str());
    }
  }
  return d;
}

Diagnostics validate_loss_log(const std::filesystem::path& path, const SplitSet& splits) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return validate_loss_log_text(ss.str(), splits);
}

}  // namespace hopcap
