#include <doctest.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hopcap/cli.hpp"
#include "support.hpp"

using namespace hopcap;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli: entropy from a preset") {
  const auto r = run({"entropy", "--config", "micro", "--task", "two-hop", "--model", "2f"});
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j.at("total_bits").get<double>() == doctest::Approx(5647.277761308516).epsilon(1e-9));
  CHECK(j.at("baseline_bits").get<double>() == doctest::Approx(996.5784284662087).epsilon(1e-9));
}

TEST_CASE("cli: usage errors exit 2") {
  CHECK(run({"entropy", "--bogus"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"entropy", "--config", "no-such-preset"}).code == kExitUsage);
  CHECK(run({"entropy", "--config", "micro", "--model", "lstm"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("cli: full pipeline on the micro world") {
  const auto t0 = std::chrono::steady_clock::now();
  testing::TempDir tmp("cli");
  const auto ds = (tmp / "ds").string();
  REQUIRE(run({"gen", "--config", "micro", "--seed", "5", "--holdout-frac", "0.05", "--out", ds}).code == kExitOk);
  for (const char* f : {"manifest.json", "profiles.jsonl", "qa.jsonl", "vocab.json"})
    CHECK(std::filesystem::exists(tmp / ("ds/" + std::string(f))));

  const auto losses = (tmp / "runs/2f.jsonl").string();
  const auto sim = run({"simulate", "--dataset", ds, "--model", "2f", "--reliability", "0.9", "--param-count",
                        "1000", "--seed", "1", "--out", losses});
  REQUIRE(sim.code == kExitOk);
  const double truth = json::parse(sim.out).at("ground_truth_content_bits").get<double>();
  CHECK(std::filesystem::exists(tmp / "runs/2f.json"));

  const auto est = run({"estimate", "--dataset", ds, "--losses", losses, "--model", "2f"});
  REQUIRE(est.code == kExitOk);
  const auto ej = json::parse(est.out);
  CHECK(ej.at("content_bits").get<double>() == doctest::Approx(truth).epsilon(0.01));
  CHECK(ej.at("bound") == "lower");
  CHECK(ej.at("bits_per_param").get<double>() == doctest::Approx(truth / 1000).epsilon(0.01));

  const auto cls = run({"classify", "--dataset", ds, "--losses", losses});
  REQUIRE(cls.code == kExitOk);
  CHECK(json::parse(cls.out).at("inferred") == "2f");

  const auto val = run({"validate", "--dataset", ds, "--losses", losses});
  CHECK(val.code == kExitOk);

  const auto rec = (tmp / "runs/rec.jsonl").string();
  REQUIRE(run({"simulate", "--dataset", ds, "--model", "recurrent", "--reliability", "0.5", "--param-count", "2000",
               "--out", rec})
              .code == kExitOk);
  const auto rep_dir = (tmp / "report").string();
  const auto rep = run({"report", "--dataset", ds, "--runs", losses, rec, "--out", rep_dir});
  REQUIRE(rep.code == kExitOk);
  const auto csv = slurp(tmp / "report/capacity.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(slurp(tmp / "report/scaling.svg").find("ref-capacity") != std::string::npos);
  // rerun is byte-identical
  REQUIRE(run({"report", "--dataset", ds, "--runs", losses, rec, "--out", rep_dir}).code == kExitOk);
  CHECK(slurp(tmp / "report/capacity.csv") == csv);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 60.0);
}

TEST_CASE("cli: loss logs bound to another dataset are refused") {
  testing::TempDir tmp("cli-hash");
  const auto a = (tmp / "a").string();
  const auto b = (tmp / "b").string();
  REQUIRE(run({"gen", "--config", "micro", "--seed", "1", "--out", a}).code == kExitOk);
  REQUIRE(run({"gen", "--config", "micro", "--seed", "2", "--out", b}).code == kExitOk);
  const auto losses = (tmp / "a.jsonl").string();
  REQUIRE(run({"simulate", "--dataset", a, "--model", "recurrent", "--reliability", "0.9", "--out", losses}).code ==
          kExitOk);

  const auto refused = run({"estimate", "--dataset", b, "--losses", losses, "--model", "recurrent"});
  CHECK(refused.code == kExitValidation);
  CHECK(refused.err.find("hash") != std::string::npos);
  CHECK(run({"classify", "--dataset", b, "--losses", losses}).code == kExitValidation);
  CHECK(run({"estimate", "--dataset", b, "--losses", losses, "--model", "recurrent", "--allow-hash-mismatch"}).code ==
        kExitOk);

  // no sidecar at all
  std::filesystem::remove(tmp / "a.json");
  CHECK(run({"estimate", "--dataset", a, "--losses", losses, "--model", "recurrent"}).code == kExitValidation);
}

TEST_CASE("cli: validate exit codes") {
  testing::TempDir tmp("cli-val");
  const auto ds = (tmp / "ds").string();
  REQUIRE(run({"gen", "--config", "micro", "--out", ds}).code == kExitOk);
  const auto losses = tmp / "run.jsonl";
  REQUIRE(run({"simulate", "--dataset", ds, "--model", "independent", "--reliability", "0.5", "--out",
               losses.string()})
              .code == kExitOk);
  auto text = slurp(losses);
  text += "{\"qid\":\"2h:0:mother:nowhere\",\"split\":\"train\",\"kind\":\"two_hop\",\"logprob_nats\":-1}\n";
  std::ofstream(losses, std::ios::trunc) << text;
  const auto r = run({"validate", "--dataset", ds, "--losses", losses.string()});
  CHECK(r.code == kExitValidation);
  CHECK(r.out.find("unknown_qid") != std::string::npos);
  CHECK(run({"validate", "--dataset", ds, "--losses", (tmp / "missing.jsonl").string()}).code == kExitValidation);
}
