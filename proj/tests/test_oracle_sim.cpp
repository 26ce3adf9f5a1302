#include <doctest.h>

#include <cmath>
#include <set>

#include "hopcap/error.hpp"
#include "hopcap/estimator.hpp"
#include "hopcap/generalization.hpp"
#include "hopcap/oracle_sim.hpp"

using namespace hopcap;

namespace {

WorldConfig micro() {
  WorldConfig c;
  c.n_profiles = 100;
  c.first_names = c.middle_names = c.last_names = 10;
  c.relations = {"mother", "father", "boss"};
  c.properties = {{"birth city", 10}};
  c.seed = 7;
  return c;
}

// Every pool equal to |N|, so homogeneous chance is exact everywhere.
WorldConfig flat(std::uint64_t n, std::size_t relations, std::uint64_t seed = 3) {
  auto c = full_scale_config(n, relations, 0, seed);
  c.properties = {{"birth city", n}, {"employer", n}};
  return c;
}

double estimate_from_log(const WorldConfig& c, ModelKind kind, const std::vector<LossRecord>& log) {
  const auto a = aggregate_losses(log, {std::string("train"), KindFilter::TwoHop});
  return estimate_content(c, Task::TwoHop, kind, a).content_bits;
}

}  // namespace

TEST_CASE("simulate_two_hop_prob: trivial and reference cases") {
  const auto c = full_scale_config(1000, 3, 1, 2);
  const auto w = generate_world(c);
  const Query q{5, "mother", "birth city", QuestionKind::TwoHop};
  for (auto k : {ModelKind::Recurrent, ModelKind::TwoFunction, ModelKind::Independent}) {
    CHECK(simulate_two_hop_prob(w, uniform_profile(k, c, 1.0), q) == 1.0);
  }
  // relation-valued second hop at chance: q = 1/|N|
  const Query rel{5, "mother", "father", QuestionKind::TwoHop};
  CHECK(simulate_two_hop_prob(w, chance_profile(ModelKind::Recurrent, c), rel) == doctest::Approx(0.001).epsilon(1e-12));

  auto p = uniform_profile(ModelKind::Recurrent, c, 0.5);
  p.facts[p.fact_index(5, 0)] = 0.8;
  const EntityId e2 = w.relation_target(5, 0);
  REQUIRE(p.facts[p.fact_index(e2, 3)] == 0.5);
  CHECK(simulate_two_hop_prob(w, p, q) == doctest::Approx(0.4002).epsilon(1e-12));

  auto t = uniform_profile(ModelKind::TwoFunction, c, 0.5);
  t.hop1[t.fact_index(5, 0)] = 0.8;
  CHECK(simulate_two_hop_prob(w, t, q) == doctest::Approx(0.4002).epsilon(1e-12));
  // strict fallback spreads a miss over the answer pool instead
  CHECK(simulate_two_hop_prob(w, t, q, FallbackPool::AnswerPool) == doctest::Approx(0.4 + 0.2 / 1000).epsilon(1e-12));

  CHECK_THROWS_AS(simulate_two_hop_prob(w, p, Query{5, std::nullopt, "mother", QuestionKind::OneHop}), DomainError);
  CHECK_THROWS_AS(simulate_two_hop_prob(w, uniform_profile(ModelKind::Recurrent, micro(), 1.0), q), DomainError);
}

TEST_CASE("ground truth content: trivial and reference cases") {
  const auto c = micro();
  CHECK(ground_truth_content(c, uniform_profile(ModelKind::Recurrent, c, 0.5)) ==
        doctest::Approx(2921.928094887362).epsilon(1e-12));
  for (auto k : {ModelKind::Recurrent, ModelKind::TwoFunction, ModelKind::Independent}) {
    const double entropy = dataset_entropy(c, Task::TwoHop, k).total_bits;
    CHECK(ground_truth_content(c, uniform_profile(k, c, 1.0)) == doctest::Approx(entropy).epsilon(1e-15));
  }
  // chance for every fact: per-pool uniform, so only the names remain
  const auto names = name_selection_entropy(100, 1000);
  for (auto k : {ModelKind::Recurrent, ModelKind::TwoFunction, ModelKind::Independent}) {
    const auto chance = allocate_budget(k, 0.0, c);
    CHECK(std::abs(ground_truth_content(c, chance) - names) < 1e-6);
  }
  const auto strict = uniform_profile(ModelKind::TwoFunction, c, 1.0);
  CHECK(ground_truth_content(c, strict, {true}) ==
        doctest::Approx(dataset_entropy(c, Task::TwoHop, ModelKind::TwoFunction, {true}).total_bits));
}

TEST_CASE("allocate_budget: reference arithmetic") {
  WorldConfig c;
  c.n_profiles = 100;
  c.first_names = c.middle_names = c.last_names = 10;
  c.properties = {{"code", 1024}};  // 100 units of 10 bits
  CHECK(storable_units(ModelKind::Recurrent, c) == 100);
  const auto half = allocate_budget(ModelKind::Recurrent, 500, c);
  for (double p : half.facts) CHECK(p == doctest::Approx(std::exp2(-5.0)).epsilon(1e-15));
  for (double budget : {1000.0, 5000.0}) {
    for (double p : allocate_budget(ModelKind::Recurrent, budget, c).facts) CHECK(p == 1.0);
  }
  for (double p : allocate_budget(ModelKind::Recurrent, 0, c).facts) CHECK(p == doctest::Approx(1.0 / 1024));
  CHECK_THROWS_AS(allocate_budget(ModelKind::Recurrent, -1, c), DomainError);
}

TEST_CASE("property: budget content is monotone and below the capacity bound") {
  const auto c = micro();
  const double names = name_selection_entropy(100, 1000);
  for (auto k : {ModelKind::Recurrent, ModelKind::TwoFunction, ModelKind::Independent}) {
    const double entropy = dataset_entropy(c, Task::TwoHop, k).total_bits;
    double prev = -INFINITY;
    for (int i = 0; i <= 60; ++i) {
      const double budget = i * 200.0;
      const double content = ground_truth_content(c, allocate_budget(k, budget, c));
      CHECK(content >= prev - 1e-9);
      CHECK(content <= std::min(budget + names, entropy) + 1e-6);
      prev = content;
    }
  }
}

TEST_CASE("loss impact ratio") {
  CHECK(loss_impact_ratio(10, 4) == 2.5);
  CHECK(loss_impact_ratio(10, 17) == doctest::Approx(0.5882352941176471).epsilon(1e-15));
  CHECK(loss_impact_ratio(0, 9) == 0.0);
  CHECK_THROWS_AS(loss_impact_ratio(10, 0), DomainError);
}

TEST_CASE("reliability specs") {
  CHECK(parse_reliability("0.5").type == ReliabilitySpec::Type::Value);
  CHECK(parse_reliability("0.5").to_string() == "0.5");
  CHECK(parse_reliability("chance").type == ReliabilitySpec::Type::Chance);
  const auto b = parse_reliability("budget:1200");
  CHECK(b.type == ReliabilitySpec::Type::Budget);
  CHECK(b.value == 1200);
  const auto m = parse_reliability("mix:0.25:0.9:0.5");
  CHECK(m.low == 0.25);
  CHECK(m.high == 0.9);
  CHECK(m.fraction == 0.5);
  CHECK(m.to_string() == "mix:0.25:0.9:0.5");
  for (const char* bad : {"1.5", "0", "budget:", "budget:-3", "mix:0.1:0.2", "abc", "0.5x"}) {
    CHECK_THROWS_AS(parse_reliability(bad), ConfigError);
  }
}

TEST_CASE("profile validation") {
  const auto c = micro();
  auto p = uniform_profile(ModelKind::Recurrent, c, 0.5);
  CHECK_NOTHROW(p.validate(c));
  p.facts[3] = 0.01;  // below 1/10 for the birth city pool
  CHECK_THROWS_AS(p.validate(c), DomainError);
  auto q = uniform_profile(ModelKind::Independent, c, 0.5);
  q.memo.pop_back();
  CHECK_THROWS_AS(q.validate(c), DomainError);
  // floors at the pool's chance level
  const auto u = uniform_profile(ModelKind::Recurrent, c, 0.001);
  CHECK(u.facts[u.fact_index(0, 3)] == doctest::Approx(0.1));
  CHECK(u.facts[u.fact_index(0, 0)] == doctest::Approx(0.01));
}

TEST_CASE("generate_loss_log: one sorted record per item, deterministic") {
  const auto c = micro();
  const auto w = generate_world(c);
  const auto s = build_splits(w, SplitOptions::uniform(0.05, 10, 1));
  const auto p = two_point_profile(ModelKind::Recurrent, c, 0.3, 0.9, 0.5, 4);
  const auto log = generate_loss_log(w, p, s);
  CHECK(log.size() == s.item_count());
  std::set<std::string> qids;
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(log[i].logprob_nats <= 0.0);
    qids.insert(log[i].qid);
    if (i) CHECK(log[i - 1].qid < log[i].qid);
  }
  CHECK(qids.size() == log.size());
  CHECK(generate_loss_log(w, p, s) == log);

  SimulationOptions noisy;
  noisy.noise_sd = 0.3;
  noisy.seed = 9;
  const auto n1 = generate_loss_log(w, p, s, noisy);
  CHECK(n1 == generate_loss_log(w, p, s, noisy));
  CHECK_FALSE(n1 == log);
  for (const auto& r : n1) CHECK(r.logprob_nats <= 0.0);
}

TEST_CASE("independent memo covering train leaves full-question holdouts at chance") {
  const auto c = flat(300, 4);
  const auto w = generate_world(c);
  const auto s = build_splits(w, SplitOptions::uniform(0.02, 10, 2));
  const auto log = generate_loss_log(w, uniform_profile(ModelKind::Independent, c, 0.9), s);
  for (const auto& r : log) {
    if (r.split == "heldout_full") CHECK(r.logprob_nats == doctest::Approx(-std::log(300.0)).epsilon(1e-12));
    if (r.split == "train" && r.kind != QuestionKind::OneHop) CHECK(r.logprob_nats == doctest::Approx(std::log(0.9)));
  }
}

TEST_CASE("property: homogeneous closed loop reproduces ground truth") {
  const auto c = flat(200, 3);
  const auto w = generate_world(c);
  const auto s = build_splits(w, SplitOptions::uniform(0.0, 10, 2));
  for (auto k : {ModelKind::Recurrent, ModelKind::TwoFunction, ModelKind::Independent}) {
    for (double p : {1.0 / 200, 0.25, 0.5, 0.9, 1.0}) {
      const auto prof = uniform_profile(k, c, p);
      const double truth = ground_truth_content(c, prof);
      const double est = estimate_from_log(c, k, generate_loss_log(w, prof, s));
      CAPTURE(to_string(k));
      CAPTURE(p);
      CHECK(std::abs(est - truth) <= 0.005 * std::abs(truth));
    }
  }
}

TEST_CASE("property: simulated signatures classify back to their kind") {
  const auto c = full_scale_config(400, 5, 2, 8);
  const auto w = generate_world(c);
  const auto s = build_splits(w, SplitOptions::uniform(0.02, 10, 8));
  const auto baselines = holdout_baselines(c, s);
  for (auto k : {ModelKind::Recurrent, ModelKind::TwoFunction, ModelKind::Independent}) {
    const auto log = generate_loss_log(w, uniform_profile(k, c, 0.9), s);
    auto sig = evaluate_holdouts(aggregate_by_split(log), baselines);
    const auto inferred = classify_algorithm(sig);
    CAPTURE(to_string(k));
    switch (k) {
      case ModelKind::Recurrent: CHECK(inferred == InferredKind::Recurrent); break;
      case ModelKind::TwoFunction: CHECK(inferred == InferredKind::TwoFunction); break;
      case ModelKind::Independent: CHECK(inferred == InferredKind::Independent); break;
    }
  }
}

TEST_CASE("train exposure tracks roles") {
  const auto c = micro();
  const auto w = generate_world(c);
  SplitOptions o;
  o.holdout_fractions[HoldoutKind::E1] = 0.05;
  o.seed = 3;
  const auto s = build_splits(w, o);
  const auto ex = TrainExposure::from_train(w, s.train);
  for (auto e1 : s.holdout_manifest.e1) {
    for (std::size_t r = 0; r < 3; ++r) CHECK_FALSE(ex.first_hop[e1 * 4 + r]);
    for (std::size_t a = 0; a < 4; ++a) CHECK(ex.fact[e1 * 4 + a]);  // one-hop facts remain
  }
}
