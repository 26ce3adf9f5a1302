// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>

#include "hopcap/dataset_io.hpp"
#include "hopcap/entropy.hpp"
#include "hopcap/estimator.hpp"
#include "hopcap/generalization.hpp"
#include "hopcap/oracle_sim.hpp"
#include "hopcap/oracles.hpp"
#include "hopcap/report.hpp"
#include "hopcap/splits.hpp"

using namespace hopcap;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

constexpr ModelKind kKinds[] = {ModelKind::Recurrent, ModelKind::TwoFunction, ModelKind::Independent};

// 1. prediction table
Outcome table_rows() {
  Outcome o;
  // the prediction table, typed out independently of prediction_table()
  struct Row {
    ModelKind kind;
    bool facts, pairs, full, correct;
  };
  const Row rows[] = {{ModelKind::Independent, true, true, true, true},
                      {ModelKind::Independent, true, true, false, false},
                      {ModelKind::Independent, true, false, false, false},
                      {ModelKind::TwoFunction, true, true, true, true},
                      {ModelKind::TwoFunction, true, true, false, true},
                      {ModelKind::TwoFunction, true, false, false, false},
                      {ModelKind::Recurrent, true, true, true, true},
                      {ModelKind::Recurrent, true, true, false, true},
                      {ModelKind::Recurrent, true, false, false, true}};
  int mismatches = 0;
  const auto& t = prediction_table();
  for (int i = 0; i < 9; ++i) {
    const auto& r = rows[i];
    const PresenceFlags f{r.facts, r.pairs, r.pairs, r.full};
    if (predict_generalization(r.kind, f) != r.correct) ++mismatches;
    if (t[i].kind != r.kind || t[i].facts != r.facts || t[i].pairs != r.pairs || t[i].full != r.full ||
        t[i].correct != r.correct)
      ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  if (o.pass) o.detail = "9/9 rows";
  return o;
}

// 2. recurrent inversion round trip
Outcome recurrent_round_trip() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t n : {10ULL, 100ULL, 1000ULL, 10000ULL}) {
    const double inv = 1.0 / static_cast<double>(n);
    for (double u : {inv, 0.01, 0.1, 0.3, 0.5, 0.9, 1.0}) {
      if (u < inv) continue;  // 0.01 is below chance at n = 10
      const double q = u * u + (1.0 - u) * inv;
      const auto e = effective_loss_recurrent(-std::log(q), 0.0, n);
      worst = std::max(worst, std::abs(e.u - u));
    }
  }
  o.require(worst <= 1e-9, fmt("max |u error| %.3g", worst));
  if (o.pass) o.detail = fmt("max |u error| %.3g", worst);
  return o;
}

// 3. two-function closed form vs oracle
Outcome two_function_oracle() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t n : {100ULL, 1000ULL}) {
    const double inv = 1.0 / static_cast<double>(n);
    for (int i = 0; i < 200; ++i) {
      const double q = inv + (1.0 - inv) * (i + 0.5) / 200.0;
      const auto closed = effective_loss_two_function(-std::log(q), 0.0, n);
      const auto oracle = oracle_minimize_two_function(q, n);
      const double want = oracle.summed_loss_nats;
      worst = std::max(worst, rel_err(closed.loss_nats, want));
    }
    const double qs = two_function_threshold(static_cast<double>(n));
    const double below = effective_loss_two_function(-std::log(qs * (1 - 1e-15)), 0.0, n).loss_nats;
    const double above = effective_loss_two_function(-std::log(qs * (1 + 1e-15)), 0.0, n).loss_nats;
    const double at = effective_loss_two_function(-std::log(qs), 0.0, n).loss_nats;
    const double ln_n = std::log(static_cast<double>(n));
    o.require(std::abs(below - ln_n) <= 1e-9 && std::abs(above - ln_n) <= 1e-9 && std::abs(at - ln_n) <= 1e-9,
              fmt("branch gap at q* for n=%g: %.3g / %.3g", static_cast<double>(n), below - ln_n, above - ln_n));
  }
  o.require(worst <= 1e-6, fmt("max relative disagreement %.3g", worst));
  if (o.pass) o.detail = fmt("max relative disagreement %.3g over 400 points", worst);
  return o;
}

// 4. chance fixed points
Outcome chance_fixed_points() {
  Outcome o;
  for (std::uint64_t n : {10ULL, 100ULL, 1000ULL, 10000ULL}) {
    const double ln_n = std::log(static_cast<double>(n));
    const double mean = ln_n;  // q = 1/n
    const auto r = effective_loss_recurrent(mean, 0.0, n);
    const auto t = effective_loss_two_function(mean, 0.0, n);
    o.require(std::abs(r.loss_nats - ln_n) <= 1e-12 * ln_n, fmt("recurrent at n=%g: %.17g", double(n), r.loss_nats));
    o.require(std::abs(t.loss_nats - 2 * ln_n) <= 1e-12 * ln_n,
              fmt("two-function at n=%g: %.17g", double(n), t.loss_nats));
  }
  if (o.pass) o.detail = "ln n and 2 ln n for n in {10, 1e2, 1e3, 1e4}";
  return o;
}

// 5. entropy ordering and baseline
Outcome entropy_ordering() {
  Outcome o;
  std::mt19937_64 gen(20240515);
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(gen);
  };
  double worst_baseline = 0.0;
  for (int i = 0; i < 20; ++i) {
    WorldConfig c;
    c.n_profiles = pick(50, 5000);
    c.first_names = pick(20, 200);
    c.middle_names = pick(20, 200);
    c.last_names = pick(20, 200);
    const auto n_rel = pick(2, 8);
    for (std::uint64_t r = 0; r < n_rel; ++r) c.relations.push_back("rel" + std::to_string(r));
    const auto n_prop = pick(0, 4);
    for (std::uint64_t p = 0; p < n_prop; ++p) c.properties.push_back({"prop" + std::to_string(p), pick(2, 100000)});
    c.seed = i;
    c.validate();
    const double e1 = dataset_entropy(c, Task::OneHop, std::nullopt).total_bits;
    const double rec = dataset_entropy(c, Task::TwoHop, ModelKind::Recurrent).total_bits;
    const double tf = dataset_entropy(c, Task::TwoHop, ModelKind::TwoFunction).total_bits;
    const double ind = dataset_entropy(c, Task::TwoHop, ModelKind::Independent).total_bits;
    o.require(e1 == rec, fmt("config %g: E1 %.17g != recurrent %.17g", i, e1, rec));
    o.require(rec <= tf && tf <= ind, fmt("config %g: ordering broken (%.6g, %.6g)", i, tf, ind));
    const double names = name_selection_entropy(c.n_profiles, c.name_space());
    worst_baseline = std::max(worst_baseline, std::abs(baseline_content(c, Task::OneHop, std::nullopt) - names));
    for (auto k : kKinds) {
      for (bool strict : {false, true}) {
        worst_baseline = std::max(worst_baseline, std::abs(baseline_content(c, Task::TwoHop, k, {strict}) - names));
      }
    }
  }
  o.require(worst_baseline <= 1e-6, fmt("baseline off by %.3g bits", worst_baseline));
  if (o.pass) o.detail = fmt("20 configs, max baseline error %.3g bits", worst_baseline);
  return o;
}

double estimate_train(const WorldConfig& c, ModelKind kind, const std::vector<LossRecord>& log) {
  const auto a = aggregate_losses(log, {std::string(kTrainSplit), KindFilter::TwoHop});
  return estimate_content(c, Task::TwoHop, kind, a).content_bits;
}

// 6. closed-loop capacity recovery
Outcome closed_loop() {
  Outcome o;
  const auto c = preset_config("desk");
  const auto w = generate_world(c);
  const auto s = build_splits(w, SplitOptions::uniform(0.0, 10, 1));
  double worst_homog = 0.0;
  double worst_mix = 0.0;
  for (auto k : kKinds) {
    for (const char* spec : {"chance", "0.25", "0.5", "0.9", "1"}) {
      const auto prof = build_profile(k, c, parse_reliability(spec), 1);
      const double truth = ground_truth_content(c, prof);
      const double est = estimate_train(c, k, generate_loss_log(w, prof, s));
      const double e = rel_err(est, truth);
      worst_homog = std::max(worst_homog, e);
      o.require(e <= 0.005, std::string(to_string(k)) + " at " + spec + fmt(": %.4g vs truth %.4g (%.3g)", est, truth, e));
    }
    for (const char* spec : {"mix:0.25:0.9:0.5", "mix:0.5:1:0.3"}) {
      const auto prof = build_profile(k, c, parse_reliability(spec), 2);
      const double truth = ground_truth_content(c, prof);
      const double est = estimate_train(c, k, generate_loss_log(w, prof, s));
      const double e = rel_err(est, truth);
      worst_mix = std::max(worst_mix, e);
      o.require(e <= 0.10, std::string(to_string(k)) + " at " + spec + fmt(": %.4g vs truth %.4g (%.3g)", est, truth, e));
    }
  }
  if (o.pass) o.detail = fmt("homogeneous max rel err %.3g, mixtures %.3g", worst_homog, worst_mix);
  return o;
}

// 7. signature closed loop
Outcome signature_loop() {
  Outcome o;
  const auto c = preset_config("desk");
  const auto w = generate_world(c);
  const auto s = build_splits(w, SplitOptions::uniform(0.02, 10, 3));
  const auto baselines = holdout_baselines(c, s);
  for (auto k : kKinds) {
    for (double p : {0.5, 0.9}) {
      const auto log = generate_loss_log(w, uniform_profile(k, c, p), s);
      const auto sig = evaluate_holdouts(aggregate_by_split(log), baselines);
      const auto inferred = classify_algorithm(sig);
      const InferredKind want = k == ModelKind::Recurrent     ? InferredKind::Recurrent
                                : k == ModelKind::TwoFunction ? InferredKind::TwoFunction
                                                              : InferredKind::Independent;
      o.require(inferred == want, std::string(to_string(k)) + fmt(" at %g", p) + " classified as " +
                                      std::string(to_string(inferred)));
      if (k == ModelKind::TwoFunction) {
        for (const auto& [name, r] : sig.holdouts) {
          o.require(r.generalizes == (name == "heldout_full"), "two-function " + name + fmt(" delta %.4g", r.delta_bits));
        }
      }
    }
  }
  if (o.pass) o.detail = "3 kinds x 2 reliabilities, 2f = {heldout_full}";
  return o;
}

// 8. trap regime
Outcome trap_regime() {
  Outcome o;
  o.require(loss_impact_ratio(10, 4) == 2.5, fmt("loss_impact_ratio(10, 4) = %.17g", loss_impact_ratio(10, 4)));
  const auto c = preset_config("trap");
  const double names = name_selection_entropy(c.n_profiles, c.name_space());
  const double e2ind = dataset_entropy(c, Task::TwoHop, ModelKind::Independent).total_bits;
  const auto units = static_cast<double>(storable_units(ModelKind::Independent, c));
  double min_b = INFINITY, max_b = 0.0;
  for (std::size_t a = 0; a < c.attribute_count(); ++a) {
    const double b = std::log2(static_cast<double>(c.value_pool(a)));
    min_b = std::min(min_b, b);
    max_b = std::max(max_b, b);
  }
  double prev = -INFINITY;
  double worst_track = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double share = 20.0 * i / 40.0;
    const double budget = share * units;
    const double content = ground_truth_content(c, allocate_budget(ModelKind::Independent, budget, c));
    const double bound = std::min(names + budget, e2ind);
    o.require(content >= prev - 1e-6, fmt("not monotone at share %.3g", share));
    o.require(content <= bound + 1e-6 * bound, fmt("above the capacity bound at share %.3g", share));
    if (share <= min_b) worst_track = std::max(worst_track, rel_err(content, bound));
    if (share >= max_b) o.require(rel_err(content, e2ind) <= 1e-9, fmt("not saturated at share %.3g", share));
    prev = content;
  }
  o.require(worst_track <= 0.01, fmt("tracking error %.3g in the capacity-limited regime", worst_track));

  // through the loss-log pipeline, at a capacity-limited budget
  const auto w = generate_world(c);
  const auto s = build_splits(w, SplitOptions::uniform(0.0, 10, 5));
  const double budget = 6.0 * units;
  const auto ind = allocate_budget(ModelKind::Independent, budget, c);
  const auto log = generate_loss_log(w, ind, s);
  const double est = estimate_train(c, ModelKind::Independent, log);
  const double truth = ground_truth_content(c, ind);
  o.require(rel_err(est, truth) <= 1e-6, fmt("pipeline estimate %.6g vs %.6g", est, truth));
  o.require(rel_err(est, names + budget) <= 0.01, fmt("pipeline estimate %.6g vs names + budget %.6g", est, names + budget));

  // the same parameter budget spent on composition loses far less on two-hop questions
  const auto rec = allocate_budget(ModelKind::Recurrent, budget, c);
  const auto rec_log = generate_loss_log(w, rec, s);
  const auto ind_loss = aggregate_losses(log, {std::string(kTrainSplit), KindFilter::TwoHop}).mean_loss_nats;
  const auto rec_loss = aggregate_losses(rec_log, {std::string(kTrainSplit), KindFilter::TwoHop}).mean_loss_nats;
  o.require(ind_loss > rec_loss, fmt("independent loss %.4g not above recurrent %.4g", ind_loss, rec_loss));
  // and still when the budget is too small for either to store everything
  const double tight = 0.5 * units;
  const auto tight_ind = generate_loss_log(w, allocate_budget(ModelKind::Independent, tight, c), s);
  const auto tight_rec = generate_loss_log(w, allocate_budget(ModelKind::Recurrent, tight, c), s);
  const auto ti = aggregate_losses(tight_ind, {std::string(kTrainSplit), KindFilter::TwoHop}).mean_loss_nats;
  const auto tr = aggregate_losses(tight_rec, {std::string(kTrainSplit), KindFilter::TwoHop}).mean_loss_nats;
  o.require(tr > 0.0 && ti > tr, fmt("tight budget: independent %.4g vs recurrent %.4g", ti, tr));
  // a memorizer's log read as composition looks anomalously low on content
  const double as_2f = estimate_train(c, ModelKind::TwoFunction, log);
  o.require(as_2f < est, fmt("2f reading %.6g not below independent %.6g", as_2f, est));
  if (o.pass)
    o.detail = fmt("tracking err %.3g; tight-budget loss ind %.3g vs rec %.3g nats", worst_track, ti, tr);
  return o;
}

// 9. dataset contracts
Outcome dataset_contracts() {
  Outcome o;
  const auto c = preset_config("desk");
  const auto w = generate_world(c);
  const auto opts = SplitOptions::uniform(0.01, 10, 9);
  const auto s = build_splits(w, opts);
  const auto& m = s.holdout_manifest;
  const auto n_attr = c.attribute_count();
  std::set<EntityId> e1(m.e1.begin(), m.e1.end()), e2(m.e2.begin(), m.e2.end());
  std::set<std::size_t> r(m.r.begin(), m.r.end()), a(m.a.begin(), m.a.end());
  std::set<std::pair<EntityId, std::size_t>> e1r(m.e1r.begin(), m.e1r.end()), e2a(m.e2a.begin(), m.e2a.end());
  std::set<std::array<std::uint64_t, 3>> full(m.full.begin(), m.full.end());
  std::uint64_t violations = 0, one_hop = 0;
  for (const auto& item : s.train) {
    if (item.query.kind == QuestionKind::OneHop) {
      ++one_hop;
      continue;
    }
    const auto ri = *c.find_attribute(*item.query.r);
    const auto ai = *c.find_attribute(item.query.a);
    const auto x2 = w.relation_target(item.query.e1, ri);
    violations += e1.count(item.query.e1) + r.count(ri) + e2.count(x2) + a.count(ai) + e1r.count({item.query.e1, ri}) +
                  e2a.count({x2, ai}) + full.count({item.query.e1, ri, ai});
  }
  o.require(violations == 0, std::to_string(violations) + " holdout violations in train");
  o.require(one_hop == c.n_profiles * n_attr, std::to_string(one_hop) + " one-hop train items");
  for (auto kind : kHoldoutKinds)
    o.require(!s.heldout.at(std::string(holdout_name(kind))).empty(), std::string(holdout_name(kind)) + " is empty");
  std::unordered_set<std::string> names;
  for (EntityId e = 0; e < w.size(); ++e) names.insert(w.full_name(e));
  o.require(names.size() == w.size(), "duplicate names");
  const auto w2 = generate_world(c);
  const auto s2 = build_splits(w2, opts);
  o.require(profiles_jsonl(w) == profiles_jsonl(w2), "profiles differ on regeneration");
  o.require(qa_jsonl(s) == qa_jsonl(s2), "qa differs on regeneration");
  if (o.pass) o.detail = fmt("%g train items, %g one-hop, 0 violations", double(s.train.size()), double(one_hop));
  return o;
}

// 10. capacity-line overlay
Outcome capacity_overlay() {
  Outcome o;
  o.require(bits_per_parameter(2e6, 1e6) == 2.0, "bits_per_parameter(2e6, 1e6) != 2");
  std::vector<CapacityPoint> pts;
  for (double params : {1e5, 1e6, 1e7}) {
    CapacityPoint p;
    p.label = fmt("m%.0e", params);
    p.param_count = params;
    p.model_kind = "2f";
    p.task = "two-hop";
    p.entropy_bits = 5647.3 * 1000;
    p.baseline_bits = 996.6 * 1000;
    p.content_bits = std::min(1.8 * params, p.entropy_bits);
    p.total_loss_bits = p.entropy_bits - p.content_bits;
    p.bits_per_param = bits_per_parameter(p.content_bits, params);
    pts.push_back(p);
  }
  const auto svg = scaling_plot(pts);
  o.require(svg == scaling_plot(pts), "plot not deterministic");
  o.require(svg == scaling_plot_from_csv(capacity_table(pts)), "plot from csv differs");
  for (const char* cls : {"ref-entropy", "ref-baseline", "ref-capacity", "series"}) {
    o.require(svg.find(std::string("class=\"") + cls + "\"") != std::string::npos, std::string("missing ") + cls);
  }
  if (o.pass) o.detail = "2.0 bits/param; entropy, baseline and capacity references rendered";
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"prediction table reproduced", table_rows},
      {"recurrent inversion round trip", recurrent_round_trip},
      {"two-function closed form matches oracle", two_function_oracle},
      {"chance fixed points", chance_fixed_points},
      {"entropy ordering and baseline", entropy_ordering},
      {"closed-loop capacity recovery", closed_loop},
      {"signature closed loop", signature_loop},
      {"trap-regime arithmetic", trap_regime},
      {"dataset contracts", dataset_contracts},
      {"capacity-line overlay", capacity_overlay},
  };
  int failed = 0;
  int i = 0;
  for (const auto& [name, fn] : criteria) {
    ++i;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s [%.2fs]\n", out.pass ? "PASS" : "FAIL", i, name, out.detail.c_str(), secs);
    failed += !out.pass;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
