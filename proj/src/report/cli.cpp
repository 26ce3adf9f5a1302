#include "hopcap/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hopcap/dataset_io.hpp"
#include "hopcap/error.hpp"
#include "hopcap/generalization.hpp"
#include "hopcap/oracle_sim.hpp"
#include "hopcap/report.hpp"
#include "hopcap/vocab.hpp"

namespace hopcap {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kOutDirEnv = "HOPCAP_OUT_DIR";

fs::path default_out_dir() {
  const char* env = std::getenv(kOutDirEnv.data());
  return env && *env ? fs::path(env) : fs::path(".");
}

// Flags every subcommand accepts.
struct Shared {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
};

void add_shared(CLI::App* sub, Shared& shared) {
  sub->add_option("--seed", shared.seed, "Random seed");
  sub->add_option("--config", shared.config, "World config JSON file, or a preset name (micro|desk|trap|full)");
  sub->add_option("--out", shared.out, "Output path");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

WorldConfig load_config(const std::string& spec) {
  if (fs::exists(spec)) {
    try {
      return nlohmann::json::parse(read_text(spec)).get<WorldConfig>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad config " + spec + ": " + e.what());
    }
  }
  return preset_config(spec);
}

// Emits JSON on out and, when --out is given, into that file as well.
void emit(const nlohmann::json& j, const Shared& shared, std::ostream& out) {
  const auto text = j.dump(2) + "\n";
  out << text;
  if (!shared.out.empty()) write_text(shared.out, text);
}

std::optional<ModelKind> parse_estimate_model(const std::string& text) {
  if (text == "one-hop") return std::nullopt;
  return parse_model_kind(text);
}

// Loss logs are bound to the dataset through the run.json sidecar.
std::optional<RunManifest> check_binding(const fs::path& losses, const Dataset& dataset, bool allow_mismatch,
                                         std::ostream& err) {
  const auto path = run_manifest_path(losses);
  auto manifest = read_run_manifest(path);
  if (!manifest) {
    if (!allow_mismatch) {
      throw HashMismatchError(path.string(), dataset.manifest_sha256, "<missing run manifest>");
    }
    err << "warning: no run manifest at " << path.string() << "\n";
    return manifest;
  }
  if (manifest->dataset_manifest_sha256 != dataset.manifest_sha256) {
    if (!allow_mismatch) {
      throw HashMismatchError(path.string(), dataset.manifest_sha256, manifest->dataset_manifest_sha256);
    }
    err << "warning: loss log was produced for a different dataset (override in effect)\n";
  }
  return manifest;
}

struct GenArgs {
  std::optional<std::uint64_t> profiles;
  std::optional<std::size_t> relations;
  std::optional<std::size_t> properties;
  double mix_ratio = 10.0;
  double holdout_frac = 0.01;
  std::string cot = "none";
};

int cmd_gen(const GenArgs& a, const Shared& shared, std::ostream& out, std::ostream& err) {
  WorldConfig config;
  if (!shared.config.empty()) {
    config = load_config(shared.config);
    if (a.relations && *a.relations != config.relation_count()) {
      if (*a.relations > config.relation_count()) throw ConfigError("--relations exceeds the config's relations");
      config.relations.resize(*a.relations);
    }
    if (a.properties && *a.properties != config.properties.size()) {
      if (*a.properties > config.properties.size()) throw ConfigError("--properties exceeds the config's properties");
      config.properties.resize(*a.properties);
    }
    if (a.profiles) config.n_profiles = *a.profiles;
  } else {
    config = full_scale_config(a.profiles.value_or(1000), a.relations.value_or(17), a.properties.value_or(4));
  }
  if (shared.seed) config.seed = *shared.seed;
  config.validate();

  bool cot = false;
  if (a.cot == "answers") {
    cot = true;
  } else if (a.cot != "none") {
    throw ConfigError("--cot must be none or answers");
  }
  const auto world = generate_world(config);
  const auto options = SplitOptions::uniform(a.holdout_frac, a.mix_ratio, config.seed, cot);
  const auto splits = build_splits(world, options);
  const fs::path dir = shared.out.empty() ? default_out_dir() / "dataset" : fs::path(shared.out);
  const auto manifest = persist_dataset(splits, world, options, dir);

  nlohmann::json j;
  j["dataset"] = dir.string();
  j["counts"] = manifest.counts;
  j["excluded_overlap"] = manifest.excluded_overlap;
  try {
    const auto items = splits.all_items();
    const auto vocab = build_vocab(std::span<const QAItem* const>(items.data(), items.size()));
    write_text(dir / "vocab.json", nlohmann::json(vocab.tokens()).dump() + "\n");
    j["vocab_size"] = vocab.size();
  } catch (const DomainError& e) {
    err << "warning: vocab.json not written: " << e.what() << "\n";
    j["vocab_size"] = nullptr;
  }
  out << j.dump(2) << "\n";
  return kExitOk;
}

struct EntropyArgs {
  std::string dataset;
  std::string task = "one-hop";
  std::string model;
  bool strict = false;
};

int cmd_entropy(const EntropyArgs& a, const Shared& shared, std::ostream& out) {
  WorldConfig config;
  if (!a.dataset.empty()) {
    config = load_manifest(a.dataset).config;
  } else if (!shared.config.empty()) {
    config = load_config(shared.config);
  } else {
    throw ConfigError("entropy needs --config or --dataset");
  }
  const Task task = parse_task(a.task);
  std::optional<ModelKind> kind;
  if (!a.model.empty()) kind = parse_model_kind(a.model);
  if (task == Task::TwoHop && !kind) throw ConfigError("two-hop entropy needs --model");
  if (task == Task::OneHop) kind.reset();  // one-hop entropy does not depend on the model
  const EntropyOptions options{a.strict};
  auto j = dataset_entropy(config, task, kind, options).to_json();
  j["baseline_bits"] = round_bits(baseline_content(config, task, kind, options));
  emit(j, shared, out);
  return kExitOk;
}

struct SimulateArgs {
  std::string dataset;
  std::string model;
  std::string reliability = "1";
  std::string label;
  std::optional<double> param_count;
  double noise = 0.0;
  std::string fallback = "entity";
};

int cmd_simulate(const SimulateArgs& a, const Shared& shared, std::ostream& out) {
  const auto dataset = load_dataset(a.dataset);
  const auto kind = parse_model_kind(a.model);
  const auto spec = parse_reliability(a.reliability);
  const std::uint64_t seed = shared.seed.value_or(0);
  const auto profile = build_profile(kind, dataset.world.config, spec, seed);

  SimulationOptions options;
  if (a.fallback == "entity") {
    options.fallback = FallbackPool::Entity;
  } else if (a.fallback == "answer") {
    options.fallback = FallbackPool::AnswerPool;
  } else {
    throw ConfigError("--fallback must be entity or answer");
  }
  options.noise_sd = a.noise;
  options.seed = seed;
  const auto records = generate_loss_log(dataset.world, profile, dataset.splits, options);

  const fs::path path = shared.out.empty() ? default_out_dir() / "run.jsonl" : fs::path(shared.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_loss_log(path, records);
  RunManifest manifest;
  manifest.label = a.label.empty() ? std::string(to_string(kind)) + "@" + spec.to_string() : a.label;
  manifest.param_count = a.param_count;
  manifest.dataset_manifest_sha256 = dataset.manifest_sha256;
  manifest.model = std::string(to_string(kind));
  manifest.reliability = spec.to_string();
  manifest.seed = seed;
  write_run_manifest(run_manifest_path(path), manifest);

  nlohmann::json j;
  j["losses"] = path.string();
  j["run_manifest"] = run_manifest_path(path).string();
  j["records"] = records.size();
  j["model"] = to_string(kind);
  j["reliability"] = spec.to_string();
  j["ground_truth_content_bits"] = round_bits(ground_truth_content(dataset.world.config, profile));
  out << j.dump(2) << "\n";
  return kExitOk;
}

struct EstimateArgs {
  std::string dataset;
  std::string losses;
  std::string model;
  std::string variance_correction = "2f";
  std::string split = "train";
  bool strict = false;
  bool allow_mismatch = false;
};

struct Estimated {
  ContentEstimate estimate;
  AggregateLoss aggregate;
  double baseline_bits = 0.0;
};

Estimated run_estimate(const Dataset& dataset, std::span<const LossRecord> records, std::optional<ModelKind> kind,
                       VarianceCorrection correction, const std::string& split, bool strict) {
  const Task task = kind ? Task::TwoHop : Task::OneHop;
  LossFilter filter;
  if (split != "all") filter.split = split;
  filter.kind = task == Task::OneHop ? KindFilter::OneHop : KindFilter::TwoHop;
  const auto& config = dataset.world.config;
  const EntropyOptions options{strict};
  Estimated e;
  e.aggregate = aggregate_losses(records, filter);
  e.estimate = content_estimate(task, kind, dataset_entropy(config, task, kind, options), e.aggregate,
                                FactCounts::from_config(config), correction);
  e.baseline_bits = baseline_content(config, task, kind, options);
  return e;
}

int cmd_estimate(const EstimateArgs& a, const Shared& shared, std::ostream& out, std::ostream& err) {
  const auto dataset = load_dataset(a.dataset);
  const auto run = check_binding(a.losses, dataset, a.allow_mismatch, err);
  const auto records = read_loss_log(a.losses);
  const auto kind = parse_estimate_model(a.model);
  const auto e = run_estimate(dataset, records, kind, parse_variance_correction(a.variance_correction), a.split,
                              a.strict);
  if (e.estimate.effective && e.estimate.effective->branch == Branch::Clamped) {
    err << "warning: two-hop probability " << e.estimate.effective->q_raw << " clamped to "
        << e.estimate.effective->q_tilde << "\n";
  }
  auto j = e.estimate.to_json();
  j["aggregate"] = e.aggregate.to_json();
  j["baseline_bits"] = round_bits(e.baseline_bits);
  j["dataset_manifest_sha256"] = dataset.manifest_sha256;
  j["label"] = run ? nlohmann::json(run->label) : nlohmann::json(nullptr);
  j["param_count"] = run && run->param_count ? nlohmann::json(*run->param_count) : nlohmann::json(nullptr);
  j["bits_per_param"] = run && run->param_count
                            ? nlohmann::json(bits_per_parameter(e.estimate.content_bits, *run->param_count))
                            : nlohmann::json(nullptr);
  emit(j, shared, out);
  return kExitOk;
}

struct ClassifyArgs {
  std::string dataset;
  std::string losses;
  double threshold = 0.0;
  bool allow_mismatch = false;
};

int cmd_classify(const ClassifyArgs& a, const Shared& shared, std::ostream& out, std::ostream& err) {
  const auto dataset = load_dataset(a.dataset);
  check_binding(a.losses, dataset, a.allow_mismatch, err);
  const auto records = read_loss_log(a.losses);
  const auto aggregates = aggregate_by_split(records, KindFilter::TwoHop);
  auto sig = evaluate_holdouts(aggregates, holdout_baselines(dataset.world.config, dataset.splits), a.threshold);
  sig.inferred = classify_algorithm(sig);
  auto j = sig.to_json();
  const auto train = aggregates.find(std::string(kTrainSplit));
  if (train != aggregates.end()) {
    for (const auto& [name, agg] : aggregates) {
      if (name == kTrainSplit) continue;
      j["holdouts"][name]["gap_bits"] = generalization_gap(train->second, agg);
    }
  }
  emit(j, shared, out);
  return kExitOk;
}

struct ReportArgs {
  std::string dataset;
  std::vector<std::string> runs;
  std::string model;
  std::string variance_correction = "2f";
  std::string split = "train";
  std::optional<double> observed_slope;
  double capacity_slope = 2.0;
  bool allow_mismatch = false;
};

int cmd_report(const ReportArgs& a, const Shared& shared, std::ostream& out, std::ostream& err) {
  const auto dataset = load_dataset(a.dataset);
  const auto correction = parse_variance_correction(a.variance_correction);
  std::vector<CapacityPoint> points;
  for (const auto& run_path : a.runs) {
    const auto run = check_binding(run_path, dataset, a.allow_mismatch, err);
    std::string model = a.model;
    if (model.empty()) {
      if (!run || run->model.empty()) throw ConfigError("no --model given and " + run_path + " names none");
      model = run->model;
    }
    const auto records = read_loss_log(run_path);
    const auto e = run_estimate(dataset, records, parse_estimate_model(model), correction, a.split, false);
    const std::string label = run && !run->label.empty() ? run->label : fs::path(run_path).stem().string();
    points.push_back(make_capacity_point(label, run ? run->param_count : std::nullopt, e.estimate, e.baseline_bits));
  }
  const auto csv = capacity_table(points);
  PlotOptions plot;
  plot.capacity_slope = a.capacity_slope;
  plot.observed_slope = a.observed_slope;
  const auto svg = scaling_plot_from_csv(csv, plot);

  const fs::path dir = shared.out.empty() ? default_out_dir() : fs::path(shared.out);
  fs::create_directories(dir);
  write_text(dir / "capacity.csv", csv);
  write_text(dir / "scaling.svg", svg);

  nlohmann::json j;
  j["csv"] = (dir / "capacity.csv").string();
  j["svg"] = (dir / "scaling.svg").string();
  auto flags = nlohmann::json::array();
  for (const auto& p : points) {
    if (p.below_baseline()) flags.push_back({{"label", p.label}, {"flag", "below_baseline"}});
    if (p.above_entropy()) flags.push_back({{"label", p.label}, {"flag", "above_entropy"}});
  }
  j["flags"] = flags;
  j["rows"] = points.size();
  out << j.dump(2) << "\n";
  return kExitOk;
}

struct ValidateArgs {
  std::string dataset;
  std::string losses;
};

int cmd_validate(const ValidateArgs& a, const Shared& shared, std::ostream& out) {
  const auto dataset = load_dataset(a.dataset);
  const auto d = validate_loss_log(a.losses, dataset.splits);
  emit(d.to_json(), shared, out);
  return d.ok() ? kExitOk : kExitValidation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hopcap: knowledge-capacity accounting for two-hop QA"};
  app.name("hopcap");
  app.require_subcommand(1);

  Shared gen_s, ent_s, sim_s, est_s, cls_s, rep_s, val_s;

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a world, its QA splits and manifest");
  add_shared(gen_cmd, gen_s);
  gen_cmd->add_option("--profiles", gen.profiles, "Number of profiles |N|");
  gen_cmd->add_option("--relations", gen.relations, "Number of relations");
  gen_cmd->add_option("--properties", gen.properties, "Number of properties");
  gen_cmd->add_option("--mix-ratio", gen.mix_ratio, "Two-hop items per one-hop item in train")->capture_default_str();
  gen_cmd->add_option("--holdout-frac", gen.holdout_frac, "Fraction held out per holdout kind")->capture_default_str();
  gen_cmd->add_option("--cot", gen.cot, "none|answers")->capture_default_str();

  EntropyArgs ent;
  auto* ent_cmd = app.add_subcommand("entropy", "Dataset entropy and uniform baseline");
  add_shared(ent_cmd, ent_s);
  ent_cmd->add_option("--dataset", ent.dataset, "Dataset directory (instead of --config)");
  ent_cmd->add_option("--task", ent.task, "one-hop|two-hop")->capture_default_str();
  ent_cmd->add_option("--model", ent.model, "recurrent|2f|independent");
  ent_cmd->add_flag("--strict-2f", ent.strict, "Charge the second fact copy for relations only");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Loss log of a model with known reliabilities");
  add_shared(sim_cmd, sim_s);
  sim_cmd->add_option("--dataset", sim.dataset, "Dataset directory")->required();
  sim_cmd->add_option("--model", sim.model, "recurrent|2f|independent")->required();
  sim_cmd->add_option("--reliability", sim.reliability, "P | chance | budget:BITS | mix:LOW:HIGH:FRACTION")
      ->capture_default_str();
  sim_cmd->add_option("--label", sim.label, "Run label");
  sim_cmd->add_option("--param-count", sim.param_count, "Parameter count recorded in run.json");
  sim_cmd->add_option("--noise", sim.noise, "Gaussian noise (nats) on each log-probability");
  sim_cmd->add_option("--fallback", sim.fallback, "entity|answer")->capture_default_str();

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "Information-content lower bound from a loss log");
  add_shared(est_cmd, est_s);
  est_cmd->add_option("--dataset", est.dataset, "Dataset directory")->required();
  est_cmd->add_option("--losses", est.losses, "Loss log (JSONL)")->required();
  est_cmd->add_option("--model", est.model, "one-hop|recurrent|2f|independent")->required();
  est_cmd->add_option("--variance-correction", est.variance_correction, "2f|both")->capture_default_str();
  est_cmd->add_option("--split", est.split, "Split to aggregate, or all")->capture_default_str();
  est_cmd->add_flag("--strict-2f", est.strict, "Charge the second fact copy for relations only");
  est_cmd->add_flag("--allow-hash-mismatch", est.allow_mismatch, "Accept logs bound to another dataset");

  ClassifyArgs cls;
  auto* cls_cmd = app.add_subcommand("classify", "Generalization signature and inferred algorithm");
  add_shared(cls_cmd, cls_s);
  cls_cmd->add_option("--dataset", cls.dataset, "Dataset directory")->required();
  cls_cmd->add_option("--losses", cls.losses, "Loss log (JSONL)")->required();
  cls_cmd->add_option("--threshold", cls.threshold, "Generalization threshold in bits")->capture_default_str();
  cls_cmd->add_flag("--allow-hash-mismatch", cls.allow_mismatch, "Accept logs bound to another dataset");

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "Capacity table (CSV) and scaling plot (SVG)");
  add_shared(rep_cmd, rep_s);
  rep_cmd->add_option("--dataset", rep.dataset, "Dataset directory")->required();
  rep_cmd->add_option("--runs", rep.runs, "Loss logs")->required()->expected(1, -1);
  rep_cmd->add_option("--model", rep.model, "one-hop|recurrent|2f|independent (default: from run.json)");
  rep_cmd->add_option("--variance-correction", rep.variance_correction, "2f|both")->capture_default_str();
  rep_cmd->add_option("--split", rep.split, "Split to aggregate, or all")->capture_default_str();
  rep_cmd->add_option("--capacity-slope", rep.capacity_slope, "Reference bits per parameter")->capture_default_str();
  rep_cmd->add_option("--observed-slope", rep.observed_slope, "Optional second reference slope, e.g. 1.6");
  rep_cmd->add_flag("--allow-hash-mismatch", rep.allow_mismatch, "Accept logs bound to another dataset");

  ValidateArgs val;
  auto* val_cmd = app.add_subcommand("validate", "Check a loss log against the dataset");
  add_shared(val_cmd, val_s);
  val_cmd->add_option("--dataset", val.dataset, "Dataset directory")->required();
  val_cmd->add_option("--losses", val.losses, "Loss log (JSONL)")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, gen_s, out, err);
    if (ent_cmd->parsed()) return cmd_entropy(ent, ent_s, out);
    if (sim_cmd->parsed()) return cmd_simulate(sim, sim_s, out);
    if (est_cmd->parsed()) return cmd_estimate(est, est_s, out, err);
    if (cls_cmd->parsed()) return cmd_classify(cls, cls_s, out, err);
    if (rep_cmd->parsed()) return cmd_report(rep, rep_s, out, err);
    if (val_cmd->parsed()) return cmd_validate(val, val_s, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  err << app.help();
  return kExitUsage;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace hopcap
