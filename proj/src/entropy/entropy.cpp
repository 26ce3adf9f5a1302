#include "hopcap/entropy.hpp"

#include <cmath>

#include "hopcap/error.hpp"

namespace hopcap {

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Recurrent: return "recurrent";
    case ModelKind::TwoFunction: return "2f";
    case ModelKind::Independent: return "independent";
  }
  return "recurrent";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "recurrent") return ModelKind::Recurrent;
  if (text == "2f" || text == "two-function") return ModelKind::TwoFunction;
  if (text == "independent") return ModelKind::Independent;
  throw ConfigError("unknown model kind: " + std::string(text));
}

std::string_view to_string(Task task) noexcept { return task == Task::OneHop ? "one-hop" : "two-hop"; }

Task parse_task(std::string_view text) {
  if (text == "one-hop") return Task::OneHop;
  if (text == "two-hop") return Task::TwoHop;
  throw ConfigError("unknown task: " + std::string(text));
}

double name_selection_entropy(std::uint64_t n, std::uint64_t n0) {
  if (n == 0) throw DomainError("name selection needs at least one profile");
  if (n > n0) throw DomainError("cannot select " + std::to_string(n) + " names from " + std::to_string(n0));
  return static_cast<double>(n) * std::log2(static_cast<double>(n0));
}

double name_selection_exact_bits(std::uint64_t n, std::uint64_t n0) {
  if (n > n0) throw DomainError("cannot select " + std::to_string(n) + " names from " + std::to_string(n0));
  const auto nl = static_cast<long double>(n);
  const auto n0l = static_cast<long double>(n0);
  const auto ln_binom = std::lgamma(n0l + 1) - std::lgamma(nl + 1) - std::lgamma(n0l - nl + 1);
  return static_cast<double>(ln_binom / std::log(2.0L));
}

double attribute_entropy(std::uint64_t value_pool_size) {
  if (value_pool_size == 0) throw DomainError("value pool must hold at least one value");
  return std::log2(static_cast<double>(value_pool_size));
}

double round_bits(double bits) noexcept { return std::round(bits * 1e6) / 1e6; }

nlohmann::json EntropyReport::to_json() const {
  nlohmann::json j;
  j["name_bits"] = round_bits(name_bits);
  j["fact_bits_per_pass"] = round_bits(fact_bits_per_pass);
  j["multiplier"] = multiplier;
  j["total_bits"] = round_bits(total_bits);
  j["task"] = to_string(task);
  j["model_kind"] = model_kind ? nlohmann::json(to_string(*model_kind)) : nlohmann::json(nullptr);
  j["strict"] = strict;
  if (name_bits_exact) j["name_bits_exact"] = round_bits(*name_bits_exact);
  return j;
}

namespace {

struct AttributeSums {
  double all = 0.0;        // sum over every attribute of log2 |V_a|
  double relations = 0.0;  // relations only
};

AttributeSums attribute_sums(const WorldConfig& config) {
  AttributeSums s;
  for (std::size_t a = 0; a < config.attribute_count(); ++a) {
    const auto h = attribute_entropy(config.value_pool(a));
    s.all += h;
    if (config.is_relation(a)) s.relations += h;
  }
  return s;
}

void require_kind(Task task, std::optional<ModelKind> kind) {
  if (task == Task::TwoHop && !kind) throw DomainError("two-hop entropy needs a model kind");
}

}  // namespace

EntropyReport dataset_entropy(const WorldConfig& config, Task task, std::optional<ModelKind> model_kind,
                              const EntropyOptions& options) {
  config.validate();
  require_kind(task, model_kind);
  const auto n = static_cast<double>(config.n_profiles);
  const auto sums = attribute_sums(config);

  EntropyReport r;
  r.task = task;
  r.model_kind = task == Task::TwoHop ? model_kind : std::nullopt;
  r.name_bits = name_selection_entropy(config.n_profiles, config.name_space());
  r.fact_bits_per_pass = n * sums.all;
  if (static_cast<double>(config.n_profiles) / static_cast<double>(config.name_space()) >
      kNameApproximationReportRatio) {
    r.name_bits_exact = name_selection_exact_bits(config.n_profiles, config.name_space());
  }

  if (task == Task::OneHop) {
    r.multiplier = 1.0;
  } else {
    switch (*model_kind) {
      case ModelKind::Recurrent: r.multiplier = 1.0; break;
      case ModelKind::TwoFunction:
        if (options.strict_two_function) {
          r.strict = true;
          r.multiplier = sums.all > 0.0 ? 1.0 + sums.relations / sums.all : 2.0;
        } else {
          r.multiplier = 2.0;
        }
        break;
      case ModelKind::Independent: r.multiplier = static_cast<double>(config.relation_count()); break;
    }
  }
  if (r.strict) {
    r.total_bits = r.name_bits + n * (sums.all + sums.relations);
  } else {
    r.total_bits = r.name_bits + r.multiplier * r.fact_bits_per_pass;
  }
  return r;
}

double uniform_guess_loss_bits(const WorldConfig& config, Task task, std::optional<ModelKind> model_kind,
                               const EntropyOptions& options) {
  config.validate();
  require_kind(task, model_kind);
  // Per stored unit: -log2 of the uniform probability of its true value.
  const auto n = static_cast<double>(config.n_profiles);
  double one_pass = 0.0;
  double relation_pass = 0.0;
  for (std::size_t a = 0; a < config.attribute_count(); ++a) {
    const double p = 1.0 / static_cast<double>(config.value_pool(a));
    const double unit_loss = -std::log2(p);
    one_pass += n * unit_loss;
    if (config.is_relation(a)) relation_pass += n * unit_loss;
  }
  if (task == Task::OneHop) return one_pass;
  switch (*model_kind) {
    case ModelKind::Recurrent: return one_pass;
    case ModelKind::TwoFunction: return one_pass + (options.strict_two_function ? relation_pass : one_pass);
    case ModelKind::Independent: return static_cast<double>(config.relation_count()) * one_pass;
  }
  return one_pass;
}

double baseline_content(const WorldConfig& config, Task task, std::optional<ModelKind> model_kind,
                        const EntropyOptions& options) {
  return dataset_entropy(config, task, model_kind, options).total_bits -
         uniform_guess_loss_bits(config, task, model_kind, options);
}

}  // namespace hopcap
