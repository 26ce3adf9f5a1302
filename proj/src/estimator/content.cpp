#include <cmath>

#include "hopcap/error.hpp"
#include "hopcap/estimator.hpp"

namespace hopcap {

FactCounts FactCounts::from_config(const WorldConfig& config) noexcept {
  return {config.n_profiles, config.relation_count(), config.attribute_count()};
}

VarianceCorrection parse_variance_correction(std::string_view text) {
  if (text == "2f") return VarianceCorrection::TwoFunctionOnly;
  if (text == "both") return VarianceCorrection::Both;
  throw ConfigError("unknown variance correction '" + std::string(text) + "' (expected 2f|both)");
}

nlohmann::json ContentEstimate::to_json() const {
  nlohmann::json j;
  j["task"] = to_string(task);
  j["model_kind"] = model_kind ? nlohmann::json(to_string(*model_kind)) : nlohmann::json(nullptr);
  j["entropy_bits"] = round_bits(entropy_bits);
  j["total_loss_bits"] = round_bits(total_loss_bits);
  j["content_bits"] = round_bits(content_bits);
  j["bound"] = "lower";
  j["fact_count"] = fact_count;
  j["unit_loss_bits"] = unit_loss_bits;
  j["effective_loss"] = effective ? effective->to_json() : nlohmann::json(nullptr);
  return j;
}

ContentEstimate content_estimate(Task task, std::optional<ModelKind> model_kind, const EntropyReport& entropy,
                                 const AggregateLoss& aggregate, const FactCounts& counts,
                                 VarianceCorrection correction) {
  if (aggregate.count == 0) throw DomainError("empty aggregate");
  if (entropy.task != task) throw DomainError("entropy report is for a different task");
  const KindFilter wanted = task == Task::OneHop ? KindFilter::OneHop : KindFilter::TwoHop;
  if (aggregate.kind != wanted) {
    throw DomainError("aggregate kind " + std::string(to_string(aggregate.kind)) + " does not match task " +
                      std::string(to_string(task)));
  }
  if (task == Task::TwoHop) {
    if (!model_kind) throw DomainError("two-hop content needs a model kind");
    if (entropy.model_kind != model_kind) throw DomainError("entropy report is for a different model kind");
  }

  ContentEstimate out;
  out.task = task;
  out.model_kind = task == Task::TwoHop ? model_kind : std::nullopt;
  out.entropy_bits = entropy.total_bits;
  const auto per_entity_attr = counts.entities * counts.attributes;

  if (task == Task::OneHop) {
    out.fact_count = per_entity_attr;
    out.unit_loss_bits = nats_to_bits(aggregate.mean_loss_nats);
  } else {
    switch (*model_kind) {
      case ModelKind::Independent:
        out.fact_count = counts.entities * counts.relations * counts.attributes;
        out.unit_loss_bits = nats_to_bits(aggregate.mean_loss_nats);
        break;
      case ModelKind::Recurrent: {
        const auto eff = effective_loss_recurrent(aggregate.mean_loss_nats, aggregate.var_loss_nats,
                                                  counts.entities, correction == VarianceCorrection::Both);
        out.fact_count = per_entity_attr;
        out.unit_loss_bits = nats_to_bits(eff.loss_nats);
        out.effective = eff;
        break;
      }
      case ModelKind::TwoFunction: {
        const auto eff =
            effective_loss_two_function(aggregate.mean_loss_nats, aggregate.var_loss_nats, counts.entities);
        out.fact_count = per_entity_attr;
        out.unit_loss_bits = nats_to_bits(eff.loss_nats);
        out.effective = eff;
        break;
      }
    }
  }
  out.total_loss_bits = static_cast<double>(out.fact_count) * out.unit_loss_bits;
  out.content_bits = out.entropy_bits - out.total_loss_bits;
  return out;
}

ContentEstimate estimate_content(const WorldConfig& config, Task task, std::optional<ModelKind> model_kind,
                                 const AggregateLoss& aggregate, VarianceCorrection correction) {
  const auto entropy = dataset_entropy(config, task, task == Task::TwoHop ? model_kind : std::nullopt);
  return content_estimate(task, model_kind, entropy, aggregate, FactCounts::from_config(config), correction);
}

double bits_per_parameter(double content_bits, double param_count) {
  if (!(param_count > 0.0) || !std::isfinite(param_count)) throw DomainError("parameter count must be positive");
  return content_bits / param_count;
}

}  // namespace hopcap
