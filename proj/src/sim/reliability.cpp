#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "hopcap/error.hpp"
#include "hopcap/oracle_sim.hpp"
#include "hopcap/rng.hpp"

namespace hopcap {

namespace {

double pool_floor(const WorldConfig& config, std::size_t a) {
  return 1.0 / static_cast<double>(config.value_pool(a));
}

void init_shape(ReliabilityProfile& p, ModelKind kind, const WorldConfig& config) {
  config.validate();
  p.model_kind = kind;
  p.entities = config.n_profiles;
  p.relations = config.relation_count();
  p.attributes = config.attribute_count();
  const std::size_t per_fact = p.entities * p.attributes;
  switch (kind) {
    case ModelKind::Recurrent: p.facts.assign(per_fact, 1.0); break;
    case ModelKind::TwoFunction:
      p.hop1.assign(per_fact, 1.0);
      p.hop2.assign(per_fact, 1.0);
      break;
    case ModelKind::Independent:
      p.facts.assign(per_fact, 1.0);
      p.memo.assign(per_fact * p.relations, 1.0);
      break;
  }
}

// Visits every stored probability with the attribute it answers.
template <typename F>
void for_each_entry(ReliabilityProfile& p, F&& f) {
  for (auto* v : {&p.facts, &p.hop1, &p.hop2}) {
    for (std::size_t i = 0; i < v->size(); ++i) f((*v)[i], i % p.attributes);
  }
  for (std::size_t i = 0; i < p.memo.size(); ++i) f(p.memo[i], i % p.attributes);
}

double parse_number(std::string_view text, std::string_view what) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid " + std::string(what) + " '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw ConfigError("invalid " + std::string(what) + " '" + s + "'");
  return v;
}

// Fewest significant digits that read back to the same double.
std::string shortest(double v) {
  char buf[32];
  for (int digits = 1; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void check_probability(double p, std::string_view what) {
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError(std::string(what) + " must lie in (0, 1]");
}

}  // namespace

double ReliabilityProfile::first_hop(EntityId e1, std::size_t r) const {
  switch (model_kind) {
    case ModelKind::Recurrent: return facts.at(fact_index(e1, r));
    case ModelKind::TwoFunction: return hop1.at(fact_index(e1, r));
    case ModelKind::Independent: break;
  }
  throw DomainError("independent profiles have no hop functions");
}

double ReliabilityProfile::second_hop(EntityId e, std::size_t a) const {
  switch (model_kind) {
    case ModelKind::Recurrent: return facts.at(fact_index(e, a));
    case ModelKind::TwoFunction: return hop2.at(fact_index(e, a));
    case ModelKind::Independent: break;
  }
  throw DomainError("independent profiles have no hop functions");
}

double ReliabilityProfile::one_hop(EntityId e, std::size_t a) const {
  return model_kind == ModelKind::TwoFunction ? hop2.at(fact_index(e, a)) : facts.at(fact_index(e, a));
}

void ReliabilityProfile::validate(const WorldConfig& config) const {
  if (entities != config.n_profiles || relations != config.relation_count() ||
      attributes != config.attribute_count()) {
    throw DomainError("reliability profile does not match the world config");
  }
  const std::size_t per_fact = entities * attributes;
  auto expect = [](const std::vector<double>& v, std::size_t n, const char* name) {
    if (v.size() != n) throw DomainError(std::string("reliability map '") + name + "' has the wrong size");
  };
  switch (model_kind) {
    case ModelKind::Recurrent: expect(facts, per_fact, "facts"); break;
    case ModelKind::TwoFunction:
      expect(hop1, per_fact, "hop1");
      expect(hop2, per_fact, "hop2");
      break;
    case ModelKind::Independent:
      expect(facts, per_fact, "facts");
      expect(memo, per_fact * relations, "memo");
      break;
  }
  auto check = [&](const std::vector<double>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double lo = pool_floor(config, i % attributes);
      if (!(v[i] >= lo * (1.0 - 1e-12) && v[i] <= 1.0)) {
        throw DomainError(std::string("reliability out of range in '") + name + "'");
      }
    }
  };
  check(facts, "facts");
  check(hop1, "hop1");
  check(hop2, "hop2");
  check(memo, "memo");
}

ReliabilityProfile uniform_profile(ModelKind kind, const WorldConfig& config, double p) {
  check_probability(p, "reliability");
  ReliabilityProfile out;
  init_shape(out, kind, config);
  for_each_entry(out, [&](double& v, std::size_t a) { v = std::max(p, pool_floor(config, a)); });
  return out;
}

ReliabilityProfile chance_profile(ModelKind kind, const WorldConfig& config) {
  return uniform_profile(kind, config, 1.0 / static_cast<double>(config.n_profiles));
}

ReliabilityProfile two_point_profile(ModelKind kind, const WorldConfig& config, double low, double high,
                                     double high_fraction, std::uint64_t seed) {
  check_probability(low, "low reliability");
  check_probability(high, "high reliability");
  if (!(high_fraction >= 0.0 && high_fraction <= 1.0)) throw ConfigError("mixture fraction must lie in [0, 1]");
  ReliabilityProfile out;
  init_shape(out, kind, config);
  auto rng = make_rng(seed, "reliability");
  for_each_entry(out, [&](double& v, std::size_t a) {
    const double p = uniform_unit(rng) < high_fraction ? high : low;
    v = std::max(p, pool_floor(config, a));
  });
  return out;
}

std::uint64_t storable_units(ModelKind kind, const WorldConfig& config, bool strict) {
  const std::uint64_t n = config.n_profiles;
  const std::uint64_t a = config.attribute_count();
  const std::uint64_t r = config.relation_count();
  switch (kind) {
    case ModelKind::Recurrent: return n * a;
    case ModelKind::TwoFunction: return n * a + n * (strict ? r : a);
    case ModelKind::Independent: return n * r * a;
  }
  return n * a;
}

ReliabilityProfile allocate_budget(ModelKind kind, double budget_bits, const WorldConfig& config) {
  if (!(budget_bits >= 0.0) || std::isnan(budget_bits)) throw DomainError("budget must be non-negative");
  ReliabilityProfile out;
  init_shape(out, kind, config);
  const double share = std::isinf(budget_bits)
                           ? budget_bits
                           : budget_bits / static_cast<double>(storable_units(kind, config));
  for_each_entry(out, [&](double& v, std::size_t a) {
    const double b = attribute_entropy(config.value_pool(a));
    const double loss = std::max(0.0, b - share);
    v = std::clamp(std::exp2(-loss), pool_floor(config, a), 1.0);
  });
  return out;
}

std::string ReliabilitySpec::to_string() const {
  std::ostringstream os;
  auto put = [&os](double v) { os << shortest(v); };
  switch (type) {
    case Type::Value: put(value); break;
    case Type::Chance: os << "chance"; break;
    case Type::Budget:
      os << "budget:";
      put(value);
      break;
    case Type::Mixture:
      os << "mix:";
      put(low);
      os << ':';
      put(high);
      os << ':';
      put(fraction);
      break;
  }
  return os.str();
}

ReliabilitySpec parse_reliability(std::string_view text) {
  ReliabilitySpec spec;
  if (text == "chance") {
    spec.type = ReliabilitySpec::Type::Chance;
    return spec;
  }
  if (text.starts_with("budget:")) {
    spec.type = ReliabilitySpec::Type::Budget;
    spec.value = parse_number(text.substr(7), "budget");
    if (spec.value < 0.0) throw ConfigError("budget must be non-negative");
    return spec;
  }
  if (text.starts_with("mix:")) {
    spec.type = ReliabilitySpec::Type::Mixture;
    auto rest = text.substr(4);
    const auto c1 = rest.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : rest.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw ConfigError("expected mix:LOW:HIGH:FRACTION");
    spec.low = parse_number(rest.substr(0, c1), "mixture low");
    spec.high = parse_number(rest.substr(c1 + 1, c2 - c1 - 1), "mixture high");
    spec.fraction = parse_number(rest.substr(c2 + 1), "mixture fraction");
    check_probability(spec.low, "mixture low");
    check_probability(spec.high, "mixture high");
    if (spec.fraction < 0.0 || spec.fraction > 1.0) throw ConfigError("mixture fraction must lie in [0, 1]");
    return spec;
  }
  spec.value = parse_number(text, "reliability");
  check_probability(spec.value, "reliability");
  return spec;
}

ReliabilityProfile build_profile(ModelKind kind, const WorldConfig& config, const ReliabilitySpec& spec,
                                 std::uint64_t seed) {
  switch (spec.type) {
    case ReliabilitySpec::Type::Value: return uniform_profile(kind, config, spec.value);
    case ReliabilitySpec::Type::Chance: return chance_profile(kind, config);
    case ReliabilitySpec::Type::Budget: return allocate_budget(kind, spec.value, config);
    case ReliabilitySpec::Type::Mixture:
      return two_point_profile(kind, config, spec.low, spec.high, spec.fraction, seed);
  }
  return uniform_profile(kind, config, 1.0);
}

double ground_truth_content(const WorldConfig& config, const ReliabilityProfile& profile,
                            const EntropyOptions& options) {
  profile.validate(config);
  const auto attrs = profile.attributes;
  auto loss_bits = [](const std::vector<double>& v, auto keep) {
    long double sum = 0.0L;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (keep(i)) sum -= std::log2(static_cast<long double>(v[i]));
    }
    return static_cast<double>(sum);
  };
  auto all = [](std::size_t) { return true; };
  switch (profile.model_kind) {
    case ModelKind::Recurrent:
      return dataset_entropy(config, Task::OneHop).total_bits - loss_bits(profile.facts, all);
    case ModelKind::TwoFunction: {
      const auto entropy = dataset_entropy(config, Task::TwoHop, ModelKind::TwoFunction, options).total_bits;
      const bool strict = options.strict_two_function;
      const double hop1 =
          loss_bits(profile.hop1, [&](std::size_t i) { return !strict || config.is_relation(i % attrs); });
      return entropy - hop1 - loss_bits(profile.hop2, all);
    }
    case ModelKind::Independent:
      return dataset_entropy(config, Task::TwoHop, ModelKind::Independent).total_bits - loss_bits(profile.memo, all);
  }
  return 0.0;
}

double loss_impact_ratio(double mix_ratio, std::uint64_t n_relations) {
  if (n_relations < 1) throw DomainError("loss impact ratio needs at least one relation");
  if (!(mix_ratio >= 0.0)) throw DomainError("mix ratio must be non-negative");
  return mix_ratio / static_cast<double>(n_relations);
}

}  // namespace hopcap
