#include "hopcap/world.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <limits>
#include <set>

#include "hopcap/error.hpp"
#include "hopcap/rng.hpp"

namespace hopcap {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::uint64_t kSyllables = 14 * 5;
// Multipliers coprime with 70, so k -> (k * m + c) mod 70^w is a bijection.
constexpr std::array<std::uint64_t, 8> kPoolMultipliers = {1, 11, 13, 17, 19, 23, 29, 31};

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) noexcept {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

}  // namespace

std::uint64_t WorldConfig::name_space() const noexcept {
  return saturating_mul(saturating_mul(first_names, middle_names), last_names);
}

std::uint64_t WorldConfig::value_pool(std::size_t attribute) const {
  if (attribute < relations.size()) return n_profiles;
  const auto p = attribute - relations.size();
  if (p >= properties.size()) throw DomainError("attribute index out of range: " + std::to_string(attribute));
  return properties[p].pool_size;
}

const std::string& WorldConfig::attribute_name(std::size_t attribute) const {
  if (attribute < relations.size()) return relations[attribute];
  const auto p = attribute - relations.size();
  if (p >= properties.size()) throw DomainError("attribute index out of range: " + std::to_string(attribute));
  return properties[p].name;
}

std::optional<std::size_t> WorldConfig::find_attribute(std::string_view name) const {
  for (std::size_t i = 0; i < relations.size(); ++i) {
    if (relations[i] == name) return i;
  }
  for (std::size_t i = 0; i < properties.size(); ++i) {
    if (properties[i].name == name) return relations.size() + i;
  }
  return std::nullopt;
}

std::optional<std::size_t> WorldConfig::find_relation(std::string_view name) const {
  for (std::size_t i = 0; i < relations.size(); ++i) {
    if (relations[i] == name) return i;
  }
  return std::nullopt;
}

void WorldConfig::validate() const {
  if (n_profiles == 0) throw ConfigError("n_profiles must be positive");
  if (n_profiles > std::numeric_limits<EntityId>::max()) throw ConfigError("n_profiles exceeds the entity id range");
  if (first_names == 0 || middle_names == 0 || last_names == 0) throw ConfigError("name pools must be non-empty");
  for (const auto pool : {first_names, middle_names, last_names}) {
    if (pool > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("name pool exceeds 2^32 entries");
  }
  if (name_space() < n_profiles) {
    throw ConfigError("name space " + std::to_string(name_space()) + " is smaller than n_profiles " +
                      std::to_string(n_profiles));
  }
  std::set<std::string, std::less<>> names;
  auto check_name = [&](const std::string& name) {
    if (name.empty()) throw ConfigError("attribute names must be non-empty");
    if (name.find(':') != std::string::npos) throw ConfigError("attribute name contains ':': " + name);
    if (!names.insert(name).second) throw ConfigError("duplicate attribute name: " + name);
  };
  for (const auto& r : relations) check_name(r);
  for (const auto& p : properties) {
    check_name(p.name);
    if (p.pool_size == 0) throw ConfigError("value pool of property '" + p.name + "' must be >= 1");
  }
  if (attribute_count() == 0) throw ConfigError("at least one attribute is required");
}

void to_json(nlohmann::json& j, const WorldConfig& config) {
  nlohmann::json props = nlohmann::json::array();
  for (const auto& p : config.properties) props.push_back({{"name", p.name}, {"pool_size", p.pool_size}});
  j = nlohmann::json{{"n_profiles", config.n_profiles},
                     {"first_names", config.first_names},
                     {"middle_names", config.middle_names},
                     {"last_names", config.last_names},
                     {"relations", config.relations},
                     {"properties", std::move(props)},
                     {"seed", config.seed}};
}

void from_json(const nlohmann::json& j, WorldConfig& config) {
  try {
    config.n_profiles = j.at("n_profiles").get<std::uint64_t>();
    config.first_names = j.at("first_names").get<std::uint64_t>();
    config.middle_names = j.at("middle_names").get<std::uint64_t>();
    config.last_names = j.at("last_names").get<std::uint64_t>();
    config.relations = j.at("relations").get<std::vector<std::string>>();
    config.properties.clear();
    for (const auto& p : j.at("properties")) {
      config.properties.push_back({p.at("name").get<std::string>(), p.at("pool_size").get<std::uint64_t>()});
    }
    config.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed world config: ") + e.what());
  }
}

const std::vector<std::string>& default_relation_names() {
  static const std::vector<std::string> names = {
      "mother", "father",   "parent",   "child",  "sibling", "spouse",  "boss",     "best friend", "mentor",
      "neighbor", "coworker", "roommate", "doctor", "lawyer",  "teacher", "landlord", "rival"};
  return names;
}

const std::vector<PropertySpec>& default_properties() {
  static const std::vector<PropertySpec> props = {
      {"birth city", 1000}, {"birth date", 36524}, {"employer", 1000}, {"university", 1000}};
  return props;
}

WorldConfig full_scale_config(std::uint64_t n_profiles, std::size_t relations, std::size_t properties, std::uint64_t seed) {
  const auto& rel = default_relation_names();
  const auto& props = default_properties();
  if (relations > rel.size()) throw ConfigError("at most " + std::to_string(rel.size()) + " preset relations");
  if (properties > props.size()) throw ConfigError("at most " + std::to_string(props.size()) + " preset properties");
  WorldConfig c;
  c.n_profiles = n_profiles;
  c.first_names = 8000;
  c.middle_names = 5000;
  c.last_names = 10000;
  c.relations.assign(rel.begin(), rel.begin() + static_cast<std::ptrdiff_t>(relations));
  c.properties.assign(props.begin(), props.begin() + static_cast<std::ptrdiff_t>(properties));
  c.seed = seed;
  return c;
}

EntityId World::relation_target(EntityId e, std::size_t relation) const {
  if (e >= profiles.size()) throw DomainError("unknown entity " + std::to_string(e));
  if (relation >= config.relations.size()) throw DomainError("relation index out of range");
  return profiles[e].relation_values[relation];
}

std::uint64_t World::attribute_value(EntityId e, std::size_t attribute) const {
  if (e >= profiles.size()) throw DomainError("unknown entity " + std::to_string(e));
  if (attribute < config.relations.size()) return profiles[e].relation_values[attribute];
  const auto p = attribute - config.relations.size();
  if (p >= config.properties.size()) throw DomainError("attribute index out of range");
  return profiles[e].property_values[p];
}

std::string World::full_name(EntityId e) const {
  if (e >= profiles.size()) throw DomainError("unknown entity " + std::to_string(e));
  const auto& p = profiles[e];
  return pool_word(0, config.first_names, p.first) + ' ' + pool_word(1, config.middle_names, p.middle) + ' ' +
         pool_word(2, config.last_names, p.last);
}

std::string World::answer_text(EntityId e, std::size_t attribute) const {
  const auto value = attribute_value(e, attribute);
  if (config.is_relation(attribute)) return full_name(static_cast<EntityId>(value));
  const auto p = attribute - config.relations.size();
  return property_value_text(config.properties[p], p, value);
}

std::string pool_word(std::uint64_t pool_tag, std::uint64_t pool_size, std::uint64_t k) {
  std::uint64_t modulus = kSyllables * kSyllables;
  int width = 2;
  while (modulus < pool_size) {
    modulus *= kSyllables;
    ++width;
  }
  const auto mult = kPoolMultipliers[pool_tag % kPoolMultipliers.size()];
  const auto offset = splitmix64(pool_tag) % modulus;
  // (k * mult + offset) mod modulus by repeated addition; the product can overflow 64 bits.
  const std::uint64_t base = k % modulus;
  std::uint64_t code = offset;
  for (std::uint64_t i = 0; i < mult; ++i) code = code >= modulus - base ? code - (modulus - base) : code + base;
  std::string word;
  word.reserve(static_cast<std::size_t>(width) * 2);
  for (int i = 0; i < width; ++i) {
    const auto syllable = code % kSyllables;
    code /= kSyllables;
    word += kConsonants[syllable / kVowels.size()];
    word += kVowels[syllable % kVowels.size()];
  }
  word[0] = static_cast<char>(word[0] - 'a' + 'A');
  return word;
}

std::string property_value_text(const PropertySpec& property, std::size_t property_index, std::uint64_t value) {
  if (property.name == "birth date") {
    using namespace std::chrono;
    const year_month_day d{sys_days{year{1900} / January / 1} + days{static_cast<long>(value)}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
  }
  const auto word = pool_word(3 + property_index, property.pool_size, value);
  if (property.name == "birth city") return word + "ton";
  if (property.name == "employer") return word + " Corp";
  if (property.name == "university") return word + " University";
  return word;
}

World generate_world(const WorldConfig& config) {
  config.validate();
  World world;
  world.config = config;
  const auto n = config.n_profiles;

  auto name_rng = make_rng(config.seed, "names");
  const auto codes = sample_without_replacement(name_rng, config.name_space(), n);
  const auto ml = config.middle_names * config.last_names;

  world.profiles.resize(static_cast<std::size_t>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    auto& p = world.profiles[static_cast<std::size_t>(i)];
    p.id = static_cast<EntityId>(i);
    p.first = static_cast<std::uint32_t>(codes[i] / ml);
    p.middle = static_cast<std::uint32_t>((codes[i] / config.last_names) % config.middle_names);
    p.last = static_cast<std::uint32_t>(codes[i] % config.last_names);

    auto rng = make_rng(config.seed, "profile", i);
    p.relation_values.reserve(config.relations.size());
    for (std::size_t r = 0; r < config.relations.size(); ++r) {
      p.relation_values.push_back(static_cast<EntityId>(uniform_below(rng, n)));
    }
    p.property_values.reserve(config.properties.size());
    for (const auto& prop : config.properties) p.property_values.push_back(uniform_below(rng, prop.pool_size));
  }
  return world;
}

}  // namespace hopcap
