#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hopcap {

using EntityId = std::uint32_t;

struct PropertySpec {
  std::string name;
  std::uint64_t pool_size = 1;

  friend bool operator==(const PropertySpec&, const PropertySpec&) = default;
};

// Generation parameters for a profile world. Attributes are the relations
// followed by the properties, in declaration order; attribute indices used
// throughout the library refer to that concatenated order.
struct WorldConfig {
  std::uint64_t n_profiles = 0;
  std::uint64_t first_names = 0;
  std::uint64_t middle_names = 0;
  std::uint64_t last_names = 0;
  std::vector<std::string> relations;
  std::vector<PropertySpec> properties;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t relation_count() const noexcept { return relations.size(); }
  [[nodiscard]] std::size_t attribute_count() const noexcept { return relations.size() + properties.size(); }
  [[nodiscard]] bool is_relation(std::size_t attribute) const noexcept { return attribute < relations.size(); }

  // Size of the name space N0 = first * middle * last. Saturates at UINT64_MAX.
  [[nodiscard]] std::uint64_t name_space() const noexcept;

  // |V_a|: n_profiles for relations, pool_size for properties.
  [[nodiscard]] std::uint64_t value_pool(std::size_t attribute) const;
  [[nodiscard]] const std::string& attribute_name(std::size_t attribute) const;
  [[nodiscard]] std::optional<std::size_t> find_attribute(std::string_view name) const;
  [[nodiscard]] std::optional<std::size_t> find_relation(std::string_view name) const;

  // Throws ConfigError naming the first violated invariant.
  void validate() const;

  friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

void to_json(nlohmann::json& j, const WorldConfig& config);
void from_json(const nlohmann::json& j, WorldConfig& config);

// Relation names in the order used by the presets; at most 17.
[[nodiscard]] const std::vector<std::string>& default_relation_names();
// birth city, birth date, employer, university with their default pool sizes.
[[nodiscard]] const std::vector<PropertySpec>& default_properties();

// 8000 x 5000 x 10000 name pools, the default relations and properties
// truncated to the requested counts.
[[nodiscard]] WorldConfig full_scale_config(std::uint64_t n_profiles, std::size_t relations = 17,
                                       std::size_t properties = 4, std::uint64_t seed = 0);

struct Profile {
  EntityId id = 0;
  std::uint32_t first = 0;
  std::uint32_t middle = 0;
  std::uint32_t last = 0;
  std::vector<EntityId> relation_values;       // indexed like config.relations
  std::vector<std::uint64_t> property_values;  // indexed like config.properties

  friend bool operator==(const Profile&, const Profile&) = default;
};

struct World {
  WorldConfig config;
  std::vector<Profile> profiles;

  [[nodiscard]] std::size_t size() const noexcept { return profiles.size(); }
  [[nodiscard]] EntityId relation_target(EntityId e, std::size_t relation) const;
  // Value index of attribute a for entity e (an entity id for relations).
  [[nodiscard]] std::uint64_t attribute_value(EntityId e, std::size_t attribute) const;

  [[nodiscard]] std::string full_name(EntityId e) const;
  // Rendered answer string for attribute a of entity e.
  [[nodiscard]] std::string answer_text(EntityId e, std::size_t attribute) const;

  friend bool operator==(const World&, const World&) = default;
};

[[nodiscard]] World generate_world(const WorldConfig& config);

// Deterministic word for index k of a name pool. pool_tag separates the
// first/middle/last pools so the same index renders differently.
[[nodiscard]] std::string pool_word(std::uint64_t pool_tag, std::uint64_t pool_size, std::uint64_t k);
// Rendered value string for a property value index.
[[nodiscard]] std::string property_value_text(const PropertySpec& property, std::size_t property_index,
                                              std::uint64_t value);

}  // namespace hopcap
