#include "hopcap/error.hpp"
#include "hopcap/report.hpp"

namespace hopcap {

WorldConfig preset_config(std::string_view name) {
  if (name == "micro") {
    WorldConfig c;
    c.n_profiles = 100;
    c.first_names = c.middle_names = c.last_names = 10;
    c.relations = {"mother", "father", "boss"};
    c.properties = {{"birth city", 10}};
    return c;
  }
  if (name == "desk") return full_scale_config(1000, 5, 2);
  if (name == "trap") return full_scale_config(1000, 4, 4);
  if (name == "full") return full_scale_config(10000, 17, 4);
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected micro|desk|trap|full)");
}

}  // namespace hopcap
