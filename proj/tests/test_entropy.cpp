#include <doctest.h>

#include <cmath>

#include "hopcap/entropy.hpp"
#include "hopcap/error.hpp"
#include "hopcap/rng.hpp"

using namespace hopcap;

namespace {

WorldConfig micro() {
  WorldConfig c;
  c.n_profiles = 100;
  c.first_names = c.middle_names = c.last_names = 10;
  c.relations = {"mother", "father", "boss"};
  c.properties = {{"birth city", 10}};
  return c;
}

// Random config with at least two relations.
WorldConfig random_config(Rng& rng) {
  WorldConfig c;
  c.first_names = 5 + uniform_below(rng, 50);
  c.middle_names = 5 + uniform_below(rng, 50);
  c.last_names = 5 + uniform_below(rng, 50);
  c.n_profiles = 2 + uniform_below(rng, std::min<std::uint64_t>(c.name_space() - 2, 5000));
  const auto r = 2 + uniform_below(rng, 10);
  for (std::size_t i = 0; i < r; ++i) c.relations.push_back("rel" + std::to_string(i));
  const auto p = uniform_below(rng, 4);
  for (std::size_t i = 0; i < p; ++i) c.properties.push_back({"prop" + std::to_string(i), 1 + uniform_below(rng, 40000)});
  return c;
}

}  // namespace

TEST_CASE("name selection entropy reference values") {
  // mpmath, 30 digits
  CHECK(name_selection_entropy(1000, 400000000000ULL) == doctest::Approx(38541.209043760986).epsilon(1e-12));
  CHECK(name_selection_entropy(3, 20) == doctest::Approx(12.965784284662087).epsilon(1e-12));
  CHECK(name_selection_exact_bits(3, 20) == doctest::Approx(10.154818109052104).epsilon(1e-9));
  CHECK(name_selection_entropy(100, 1000) == doctest::Approx(996.5784284662087).epsilon(1e-12));
  CHECK_THROWS_AS(name_selection_entropy(0, 10), DomainError);
  CHECK_THROWS_AS(name_selection_entropy(11, 10), DomainError);
}

TEST_CASE("attribute entropy") {
  CHECK(attribute_entropy(1) == 0.0);
  CHECK(attribute_entropy(100) == doctest::Approx(6.643856189774725).epsilon(1e-14));
  CHECK(attribute_entropy(1000) == doctest::Approx(9.965784284662087).epsilon(1e-14));
}

TEST_CASE("micro config entropies") {
  const auto c = micro();
  const auto e1 = dataset_entropy(c, Task::OneHop);
  CHECK(e1.name_bits == doctest::Approx(996.5784284662087).epsilon(1e-12));
  CHECK(e1.fact_bits_per_pass == doctest::Approx(2325.3496664211536).epsilon(1e-12));
  CHECK(e1.total_bits == doctest::Approx(3321.928094887362).epsilon(1e-12));
  CHECK(dataset_entropy(c, Task::TwoHop, ModelKind::Recurrent).total_bits == doctest::Approx(3321.928094887362).epsilon(1e-12));
  CHECK(dataset_entropy(c, Task::TwoHop, ModelKind::TwoFunction).total_bits == doctest::Approx(5647.277761308516).epsilon(1e-12));
  CHECK(dataset_entropy(c, Task::TwoHop, ModelKind::Independent).total_bits == doctest::Approx(7972.627427729670).epsilon(1e-12));
  const auto strict = dataset_entropy(c, Task::TwoHop, ModelKind::TwoFunction, {true});
  CHECK(strict.strict);
  CHECK(strict.total_bits == doctest::Approx(5315.08495181978).epsilon(1e-12));
  // 100 / 1000 is far above the approximation threshold
  REQUIRE(e1.name_bits_exact.has_value());
  CHECK(*e1.name_bits_exact == doctest::Approx(464.42270337623427).epsilon(1e-9));  // log2 C(1000, 100)
}

TEST_CASE("two-hop entropy needs a kind") {
  CHECK_THROWS_AS(dataset_entropy(micro(), Task::TwoHop), DomainError);
}

TEST_CASE("names and kinds parse") {
  CHECK(parse_model_kind("2f") == ModelKind::TwoFunction);
  CHECK(parse_model_kind("recurrent") == ModelKind::Recurrent);
  CHECK(parse_model_kind("independent") == ModelKind::Independent);
  CHECK(to_string(ModelKind::TwoFunction) == "2f");
  CHECK(parse_task("two-hop") == Task::TwoHop);
  CHECK_THROWS(parse_model_kind("lstm"));
  CHECK_THROWS(parse_task("three-hop"));
}

TEST_CASE("uniform baseline equals name entropy for each task and kind") {
  const auto c = micro();
  const double names = name_selection_entropy(100, 1000);
  CHECK(baseline_content(c, Task::OneHop) == doctest::Approx(names).epsilon(1e-12));
  for (auto k : {ModelKind::Recurrent, ModelKind::TwoFunction, ModelKind::Independent}) {
    CHECK(std::abs(baseline_content(c, Task::TwoHop, k) - names) < 1e-6);
    CHECK(std::abs(baseline_content(c, Task::TwoHop, k, {true}) - names) < 1e-6);
  }
}

TEST_CASE("property: entropy ordering and baseline on random configs") {
  auto rng = make_rng(2024, "entropy-configs");
  for (int i = 0; i < 50; ++i) {
    const auto c = random_config(rng);
    const double e1 = dataset_entropy(c, Task::OneHop).total_bits;
    const double rec = dataset_entropy(c, Task::TwoHop, ModelKind::Recurrent).total_bits;
    const double tf = dataset_entropy(c, Task::TwoHop, ModelKind::TwoFunction).total_bits;
    const double strict = dataset_entropy(c, Task::TwoHop, ModelKind::TwoFunction, {true}).total_bits;
    const double ind = dataset_entropy(c, Task::TwoHop, ModelKind::Independent).total_bits;
    CHECK(e1 == rec);
    CHECK(rec <= strict);
    CHECK(strict <= tf);
    CHECK(tf <= ind + 1e-9);
    const double names = name_selection_entropy(c.n_profiles, c.name_space());
    CHECK(std::abs(baseline_content(c, Task::OneHop) - names) < 1e-6);
    CHECK(std::abs(baseline_content(c, Task::TwoHop, ModelKind::TwoFunction) - names) < 1e-6);
    CHECK(std::abs(baseline_content(c, Task::TwoHop, ModelKind::Independent) - names) < 1e-6);
  }
}

TEST_CASE("report json rounds to six places") {
  const auto j = dataset_entropy(micro(), Task::OneHop).to_json();
  CHECK(j.at("total_bits").get<double>() == 3321.928095);
  CHECK(j.at("task") == "one-hop");
  CHECK(round_bits(1.23456749) == 1.234567);
}
