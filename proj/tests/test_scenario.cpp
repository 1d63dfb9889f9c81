#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mesmix/instance_io.hpp"
#include "mesmix/scenario.hpp"

using namespace mesmix;

TEST_SUITE("scenario") {
  TEST_CASE("capacity shares round to the published percentages") {
    for (Season s : {Season::onset, Season::midseason, Season::conclusion}) {
      const auto g = generate_instance(ScenarioSpec{"berlin_dh", s, 3});
      const double total = total_heat_capacity_mw(g);
      const std::pair<const char*, double> shares[] = {
          {"heating_plant", 81.6}, {"chp_biomass", 16.8}, {"chp_gas", 1.3}, {"chp_biogas", 0.2}};
      for (const auto& [unit, percent] : shares)
        CHECK(std::round(1000.0 * heat_capacity_mw(g, unit) / total) / 10.0 == doctest::Approx(percent));
    }
  }

  TEST_CASE("storage holds 84.74 percent of an hour at full heat") {
    const auto g = generate_instance(ScenarioSpec{});
    const Node* st = g.find_node("storage");
    REQUIRE(st != nullptr);
    CHECK(st->storage().level_max / total_heat_capacity_mw(g) == doctest::Approx(0.8474).epsilon(1e-4));
  }

  TEST_CASE("one month at four hours") {
    const auto g = generate_instance(ScenarioSpec{});
    CHECK(g.grid.step_count == 186);
    CHECK(g.grid.step_hours == 4.0);
    CHECK(validate_instance(g).empty());
    CHECK(g.name.find("synthetic") != std::string::npos);
  }

  TEST_CASE("peak demand stays below 95 percent of capacity") {
    for (Season s : {Season::onset, Season::midseason, Season::conclusion})
      for (std::uint64_t seed : {1, 2, 3}) {
        const auto g = generate_instance(ScenarioSpec{"berlin_dh", s, seed});
        const auto& d = g.find_node("heat_demand")->demand().demand;
        const double peak = *std::max_element(d.begin(), d.end());
        CHECK(peak <= 0.95 * total_heat_capacity_mw(g) * g.grid.step_hours + 1e-9);
        CHECK(*std::min_element(d.begin(), d.end()) > 0.0);
      }
  }

  TEST_CASE("generation is deterministic per season and seed") {
    const ScenarioSpec spec{"berlin_dh", Season::midseason, 7};
    CHECK(dump_json(instance_to_json(generate_instance(spec))) == dump_json(instance_to_json(generate_instance(spec))));
    ScenarioSpec other = spec;
    other.seed = 8;
    CHECK(dump_json(instance_to_json(generate_instance(spec))) != dump_json(instance_to_json(generate_instance(other))));
  }

  TEST_CASE("seasons differ in demand level") {
    auto mean = [](Season s) {
      const auto g = generate_instance(ScenarioSpec{"berlin_dh", s, 1});
      const auto& d = g.find_node("heat_demand")->demand().demand;
      double sum = 0.0;
      for (double v : d) sum += v;
      return sum / static_cast<double>(d.size());
    };
    CHECK(mean(Season::midseason) > mean(Season::onset));
    CHECK(mean(Season::midseason) > mean(Season::conclusion));
  }

  TEST_CASE("unknown template") {
    ScenarioSpec spec;
    spec.template_name = "paris";
    CHECK_THROWS_AS(generate_instance(spec), InvalidInstance);
    CHECK(!season_from_string("winter").has_value());
    CHECK(season_from_string("conclusion") == Season::conclusion);
  }
}
