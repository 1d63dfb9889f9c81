#include <doctest.h>

#include <algorithm>

#include "corpus.hpp"
#include "fixtures.hpp"
#include "mesmix/instance_io.hpp"
#include "mesmix/network.hpp"

using namespace mesmix;
using namespace mesmix::testing;

namespace {

bool has_code(const std::vector<Violation>& v, const std::string& code) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.code == code; });
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("fixtures and corpus instances are valid") {
    for (const auto& g : {market_demand(), single_unit(3), cost_tie(), turbine_boiler(), chp_plant()})
      CHECK_MESSAGE(validate_instance(g).empty(), g.name);
    for (int s = 0; s < kCorpusSize; ++s) CHECK(validate_instance(corpus_instance(s)).empty());
    for (int s = 0; s < kOracleCorpusSize; ++s) CHECK(validate_instance(oracle_instance(s)).empty());
  }

  TEST_CASE("dangling references") {
    auto g = single_unit();
    g.arcs.push_back(arc("loose", "u", "nowhere", "heat"));
    g.arcs.push_back(arc("odd", "m", "u", "steam"));
    const auto v = validate_instance(g);
    CHECK(has_code(v, "MissingEndpoint"));
    CHECK(has_code(v, "MissingResource"));
    CHECK(std::is_sorted(v.begin(), v.end()));
  }

  TEST_CASE("series length must match the grid") {
    auto g = single_unit(2);
    std::get<Demand>(g.nodes[2].data).demand = {5.0};
    CHECK(!validate_instance(g).empty());
  }

  TEST_CASE("duplicate ids and self loops") {
    auto g = single_unit();
    g.nodes.push_back(g.nodes[0]);
    g.arcs.push_back(arc("a1", "u", "u", "heat"));
    const auto v = validate_instance(g);
    CHECK(has_code(v, "DuplicateNodeId"));
    CHECK(has_code(v, "DuplicateArc"));
    CHECK(has_code(v, "SelfLoop"));
  }

  TEST_CASE("demand without an upstream producer") {
    auto g = single_unit();
    g.arcs.erase(g.arcs.begin());
    g.arcs[0].tail = "m";
    g.arcs[0].resource = "gas";
    CHECK(has_code(validate_instance(g), "UnreachableDemand"));
  }

  TEST_CASE("information elements need explicit permission") {
    auto g = single_unit();
    g.nodes.push_back(Node{"obj", ObjectiveNode{1, 1}});
    CHECK(has_code(validate_instance(g), "InformationInInstance"));
    CHECK(!has_code(validate_instance(g, true), "InformationInInstance"));
  }

  TEST_CASE("container boundaries") {
    auto g = single_unit();
    g.containers.push_back(Container{"site", {"u"}, "a1", "a2"});
    CHECK(validate_instance(g).empty());
    g.containers[0].boundary_in = "a2";
    CHECK(has_code(validate_instance(g), "ContainerBoundary"));
    g.containers[0] = Container{"site", {"u", "ghost"}, "a1", "a2"};
    CHECK(has_code(validate_instance(g), "ContainerMembership"));
  }

  TEST_CASE("invalid curve and parameters") {
    auto g = single_unit();
    g.nodes[1].unit().conversions[0].curve = Curve({0.0, 10.0}, {5.0, 1.0});
    g.nodes[1].unit().min_up_steps = -1;
    const auto v = validate_instance(g);
    CHECK(v.size() >= 2);
    CHECK(has_code(v, "BadParameter"));
  }

  TEST_CASE("JSON round trip keeps every field") {
    for (int s = 0; s < 20; ++s) {
      const auto g = corpus_instance(s);
      const auto back = instance_from_json(instance_to_json(g));
      CHECK(back.name == g.name);
      CHECK(back.grid == g.grid);
      CHECK(back.resources == g.resources);
      CHECK(back.nodes == g.nodes);
      CHECK(back.arcs == g.arcs);
      CHECK(back.containers == g.containers);
      CHECK(dump_json(instance_to_json(back)) == dump_json(instance_to_json(g)));
    }
  }

  TEST_CASE("infinite values are written as null") {
    auto g = single_unit();
    g.arcs[0].bounds.upper = kInf;
    const auto doc = instance_to_json(g);
    const auto text = dump_json(doc);
    CHECK(text.find("null") != std::string::npos);
    CHECK(instance_from_json(doc).arcs[0].bounds.upper == kInf);
  }

  TEST_CASE("malformed documents name the path") {
    auto doc = instance_to_json(single_unit());
    doc["arcs"][0]["tail"] = 7;
    try {
      instance_from_json(doc);
      FAIL("expected InvalidInstance");
    } catch (const InvalidInstance& e) {
      CHECK(std::string(e.what()).find("arcs") != std::string::npos);
    }
  }

  TEST_CASE("incidence lists arcs in graph order") {
    const auto g = cost_tie();
    Incidence inc(g);
    REQUIRE(inc.in_arcs("heat_bus").size() == 2);
    CHECK(inc.in_arcs("heat_bus")[0]->id == "h1");
    CHECK(inc.in_arcs("heat_bus")[1]->id == "h2");
    CHECK(inc.out_arcs("demand").empty());
  }
}
