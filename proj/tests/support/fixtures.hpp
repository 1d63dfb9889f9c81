#pragma once

#include <string>
#include <vector>

#include "mesmix/network.hpp"

namespace mesmix::testing {

inline std::vector<double> constant(int steps, double v) { return std::vector<double>(static_cast<std::size_t>(steps), v); }

inline Arc arc(std::string id, std::string tail, std::string head, std::string resource, double upper = 100.0) {
  return Arc{std::move(id), std::move(tail), std::move(head), std::move(resource), Bounds{0.0, upper}};
}

inline GeneratingUnit boiler(std::string input, std::string output, Curve curve) {
  GeneratingUnit u;
  u.conversions = {Conversion{std::move(input), std::move(output), std::move(curve)}};
  return u;
}

/// A heat market feeding one demand through a single arc.
inline NetworkGraph market_demand(int steps = 1) {
  NetworkGraph g;
  g.name = "market_demand";
  g.grid = TimeGrid{steps, 1.0};
  g.resources = {{"heat", ResourceKind::heat}};
  g.nodes = {Node{"market", Market{"heat", constant(steps, 3.0), constant(steps, 0.0), 0.1}},
             Node{"demand", Demand{"heat", constant(steps, 4.0)}}};
  g.arcs = {arc("supply", "market", "demand", "heat")};
  return g;
}

/// Gas market, one boiler with slope 0.5 and a demand of 5 per step.
inline NetworkGraph single_unit(int steps = 1) {
  NetworkGraph g;
  g.name = "single_unit";
  g.grid = TimeGrid{steps, 1.0};
  g.resources = {{"gas", ResourceKind::fuel}, {"heat", ResourceKind::heat}};
  g.nodes = {Node{"m", Market{"gas", constant(steps, 1.0), constant(steps, 0.0), 0.0}},
             Node{"u", boiler("gas", "heat", Curve({0.0, 20.0}, {0.0, 10.0}))},
             Node{"d", Demand{"heat", constant(steps, 5.0)}}};
  g.arcs = {arc("a1", "m", "u", "gas"), arc("a2", "u", "d", "heat")};
  return g;
}

/// Two identical boilers on equally priced fuels with different emission factors.
inline NetworkGraph cost_tie() {
  NetworkGraph g;
  g.name = "cost_tie";
  g.grid = TimeGrid{1, 1.0};
  g.resources = {{"gas", ResourceKind::fuel}, {"biogas", ResourceKind::fuel}, {"heat", ResourceKind::heat}};
  g.nodes = {Node{"gas_market", Market{"gas", {2.0}, {0.0}, 0.2}},
             Node{"bio_market", Market{"biogas", {2.0}, {0.0}, 0.05}},
             Node{"b1", boiler("gas", "heat", Curve({0.0, 20.0}, {0.0, 10.0}))},
             Node{"b2", boiler("biogas", "heat", Curve({0.0, 20.0}, {0.0, 10.0}))},
             Node{"heat_bus", Balance{}},
             Node{"demand", Demand{"heat", {5.0}}}};
  g.arcs = {arc("g1", "gas_market", "b1", "gas"), arc("g2", "bio_market", "b2", "biogas"),
            arc("h1", "b1", "heat_bus", "heat"), arc("h2", "b2", "heat_bus", "heat"),
            arc("out", "heat_bus", "demand", "heat")};
  return g;
}

/// Gas turbine (slope 0.4) feeding a heat boiler (slope 0.9) as separate units.
inline NetworkGraph turbine_boiler() {
  NetworkGraph g;
  g.name = "turbine_boiler";
  g.grid = TimeGrid{2, 1.0};
  g.resources = {{"gas", ResourceKind::fuel}, {"steam", ResourceKind::heat}, {"heat", ResourceKind::heat}};
  GeneratingUnit turbine = boiler("gas", "steam", Curve({0.0, 100.0}, {0.0, 40.0}));
  turbine.min_up_steps = 3;
  turbine.startup_cost = 2.0;
  turbine.ramp_up = 30.0;
  GeneratingUnit heat = boiler("steam", "heat", Curve({0.0, 40.0}, {0.0, 36.0}));
  heat.min_up_steps = 5;
  heat.startup_cost = 3.0;
  heat.ramp_up = 20.0;
  g.nodes = {Node{"m", Market{"gas", {1.0, 1.5}, {0.0, 0.0}, 0.2}}, Node{"turbine", turbine}, Node{"boiler", heat},
             Node{"d", Demand{"heat", {9.0, 18.0}}}};
  g.arcs = {arc("fuel", "m", "turbine", "gas", 100.0), arc("steam", "turbine", "boiler", "steam", 40.0),
            arc("heat", "boiler", "d", "heat", 36.0)};
  return g;
}

/// Gas CHP with heat and power outputs, a power sale and a heat demand.
inline NetworkGraph chp_plant() {
  NetworkGraph g;
  g.name = "chp_plant";
  g.grid = TimeGrid{2, 1.0};
  g.resources = {{"gas", ResourceKind::fuel}, {"heat", ResourceKind::heat}, {"power", ResourceKind::power}};
  GeneratingUnit chp;
  chp.conversions = {Conversion{"gas", "heat", Curve({0.0, 50.0}, {0.0, 25.0})},
                     Conversion{"gas", "power", Curve({0.0, 50.0}, {0.0, 15.0})}};
  g.nodes = {Node{"m", Market{"gas", {1.0, 1.0}, {0.0, 0.0}, 0.2}}, Node{"chp", chp},
             Node{"grid", Market{"power", {9.0, 9.0}, {2.0, 2.0}, 0.4}}, Node{"d", Demand{"heat", {10.0, 20.0}}}};
  g.arcs = {arc("fuel", "m", "chp", "gas", 50.0), arc("heat", "chp", "d", "heat", 25.0),
            arc("power", "chp", "grid", "power", 15.0)};
  return g;
}

}  // namespace mesmix::testing
