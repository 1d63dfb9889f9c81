#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mesmix/network.hpp"

namespace mesmix {

enum class Season { onset, midseason, conclusion };

const char* to_string(Season s);
std::optional<Season> season_from_string(const std::string& s);

struct ScenarioSpec {
  std::string template_name = "berlin_dh";
  Season season = Season::onset;
  std::uint64_t seed = 1;
  double step_hours = 4.0;
  int step_count = 186;  // 31 days at 4 h
};

/// Synthetic district heating network: a gas heating plant, three CHPs, a heat
/// storage, four fuel markets, a power market and a pump feeding one heat demand.
/// Demand and prices are seeded series; only topology and capacity shares follow
/// the published case. Throws InvalidInstance for an unknown template.
NetworkGraph generate_instance(const ScenarioSpec& spec);

/// Heat output of every unit at full load, in MW.
double heat_capacity_mw(const NetworkGraph& g, const std::string& unit);
double total_heat_capacity_mw(const NetworkGraph& g);

}  // namespace mesmix
