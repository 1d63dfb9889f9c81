#include "mesmix/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mesmix/error.hpp"

namespace mesmix {

const char* to_string(Season s) {
  switch (s) {
    case Season::onset: return "onset";
    case Season::midseason: return "midseason";
    case Season::conclusion: return "conclusion";
  }
  return "onset";
}

std::optional<Season> season_from_string(const std::string& s) {
  if (s == "onset") return Season::onset;
  if (s == "midseason") return Season::midseason;
  if (s == "conclusion") return Season::conclusion;
  return std::nullopt;
}

namespace {

constexpr double kTotalHeatMw = 120.0;
constexpr double kStorageShare = 0.8474;

class Noise {
 public:
  explicit Noise(std::uint64_t seed) : rng_(seed) {}
  // uniform on [-1, 1), independent of the standard library's distribution code
  double next() { return static_cast<double>(rng_() >> 11) * 0x1.0p-52 - 1.0; }

 private:
  std::mt19937_64 rng_;
};

double round4(double v) { return std::round(v * 1e4) / 1e4; }

Curve linear(double in_max, double efficiency) { return Curve({0.0, in_max}, {0.0, in_max * efficiency}); }

/// Fuel to intermediate heat with lower efficiency in the upper half of the range.
Curve burner(double in_max, double eff_low, double eff_high) {
  const double half = 0.5 * in_max;
  return Curve({0.0, half, in_max}, {0.0, half * eff_low, half * eff_low + half * eff_high});
}

struct PlantSpec {
  std::string id;
  std::string fuel;
  double share;
  bool chp;
  double startup_cost;
  int min_up;
  int min_down;
  double ramp_share;  // of heat capacity per step
};

struct Plant {
  Node node;
  double fuel_max = 0.0;
  double heat_max = 0.0;
  double power_max = 0.0;
};

Plant make_plant(const PlantSpec& s, double step_hours) {
  const double heat = s.share * kTotalHeatMw * step_hours;
  GeneratingUnit u;
  u.min_up_steps = s.min_up;
  u.min_down_steps = s.min_down;
  u.ramp_up = u.ramp_down = round4(s.ramp_share * heat);
  u.startup_cost = s.startup_cost;
  u.initial_status = 1;
  Plant p;
  if (!s.chp) {
    const double e1_low = 0.97, e1_high = 0.93, e2 = 0.98, e3 = 0.99;
    const double fuel = heat / (0.5 * (e1_low + e1_high) * e2 * e3);
    Curve c1 = burner(fuel, e1_low, e1_high);
    Curve c2 = linear(c1.target_max(), e2);
    Curve c3 = linear(c2.target_max(), e3);
    u.stages = {Stage{"burner", {Conversion{s.fuel, "flue_gas", c1}}},
                Stage{"exchanger", {Conversion{"flue_gas", "hot_water", c2}}},
                Stage{"outlet", {Conversion{"hot_water", "heat", c3}}}};
    p.fuel_max = fuel;
    p.heat_max = c3.target_max();
  } else {
    const double e1_low = 0.92, e1_high = 0.86, e2 = 0.97, heat_eff = 0.6, power_eff = 0.3;
    const double fuel = heat / (0.5 * (e1_low + e1_high) * e2 * heat_eff);
    Curve c1 = burner(fuel, e1_low, e1_high);
    Curve c2 = linear(c1.target_max(), e2);
    Curve heat_curve = linear(c2.target_max(), heat_eff);
    Curve power_curve = linear(c2.target_max(), power_eff);
    u.stages = {Stage{"boiler", {Conversion{s.fuel, "steam", c1}}},
                Stage{"superheater", {Conversion{"steam", "live_steam", c2}}},
                Stage{"turbine", {Conversion{"live_steam", "heat", heat_curve}, Conversion{"live_steam", "power", power_curve}}}};
    p.fuel_max = fuel;
    p.heat_max = heat_curve.target_max();
    p.power_max = power_curve.target_max();
  }
  p.node = Node{s.id, std::move(u)};
  return p;
}

/// Heat demand level as a fraction of total capacity, before noise.
double demand_level(Season season, double progress) {
  switch (season) {
    case Season::onset: return 0.25 + 0.30 * progress;
    case Season::midseason: return 0.70 + 0.05 * std::sin(2.0 * std::numbers::pi * progress);
    case Season::conclusion: return 0.50 - 0.30 * progress;
  }
  return 0.5;
}

double gas_price(Season season) {
  switch (season) {
    case Season::onset: return 30.0;
    case Season::midseason: return 38.0;
    case Season::conclusion: return 28.0;
  }
  return 30.0;
}

}  // namespace

NetworkGraph generate_instance(const ScenarioSpec& spec) {
  if (spec.template_name != "berlin_dh") throw InvalidInstance("unknown scenario template '" + spec.template_name + "'");
  if (spec.step_count < 1 || !(spec.step_hours > 0.0)) throw InvalidInstance("scenario needs a positive horizon");
  const int T = spec.step_count;
  const double dt = spec.step_hours;
  // Separate streams keep each series stable when another one changes.
  const std::uint64_t season_salt = static_cast<std::uint64_t>(spec.season) + 1;
  Noise demand_noise(spec.seed * 1000003ULL + season_salt);
  Noise price_noise(spec.seed * 2000003ULL + season_salt);

  NetworkGraph g;
  g.name = std::string("berlin_dh-") + to_string(spec.season) + "-seed" + std::to_string(spec.seed) + "-synthetic";
  g.grid = TimeGrid{T, dt};
  g.resources = {{"gas", ResourceKind::fuel},        {"biomethane", ResourceKind::fuel},
                 {"biomass", ResourceKind::fuel},    {"flue_gas", ResourceKind::heat},
                 {"hot_water", ResourceKind::heat},  {"steam", ResourceKind::heat},
                 {"live_steam", ResourceKind::heat}, {"heat", ResourceKind::heat},
                 {"power", ResourceKind::power}};

  // Shares of total heat capacity; each rounds to the published one-decimal percentage.
  const std::vector<PlantSpec> specs = {
      {"heating_plant", "gas", 0.8164, false, 500.0, 2, 2, 0.5},
      {"chp_biomass", "biomass", 0.1684, true, 800.0, 3, 3, 0.4},
      {"chp_gas", "gas", 0.0134, true, 40.0, 1, 1, 1.0},
      {"chp_biogas", "biomethane", 0.0018, true, 10.0, 1, 1, 1.0},
  };
  std::vector<Plant> plants;
  for (const auto& s : specs) plants.push_back(make_plant(s, dt));
  double heat_total = 0.0, power_total = 0.0;
  for (const auto& p : plants) {
    heat_total += p.heat_max;
    power_total += p.power_max;
  }
  const double heat_mw = heat_total / dt;

  std::vector<double> demand(static_cast<std::size_t>(T)), pump_power(static_cast<std::size_t>(T));
  double peak = 0.0;
  for (int t = 0; t < T; ++t) {
    const double hour = std::fmod(t * dt, 24.0);
    const double level = demand_level(spec.season, T > 1 ? static_cast<double>(t) / (T - 1) : 0.0) +
                         0.08 * std::cos(2.0 * std::numbers::pi * (hour - 6.0) / 24.0) + 0.03 * demand_noise.next();
    demand[static_cast<std::size_t>(t)] = std::clamp(level, 0.05, 0.95) * heat_total;
    peak = std::max(peak, demand[static_cast<std::size_t>(t)]);
  }
  const double scale = peak > 0.95 * heat_total ? 0.95 * heat_total / peak : 1.0;
  for (int t = 0; t < T; ++t) {
    auto& d = demand[static_cast<std::size_t>(t)];
    d = round4(d * scale);
    pump_power[static_cast<std::size_t>(t)] = round4(0.01 * d);
  }

  const double gas_base = gas_price(spec.season);
  std::vector<double> gas(static_cast<std::size_t>(T)), syngas(static_cast<std::size_t>(T)),
      biomethane(static_cast<std::size_t>(T)), biomass(static_cast<std::size_t>(T)),
      power_buy(static_cast<std::size_t>(T)), power_sell(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const auto k = static_cast<std::size_t>(t);
    const double hour = std::fmod(t * dt, 24.0);
    gas[k] = round4(gas_base + 2.0 * price_noise.next());
    syngas[k] = round4(gas_base + 8.0 + 2.0 * price_noise.next());
    biomethane[k] = round4(60.0 + 3.0 * price_noise.next());
    biomass[k] = round4(22.0 + 1.0 * price_noise.next());
    power_buy[k] = round4(85.0 + 25.0 * std::sin(2.0 * std::numbers::pi * (hour - 8.0) / 24.0) + 5.0 * price_noise.next());
    power_sell[k] = round4(power_buy[k] - 15.0);
  }

  const double storage_max = round4(kStorageShare * heat_mw * 1.0);
  const double storage_rate = round4(0.25 * storage_max);
  const double fuel_hp = plants[0].fuel_max, fuel_chp_gas = plants[2].fuel_max;
  const double pump_max = *std::max_element(pump_power.begin(), pump_power.end());

  const std::vector<double> none(static_cast<std::size_t>(T), 0.0);
  g.nodes.push_back(Node{"gas_market", Market{"gas", gas, none, 0.201}});
  g.nodes.push_back(Node{"syngas_market", Market{"gas", syngas, none, 0.12}});
  g.nodes.push_back(Node{"biomethane_market", Market{"biomethane", biomethane, none, 0.02}});
  g.nodes.push_back(Node{"biomass_market", Market{"biomass", biomass, none, 0.015}});
  g.nodes.push_back(Node{"power_market", Market{"power", power_buy, power_sell, 0.38}});
  g.nodes.push_back(Node{"gas_hub", Balance{}});
  for (const auto& p : plants) g.nodes.push_back(p.node);
  g.nodes.push_back(Node{"pump", Balance{}});
  g.nodes.push_back(Node{"heat_bus", Balance{}});
  g.nodes.push_back(Node{"power_bus", Balance{}});
  Storage st;
  st.resource = "heat";
  st.loss = 0.995;
  st.load_eff = 0.98;
  st.unload_eff = 1.0;
  st.level_min = 0.0;
  st.level_max = storage_max;
  st.initial_level = round4(0.5 * storage_max);
  g.nodes.push_back(Node{"storage", st});
  g.nodes.push_back(Node{"heat_demand", Demand{"heat", demand}});
  g.nodes.push_back(Node{"pump_drive", Demand{"power", pump_power}});

  auto arc = [&](std::string id, std::string tail, std::string head, std::string res, double upper) {
    g.arcs.push_back(Arc{std::move(id), std::move(tail), std::move(head), std::move(res), Bounds{0.0, upper}});
  };
  arc("gas_supply", "gas_market", "gas_hub", "gas", fuel_hp + fuel_chp_gas);
  arc("syngas_supply", "syngas_market", "gas_hub", "gas", 0.3 * (fuel_hp + fuel_chp_gas));
  arc("hub_heating_plant", "gas_hub", "heating_plant", "gas", fuel_hp);
  arc("hub_chp_gas", "gas_hub", "chp_gas", "gas", fuel_chp_gas);
  arc("biomethane_supply", "biomethane_market", "chp_biogas", "biomethane", plants[3].fuel_max);
  arc("biomass_supply", "biomass_market", "chp_biomass", "biomass", plants[1].fuel_max);
  for (const auto& p : plants) arc(p.node.id + "_heat", p.node.id, "pump", "heat", p.heat_max);
  for (const auto& p : plants)
    if (p.power_max > 0.0) arc(p.node.id + "_power", p.node.id, "power_bus", "power", p.power_max);
  arc("pump_out", "pump", "heat_bus", "heat", heat_total);
  arc("storage_load", "heat_bus", "storage", "heat", storage_rate);
  arc("storage_unload", "storage", "heat_bus", "heat", storage_rate);
  arc("heat_delivery", "heat_bus", "heat_demand", "heat", heat_total + storage_rate);
  arc("pump_power", "power_bus", "pump_drive", "power", pump_max);
  arc("power_sale", "power_bus", "power_market", "power", power_total);
  arc("power_purchase", "power_market", "power_bus", "power", pump_max);

  g.containers.push_back(Container{"gas_plant_site", {"heating_plant"}, "hub_heating_plant", "heating_plant_heat"});
  g.containers.push_back(Container{"storage_site", {"storage"}, "storage_load", "storage_unload"});
  return g;
}

double heat_capacity_mw(const NetworkGraph& g, const std::string& unit) {
  const Node* n = g.find_node(unit);
  if (!n || !n->is(NodeKind::unit)) throw InvalidInstance("no unit " + unit);
  double heat = 0.0;
  for (const auto& c : external_conversions(n->unit())) {
    const Resource* r = g.find_resource(c.output);
    if (r && r->kind == ResourceKind::heat) heat += c.curve.target_max();
  }
  return heat / g.grid.step_hours;
}

double total_heat_capacity_mw(const NetworkGraph& g) {
  double total = 0.0;
  for (const auto& n : g.nodes)
    if (n.is(NodeKind::unit)) total += heat_capacity_mw(g, n.id);
  return total;
}

}  // namespace mesmix
