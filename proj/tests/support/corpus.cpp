#include "corpus.hpp"

#include <algorithm>
#include <cmath>

namespace mesmix::testing {

namespace {

double round4(double v) { return std::round(v * 1e4) / 1e4; }

Curve round_curve(const Curve& c) {
  Eigen::VectorXd s = c.source(), t = c.target();
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    s(k) = round4(s(k));
    t(k) = round4(t(k));
  }
  return Curve(s, t);
}

struct UnitPlan {
  std::string id;
  bool chp = false;
  int stages = 1;
  Node node;
  double fuel_max = 0.0;
  double heat_max = 0.0;
  double power_max = 0.0;
};

// Builds a unit from gas to heat (and power). Stage chains pass through
// intermediate resources named after the unit.
UnitPlan make_unit(Rng& rng, NetworkGraph& g, const std::string& id, bool chp, int stages, double heat_cap,
                   int max_breakpoints, bool concave) {
  UnitPlan p;
  p.id = id;
  p.chp = chp;
  p.stages = stages;
  auto bps = [&] { return rng.integer(2, max_breakpoints); };
  const double fuel = round4(heat_cap / (chp ? 0.5 : 0.85));
  p.fuel_max = fuel;

  auto outputs = [&](const std::string& input, double in_max) {
    std::vector<Conversion> out;
    if (chp) {
      Curve heat = round_curve(random_curve(rng, bps(), in_max, 0.45, 0.6, concave));
      Curve power = round_curve(random_curve(rng, bps(), in_max, 0.25, 0.35, concave));
      p.heat_max = heat.target_max();
      p.power_max = power.target_max();
      out.push_back(Conversion{input, "heat", heat});
      out.push_back(Conversion{input, "power", power});
    } else {
      Curve heat = round_curve(random_curve(rng, bps(), in_max, 0.8, 0.95, concave));
      p.heat_max = heat.target_max();
      out.push_back(Conversion{input, "heat", heat});
    }
    return out;
  };

  GeneratingUnit u;
  if (stages == 1) {
    u.conversions = outputs("gas", fuel);
  } else {
    std::string input = "gas";
    double in_max = fuel;
    for (int k = 0; k + 1 < stages; ++k) {
      const std::string mid = id + "_m" + std::to_string(k);
      g.resources.push_back(Resource{mid, ResourceKind::heat});
      Curve c = round_curve(random_curve(rng, bps(), in_max, 0.9, 0.99, concave));
      u.stages.push_back(Stage{"s" + std::to_string(k), {Conversion{input, mid, c}}});
      input = mid;
      in_max = c.target_max();
    }
    u.stages.push_back(Stage{"s" + std::to_string(stages - 1), outputs(input, in_max)});
  }
  u.min_up_steps = rng.integer(0, 2);
  u.min_down_steps = rng.integer(0, 2);
  if (rng.chance(0.5)) {
    u.ramp_up = round4(rng.uniform(0.6, 0.9) * p.heat_max);
    u.ramp_down = round4(rng.uniform(0.6, 0.9) * p.heat_max);
  }
  u.startup_cost = round4(rng.uniform(0.0, 30.0));
  u.initial_status = rng.integer(0, 1);
  p.node = Node{id, std::move(u)};
  return p;
}

std::vector<double> series(Rng& rng, int steps, double lo, double hi) {
  std::vector<double> s(static_cast<std::size_t>(steps));
  for (auto& v : s) v = round4(rng.uniform(lo, hi));
  return s;
}

struct Plan {
  int steps = 1;
  std::vector<std::pair<bool, int>> units;  // (chp, stages)
  int max_breakpoints = 3;
  bool concave = false;
  bool second_market = false;
  bool storage = false;
  int containers = 0;
};

NetworkGraph assemble(Rng& rng, const Plan& plan, const std::string& name) {
  NetworkGraph g;
  g.name = name;
  g.grid = TimeGrid{plan.steps, 1.0};
  g.resources = {{"gas", ResourceKind::fuel}, {"heat", ResourceKind::heat}, {"power", ResourceKind::power}};

  std::vector<UnitPlan> units;
  for (std::size_t i = 0; i < plan.units.size(); ++i)
    units.push_back(make_unit(rng, g, "u" + std::to_string(i), plan.units[i].first, plan.units[i].second,
                              rng.uniform(10.0, 40.0), plan.max_breakpoints, plan.concave));
  double fuel_total = 0.0, heat_total = 0.0, power_total = 0.0;
  bool any_chp = false;
  for (const auto& u : units) {
    fuel_total += u.fuel_max;
    heat_total += u.heat_max;
    power_total += u.power_max;
    any_chp = any_chp || u.chp;
  }
  const int T = plan.steps;
  const std::vector<double> none(static_cast<std::size_t>(T), 0.0);

  auto gas_price = series(rng, T, 20.0, 35.0);
  g.nodes.push_back(Node{"gas_market", Market{"gas", gas_price, none, 0.2}});
  if (plan.second_market) {
    // Sometimes equally priced, so only the emission stage can separate the two.
    auto price = rng.chance(0.4) ? gas_price : series(rng, T, 30.0, 45.0);
    g.nodes.push_back(Node{"biogas_market", Market{"gas", price, none, round4(rng.uniform(0.0, 0.05))}});
  }
  if (any_chp) {
    auto buy = series(rng, T, 60.0, 90.0);
    std::vector<double> sell(buy.size());
    for (std::size_t t = 0; t < buy.size(); ++t) sell[t] = round4(buy[t] - rng.uniform(10.0, 30.0));
    g.nodes.push_back(Node{"power_market", Market{"power", buy, sell, 0.4}});
  }
  g.nodes.push_back(Node{"gas_hub", Balance{}});
  for (const auto& u : units) g.nodes.push_back(u.node);
  g.nodes.push_back(Node{"heat_bus", Balance{}});
  if (any_chp) g.nodes.push_back(Node{"power_bus", Balance{}});

  double storage_rate = 0.0;
  if (plan.storage) {
    Storage s;
    s.resource = "heat";
    s.loss = round4(rng.uniform(0.95, 1.0));
    s.load_eff = round4(rng.uniform(0.9, 1.0));
    s.unload_eff = round4(rng.uniform(0.9, 1.0));
    s.level_max = round4(rng.uniform(0.2, 0.6) * heat_total);
    s.initial_level = round4(rng.uniform(0.0, 1.0) * s.level_max);
    storage_rate = round4(0.3 * s.level_max);
    g.nodes.push_back(Node{"store", s});
  }

  std::vector<double> demand(static_cast<std::size_t>(T));
  double level = rng.uniform(0.25, 0.5);
  for (auto& d : demand) {
    d = round4(level * heat_total);
    level = std::clamp(level + rng.uniform(-0.08, 0.08), 0.1, 0.6);
  }
  g.nodes.push_back(Node{"heat_demand", Demand{"heat", demand}});

  auto arc = [&](std::string id, std::string tail, std::string head, std::string res, double upper) {
    g.arcs.push_back(Arc{std::move(id), std::move(tail), std::move(head), std::move(res), Bounds{0.0, round4(upper)}});
  };
  arc("gas_supply", "gas_market", "gas_hub", "gas", fuel_total);
  if (plan.second_market) arc("biogas_supply", "biogas_market", "gas_hub", "gas", 0.5 * fuel_total);
  for (const auto& u : units) {
    arc(u.id + "_fuel", "gas_hub", u.id, "gas", u.fuel_max);
    arc(u.id + "_heat", u.id, "heat_bus", "heat", u.heat_max);
    if (u.chp) arc(u.id + "_power", u.id, "power_bus", "power", u.power_max);
  }
  if (any_chp) arc("power_sale", "power_bus", "power_market", "power", power_total);
  if (plan.storage) {
    arc("store_load", "heat_bus", "store", "heat", storage_rate);
    arc("store_unload", "store", "heat_bus", "heat", storage_rate);
  }
  arc("delivery", "heat_bus", "heat_demand", "heat", heat_total + storage_rate);

  std::vector<std::pair<std::string, std::pair<std::string, std::string>>> wrappable;
  for (const auto& u : units)
    if (!u.chp) wrappable.push_back({u.id, {u.id + "_fuel", u.id + "_heat"}});
  if (plan.storage) wrappable.push_back({"store", {"store_load", "store_unload"}});
  for (std::size_t k = wrappable.size(); k > 1; --k)
    std::swap(wrappable[k - 1], wrappable[static_cast<std::size_t>(rng.integer(0, static_cast<int>(k) - 1))]);
  const int containers = std::min<int>(plan.containers, static_cast<int>(wrappable.size()));
  for (int c = 0; c < containers; ++c) {
    const auto& [member, boundary] = wrappable[static_cast<std::size_t>(c)];
    g.containers.push_back(Container{"site" + std::to_string(c), {member}, boundary.first, boundary.second});
  }
  return g;
}

}  // namespace

Curve random_curve(Rng& rng, int breakpoints, double in_max, double slope_lo, double slope_hi, bool concave) {
  std::vector<double> cuts(static_cast<std::size_t>(breakpoints - 2));
  for (auto& c : cuts) c = rng.uniform(0.15, 0.85);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> slopes(static_cast<std::size_t>(breakpoints - 1));
  for (auto& s : slopes) s = rng.uniform(slope_lo, slope_hi);
  if (concave) std::sort(slopes.rbegin(), slopes.rend());
  Eigen::VectorXd s(breakpoints), t(breakpoints);
  s(0) = 0.0;
  t(0) = 0.0;
  for (int k = 1; k < breakpoints; ++k) {
    s(k) = k + 1 < breakpoints ? cuts[static_cast<std::size_t>(k - 1)] * in_max : in_max;
    if (s(k) <= s(k - 1)) s(k) = s(k - 1) + 1e-3 * in_max;
    t(k) = t(k - 1) + (s(k) - s(k - 1)) * slopes[static_cast<std::size_t>(k - 1)];
  }
  return Curve(s, t);
}

NetworkGraph corpus_instance(std::uint64_t seed, CorpusShape* shape) {
  Rng rng(seed * 0x9E3779B97F4A7C15ULL + 0x51ED27ULL);
  Plan plan;
  const int unit_count = rng.integer(2, 6);
  const int chains = rng.integer(1, 2);
  static constexpr int kSteps[] = {4, 8, 12};
  plan.steps = kSteps[rng.integer(0, 2)];
  for (int i = 0; i < unit_count; ++i) plan.units.push_back({rng.chance(0.35), i < chains ? rng.integer(2, 3) : 1});
  plan.max_breakpoints = 3;
  plan.concave = true;
  plan.second_market = rng.chance(0.5);
  plan.storage = rng.chance(0.5);
  plan.containers = rng.integer(0, 2);
  NetworkGraph g = assemble(rng, plan, "corpus-" + std::to_string(seed));
  if (shape) {
    shape->units = unit_count;
    shape->chains = chains;
    shape->containers = static_cast<int>(g.containers.size());
    shape->storage = plan.storage;
    shape->steps = plan.steps;
  }
  return g;
}

NetworkGraph oracle_instance(std::uint64_t seed) {
  Rng rng(seed * 0xD1B54A32D192ED03ULL + 0xC0FFEEULL);
  Plan plan;
  // Binaries per step: one status per unit plus one per curve segment.
  for (;;) {
    plan = Plan{};
    plan.steps = rng.integer(1, 3);
    plan.max_breakpoints = rng.chance(0.3) ? 3 : 2;
    const int unit_count = rng.integer(1, 2);
    int per_step = 0;
    for (int i = 0; i < unit_count; ++i) {
      const bool chp = rng.chance(0.3);
      const int stages = rng.chance(0.3) ? 2 : 1;
      plan.units.push_back({chp, stages});
      per_step += 1 + (stages - 1) * (plan.max_breakpoints - 1) + (chp ? 2 : 1) * (plan.max_breakpoints - 1);
    }
    if (per_step * plan.steps <= 12) break;
  }
  plan.second_market = rng.chance(0.6);
  plan.storage = rng.chance(0.3);
  plan.containers = rng.integer(0, 1);
  return assemble(rng, plan, "oracle-" + std::to_string(seed));
}

NetworkGraph shuffled(const NetworkGraph& g, std::uint64_t seed) {
  Rng rng(seed);
  NetworkGraph out = g;
  auto shuffle = [&](auto& v) {
    for (std::size_t k = v.size(); k > 1; --k)
      std::swap(v[k - 1], v[static_cast<std::size_t>(rng.integer(0, static_cast<int>(k) - 1))]);
  };
  shuffle(out.nodes);
  shuffle(out.arcs);
  return out;
}

}  // namespace mesmix::testing
