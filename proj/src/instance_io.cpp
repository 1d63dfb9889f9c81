#include "mesmix/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mesmix/error.hpp"

namespace mesmix {

using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json curve_to_json(const Curve& c) {
  json src = json::array(), tgt = json::array();
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    src.push_back(c.source()[i]);
    tgt.push_back(c.target()[i]);
  }
  return {{"source", src}, {"target", tgt}};
}

json conversions_to_json(const std::vector<Conversion>& cs) {
  json out = json::array();
  for (const auto& c : cs) out.push_back({{"input", c.input}, {"output", c.output}, {"curve", curve_to_json(c.curve)}});
  return out;
}


/// Typed field access that reports the JSON path on failure.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

  Reader at(const char* key) const {
    if (!j_.is_object()) fail("expected an object");
    auto it = j_.find(key);
    if (it == j_.end()) throw InvalidInstance(path_ + "." + key + ": missing field");
    return Reader(*it, path_ + "." + key);
  }

  std::vector<Reader> items(const char* key) const {
    std::vector<Reader> out;
    if (!has(key)) return out;
    Reader arr = at(key);
    if (!arr.j_.is_array()) arr.fail("expected an array");
    for (std::size_t i = 0; i < arr.j_.size(); ++i)
      out.emplace_back(arr.j_[i], arr.path_ + "[" + std::to_string(i) + "]");
    return out;
  }

  std::string str(const char* key) const {
    Reader r = at(key);
    if (!r.j_.is_string()) r.fail("expected a string");
    return r.j_.get<std::string>();
  }
  std::string str_or(const char* key, const std::string& fallback) const { return has(key) ? str(key) : fallback; }

  double num(const char* key) const {
    Reader r = at(key);
    if (!r.j_.is_number()) r.fail("expected a number");
    return r.j_.get<double>();
  }
  double num_or(const char* key, double fallback) const { return has(key) ? num(key) : fallback; }
  // null stands for an unbounded value
  double num_or_inf(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    if (j_.at(key).is_null()) return kInf;
    return num(key);
  }

  int integer(const char* key) const {
    Reader r = at(key);
    if (!r.j_.is_number_integer()) r.fail("expected an integer");
    return r.j_.get<int>();
  }
  int integer_or(const char* key, int fallback) const { return has(key) ? integer(key) : fallback; }

  std::vector<double> numbers(const char* key) const {
    std::vector<double> out;
    for (const auto& item : items(key)) {
      if (!item.j_.is_number()) item.fail("expected a number");
      out.push_back(item.j_.get<double>());
    }
    return out;
  }

  std::vector<std::string> strings(const char* key) const {
    std::vector<std::string> out;
    for (const auto& item : items(key)) {
      if (!item.j_.is_string()) item.fail("expected a string");
      out.push_back(item.j_.get<std::string>());
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const { throw InvalidInstance(path_ + ": " + what); }

 private:
  const json& j_;
  std::string path_;
};

Curve read_curve(const Reader& r) {
  const auto s = r.numbers("source");
  const auto t = r.numbers("target");
  Curve::Vector src(static_cast<Eigen::Index>(s.size())), tgt(static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i < s.size(); ++i) src[static_cast<Eigen::Index>(i)] = s[i];
  for (std::size_t i = 0; i < t.size(); ++i) tgt[static_cast<Eigen::Index>(i)] = t[i];
  return Curve(src, tgt);
}

std::vector<Conversion> read_conversions(const Reader& r) {
  std::vector<Conversion> out;
  for (const auto& c : r.items("conversions")) out.push_back(Conversion{c.str("input"), c.str("output"), read_curve(c.at("curve"))});
  return out;
}

Node read_node(const Reader& r) {
  Node n;
  n.id = r.str("id");
  const std::string kind = r.str("kind");
  if (kind == "unit") {
    GeneratingUnit u;
    u.conversions = read_conversions(r);
    u.min_up_steps = r.integer_or("min_up_steps", 0);
    u.min_down_steps = r.integer_or("min_down_steps", 0);
    u.ramp_up = r.num_or_inf("ramp_up", kInf);
    u.ramp_down = r.num_or_inf("ramp_down", kInf);
    u.startup_cost = r.num_or("startup_cost", 0.0);
    u.initial_status = r.integer_or("initial_status", 0);
    for (const auto& s : r.items("stages")) u.stages.push_back(Stage{s.str("name"), read_conversions(s)});
    u.group = r.str_or("group", "");
    n.data = std::move(u);
  } else if (kind == "storage") {
    Storage s;
    s.resource = r.str("resource");
    s.loss = r.num_or("loss", 1.0);
    s.load_eff = r.num_or("load_eff", 1.0);
    s.unload_eff = r.num_or("unload_eff", 1.0);
    s.level_min = r.num_or("level_min", 0.0);
    s.level_max = r.num("level_max");
    s.initial_level = r.num_or("initial_level", 0.0);
    n.data = s;
  } else if (kind == "market") {
    Market m;
    m.resource = r.str("resource");
    m.buy_price = r.numbers("buy_price");
    m.sell_price = r.numbers("sell_price");
    m.emission_factor = r.num_or("emission_factor", 0.0);
    n.data = std::move(m);
  } else if (kind == "demand") {
    n.data = Demand{r.str("resource"), r.numbers("demand")};
  } else if (kind == "balance") {
    n.data = Balance{};
  } else if (kind == "objective") {
    n.data = ObjectiveNode{r.integer("objective_index"), r.integer_or("sign", 1)};
  } else {
    r.at("kind").fail("unknown node kind '" + kind + "'");
  }
  return n;
}

}  // namespace

json node_to_json(const Node& n) {
  json j{{"id", n.id}, {"kind", to_string(n.kind())}};
  switch (n.kind()) {
    case NodeKind::unit: {
      const auto& u = n.unit();
      j["conversions"] = conversions_to_json(u.conversions);
      j["min_up_steps"] = u.min_up_steps;
      j["min_down_steps"] = u.min_down_steps;
      j["ramp_up"] = number_or_null(u.ramp_up);
      j["ramp_down"] = number_or_null(u.ramp_down);
      j["startup_cost"] = u.startup_cost;
      j["initial_status"] = u.initial_status;
      if (!u.stages.empty()) {
        json stages = json::array();
        for (const auto& s : u.stages) stages.push_back({{"name", s.name}, {"conversions", conversions_to_json(s.conversions)}});
        j["stages"] = stages;
      }
      if (!u.group.empty()) j["group"] = u.group;
      break;
    }
    case NodeKind::storage: {
      const auto& s = n.storage();
      j["resource"] = s.resource;
      j["loss"] = s.loss;
      j["load_eff"] = s.load_eff;
      j["unload_eff"] = s.unload_eff;
      j["level_min"] = s.level_min;
      j["level_max"] = s.level_max;
      j["initial_level"] = s.initial_level;
      break;
    }
    case NodeKind::market: {
      const auto& m = n.market();
      j["resource"] = m.resource;
      j["buy_price"] = m.buy_price;
      j["sell_price"] = m.sell_price;
      j["emission_factor"] = m.emission_factor;
      break;
    }
    case NodeKind::demand:
      j["resource"] = n.demand().resource;
      j["demand"] = n.demand().demand;
      break;
    case NodeKind::balance: break;
    case NodeKind::objective:
      j["objective_index"] = n.objective().objective_index;
      j["sign"] = n.objective().sign;
      break;
  }
  return j;
}

json arc_to_json(const Arc& a) {
  return {{"id", a.id},
          {"tail", a.tail},
          {"head", a.head},
          {"resource", a.resource},
          {"lower", number_or_null(a.bounds.lower)},
          {"upper", number_or_null(a.bounds.upper)}};
}

json instance_to_json(const NetworkGraph& g) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = g.name;
  doc["time"] = {{"step_count", g.grid.step_count}, {"step_hours", g.grid.step_hours}};
  json resources = json::array();
  for (const auto& r : g.resources) resources.push_back({{"id", r.id}, {"kind", to_string(r.kind)}});
  doc["resources"] = resources;
  json nodes = json::array();
  for (const auto& n : g.nodes) nodes.push_back(node_to_json(n));
  doc["nodes"] = nodes;
  json arcs = json::array();
  for (const auto& a : g.arcs) arcs.push_back(arc_to_json(a));
  doc["arcs"] = arcs;
  json containers = json::array();
  for (const auto& c : g.containers)
    containers.push_back(
        {{"id", c.id}, {"members", c.members}, {"boundary_in", c.boundary_in}, {"boundary_out", c.boundary_out}});
  doc["containers"] = containers;
  return doc;
}

NetworkGraph instance_from_json(const json& doc) {
  Reader root(doc, "$");
  if (!doc.is_object()) root.fail("expected an object");
  const int version = root.integer("schema_version");
  if (version != kSchemaVersion) root.at("schema_version").fail("unsupported version " + std::to_string(version));
  NetworkGraph g;
  g.name = root.str_or("name", "");
  const Reader time = root.at("time");
  g.grid.step_count = time.integer("step_count");
  g.grid.step_hours = time.num_or("step_hours", 1.0);
  for (const auto& r : root.items("resources")) {
    const std::string kind = r.str("kind");
    const auto k = resource_kind_from_string(kind);
    if (!k) r.at("kind").fail("unknown resource kind '" + kind + "'");
    g.resources.push_back(Resource{r.str("id"), *k});
  }
  for (const auto& n : root.items("nodes")) g.nodes.push_back(read_node(n));
  for (const auto& a : root.items("arcs")) {
    Arc arc{a.str("id"), a.str("tail"), a.str("head"), a.str("resource"), {}};
    arc.bounds.lower = a.has("lower") && a.raw().at("lower").is_null() ? -kInf : a.num_or("lower", 0.0);
    arc.bounds.upper = a.num_or_inf("upper", kInf);
    g.arcs.push_back(std::move(arc));
  }
  for (const auto& c : root.items("containers"))
    g.containers.push_back(Container{c.str("id"), c.strings("members"), c.str("boundary_in"), c.str("boundary_out")});
  return g;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInstance("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInstance("cannot write " + path);
  out << text;
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

NetworkGraph load_instance(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InvalidInstance(path + ": " + e.what());
  }
  return instance_from_json(doc);
}

void save_instance(const NetworkGraph& g, const std::string& path) { write_text(path, dump_json(instance_to_json(g))); }

}  // namespace mesmix
