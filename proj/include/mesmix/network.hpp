#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mesmix/pwl.hpp"

namespace mesmix {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ResourceKind { fuel, heat, power, information };

const char* to_string(ResourceKind kind);
std::optional<ResourceKind> resource_kind_from_string(const std::string& s);

struct Resource {
  std::string id;
  ResourceKind kind = ResourceKind::fuel;

  bool operator==(const Resource&) const = default;
};

struct TimeGrid {
  int step_count = 1;
  double step_hours = 1.0;

  bool operator==(const TimeGrid&) const = default;
};

struct Bounds {
  double lower = 0.0;
  double upper = kInf;

  bool operator==(const Bounds&) const = default;
};

/// One input resource mapped to one output resource.
struct Conversion {
  std::string input;
  std::string output;
  Curve curve;

  bool operator==(const Conversion&) const = default;
};

/// A named conversion stage of a unit that is modelled as a chain of components.
struct Stage {
  std::string name;
  std::vector<Conversion> conversions;

  bool operator==(const Stage&) const = default;
};

struct GeneratingUnit {
  std::vector<Conversion> conversions;
  int min_up_steps = 0;
  int min_down_steps = 0;
  double ramp_up = kInf;
  double ramp_down = kInf;
  double startup_cost = 0.0;
  int initial_status = 0;
  // Non-empty for units described by their internal chain. The first stage
  // consumes the unit's input, the last produces its outputs; every other
  // stage has exactly one conversion feeding the next stage.
  std::vector<Stage> stages;
  // Commitment group. Empty means the unit is its own group.
  std::string group;

  bool operator==(const GeneratingUnit&) const = default;
};

struct Storage {
  std::string resource;
  double loss = 1.0;
  double load_eff = 1.0;
  double unload_eff = 1.0;
  double level_min = 0.0;
  double level_max = 0.0;
  double initial_level = 0.0;

  bool operator==(const Storage&) const = default;
};

struct Market {
  std::string resource;
  std::vector<double> buy_price;
  std::vector<double> sell_price;
  double emission_factor = 0.0;

  bool operator==(const Market&) const = default;
};

struct Demand {
  std::string resource;
  std::vector<double> demand;

  bool operator==(const Demand&) const = default;
};

struct Balance {
  bool operator==(const Balance&) const = default;
};

struct ObjectiveNode {
  int objective_index = 1;
  // +1 when the objective sums incoming information, -1 when it is the negated sum.
  int sign = 1;

  bool operator==(const ObjectiveNode&) const = default;
};

using NodeData = std::variant<GeneratingUnit, Storage, Market, Demand, Balance, ObjectiveNode>;

enum class NodeKind { unit, storage, market, demand, balance, objective };

const char* to_string(NodeKind kind);

struct Node {
  std::string id;
  NodeData data;

  NodeKind kind() const { return static_cast<NodeKind>(data.index()); }
  bool is(NodeKind k) const { return kind() == k; }
  const GeneratingUnit& unit() const { return std::get<GeneratingUnit>(data); }
  GeneratingUnit& unit() { return std::get<GeneratingUnit>(data); }
  const Storage& storage() const { return std::get<Storage>(data); }
  const Market& market() const { return std::get<Market>(data); }
  const Demand& demand() const { return std::get<Demand>(data); }
  const ObjectiveNode& objective() const { return std::get<ObjectiveNode>(data); }

  bool operator==(const Node&) const = default;
};

struct Arc {
  std::string id;
  std::string tail;
  std::string head;
  std::string resource;
  Bounds bounds;

  bool operator==(const Arc&) const = default;
};

struct Container {
  std::string id;
  std::vector<std::string> members;
  std::string boundary_in;   // arc id entering the container
  std::string boundary_out;  // arc id leaving the container

  bool operator==(const Container&) const = default;
};

struct NetworkGraph {
  std::string name;
  TimeGrid grid;
  std::vector<Resource> resources;
  std::vector<Node> nodes;
  std::vector<Arc> arcs;
  std::vector<Container> containers;

  const Node* find_node(const std::string& id) const;
  const Arc* find_arc(const std::string& id) const;
  const Resource* find_resource(const std::string& id) const;
};

/// Commitment group of a unit node (its own id when no group is declared).
std::string group_of(const Node& node);

/// Resource consumed by a unit; empty when the unit has no conversions.
std::string unit_input(const GeneratingUnit& u);

/// Conversions seen from outside a unit: its own list or the chain endpoints.
std::vector<Conversion> external_conversions(const GeneratingUnit& u);

/// Adjacency by node id, arcs listed in graph order.
struct Incidence {
  std::map<std::string, std::vector<const Arc*>> in;
  std::map<std::string, std::vector<const Arc*>> out;

  explicit Incidence(const NetworkGraph& g);
  const std::vector<const Arc*>& in_arcs(const std::string& node) const;
  const std::vector<const Arc*>& out_arcs(const std::string& node) const;
};

struct Violation {
  std::string code;
  std::string subject;
  std::string detail;

  friend bool operator==(const Violation& a, const Violation& b) {
    return a.code == b.code && a.subject == b.subject && a.detail == b.detail;
  }
  friend bool operator<(const Violation& a, const Violation& b) {
    if (a.code != b.code) return a.code < b.code;
    if (a.subject != b.subject) return a.subject < b.subject;
    return a.detail < b.detail;
  }
};

/// All invariant violations of an instance graph, sorted.
///
/// Information resources and objective nodes are only accepted when
/// `allow_information` is set, which is how built hierarchical graphs are checked.
std::vector<Violation> validate_instance(const NetworkGraph& g, bool allow_information = false);

}  // namespace mesmix
