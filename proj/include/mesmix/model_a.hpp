#pragma once

#include <map>
#include <string>
#include <vector>

#include "mesmix/network.hpp"

namespace mesmix {

enum class PortDirection { in, out };

struct Port {
  std::string owner;
  PortDirection direction = PortDirection::in;
  std::string resource;
  int slot = 0;
  std::string label;
};

/// Port indices an arc is attached to.
struct PortBinding {
  std::string arc;
  int out_port = -1;
  int in_port = -1;
};

enum class TermKind { purchase, sale, emission, startup, chp_heat };

const char* to_string(TermKind kind);

/// One linear contribution to an objective: coefficient[t] times the quantity
/// named by (kind, subject) at step t.
///
/// purchase/sale/emission refer to a market's bought or sold amount, startup to
/// a commitment group's startup indicator and chp_heat to the external heat
/// output of a commitment group.
struct ObjectiveTerm {
  int objective = 1;
  TermKind kind = TermKind::purchase;
  std::string subject;
  std::vector<double> coefficient;
};

struct InfoSubgraph {
  int objective = 1;
  std::vector<std::string> nodes;
  std::vector<std::string> arcs;
};

/// Elements added around one container.
struct ContainerFrame {
  std::string container;
  std::string in_node;
  std::string out_node;
  std::string outer_in_arc;   // original entering arc, now ending at in_node
  std::string inner_in_arc;   // in_node -> member
  std::string inner_out_arc;  // member -> out_node
  std::string outer_out_arc;  // original leaving arc, now starting at out_node
};

struct ModelAGraph {
  NetworkGraph base;
  std::vector<Port> ports;
  std::vector<PortBinding> port_bindings;  // parallel to base.arcs
  std::vector<InfoSubgraph> info_subgraphs;  // objectives 1..3 in order
  // Information arcs leaving a source node, with the quantities they carry.
  // Coefficients are the raw information values; the objective node applies its sign.
  std::map<std::string, std::vector<ObjectiveTerm>> info_sources;
  std::vector<ContainerFrame> frames;
  // Original unit id -> stage node ids, for units given as a chain.
  std::map<std::string, std::vector<std::string>> stage_nodes;
  int subcomponents = 0;
};

/// Hierarchical representation of a validated instance.
///
/// Stages become chained unit nodes sharing one commitment group, every
/// container receives an entry and an exit balance node, and each objective
/// gets an objective node fed by per-step information arcs.
ModelAGraph build_model_a(const NetworkGraph& g);

struct FlowDescriptor {
  std::string arc;
  std::string node;
  PortDirection direction = PortDirection::out;
  int step = 0;
};

/// Two port flow descriptors per arc and time step, out-port first.
std::vector<FlowDescriptor> enumerate_port_variables(const ModelAGraph& ma);

/// Information resource id carrying objective `k`.
std::string info_resource_id(int objective);

/// Objective node id for objective `k`.
std::string objective_node_id(int objective);

}  // namespace mesmix
