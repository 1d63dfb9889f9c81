#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mesmix/model_a.hpp"
#include "mesmix/network.hpp"

namespace mesmix {

enum class ReductionKind { FlattenContainer, DropInfoSubgraph, ContractBalance, MergeUnits };

const char* to_string(ReductionKind kind);

/// One graph rewrite. Arcs whose endpoints change are listed as removed and
/// re-added, so applying a step needs nothing but the step itself.
struct ReductionStep {
  ReductionKind kind = ReductionKind::ContractBalance;
  std::string subject;
  std::vector<std::string> removed_nodes;
  std::vector<std::string> removed_arcs;
  std::vector<Node> added_nodes;
  std::vector<Arc> added_arcs;
  int eliminated_curves = 0;
};

struct ModelBGraph {
  NetworkGraph base;
  std::map<std::string, std::vector<std::string>> merged_units;
  std::vector<ReductionStep> contraction_log;
  // Objective contributions with final signs, attached to surviving markets and groups.
  std::vector<ObjectiveTerm> objective_terms;
  int eliminated_curves = 0;
};

/// Removes a balance node with exactly one in-arc and one out-arc of the same resource.
std::pair<NetworkGraph, ReductionStep> contract_balance(const NetworkGraph& g, const std::string& v);

/// True when `v` may be contracted by contract_balance.
bool contractible(const NetworkGraph& g, const std::string& v);

/// Replaces the unit chain v -> w by one unit whose curves are the compositions.
std::pair<NetworkGraph, ReductionStep> merge_units(const NetworkGraph& g, const std::string& v, const std::string& w);

/// True when merge_units(g, v, w) succeeds.
bool mergeable(const NetworkGraph& g, const std::string& v, const std::string& w);

/// Applies one logged step.
NetworkGraph apply_step(const NetworkGraph& g, const ReductionStep& step);

/// Applies a whole log in order.
NetworkGraph replay(NetworkGraph g, const std::vector<ReductionStep>& log);

/// Flat representation derived from the hierarchical one.
ModelBGraph flatten(const ModelAGraph& ma);

/// Wraps an already flat graph without adding any hierarchy.
ModelAGraph lift_flat(const NetworkGraph& g);

/// Same nodes (by id and data) and same arcs (by id, endpoints, resource, bounds),
/// ignoring order.
bool same_graph(const NetworkGraph& a, const NetworkGraph& b);

}  // namespace mesmix
