#include "mesmix/model_b.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace mesmix {

const char* to_string(ReductionKind kind) {
  switch (kind) {
    case ReductionKind::FlattenContainer: return "FlattenContainer";
    case ReductionKind::DropInfoSubgraph: return "DropInfoSubgraph";
    case ReductionKind::ContractBalance: return "ContractBalance";
    case ReductionKind::MergeUnits: return "MergeUnits";
  }
  return "ContractBalance";
}

NetworkGraph apply_step(const NetworkGraph& g, const ReductionStep& step) {
  const std::set<std::string> drop_nodes(step.removed_nodes.begin(), step.removed_nodes.end());
  const std::set<std::string> drop_arcs(step.removed_arcs.begin(), step.removed_arcs.end());
  NetworkGraph out;
  out.name = g.name;
  out.grid = g.grid;
  out.resources = g.resources;

  bool placed = false;
  for (const auto& n : g.nodes) {
    if (!drop_nodes.count(n.id)) {
      out.nodes.push_back(n);
    } else if (!placed) {
      out.nodes.insert(out.nodes.end(), step.added_nodes.begin(), step.added_nodes.end());
      placed = true;
    }
  }
  if (!placed) out.nodes.insert(out.nodes.end(), step.added_nodes.begin(), step.added_nodes.end());

  placed = false;
  for (const auto& a : g.arcs) {
    if (!drop_arcs.count(a.id)) {
      out.arcs.push_back(a);
    } else if (!placed) {
      out.arcs.insert(out.arcs.end(), step.added_arcs.begin(), step.added_arcs.end());
      placed = true;
    }
  }
  if (!placed) out.arcs.insert(out.arcs.end(), step.added_arcs.begin(), step.added_arcs.end());

  for (const auto& c : g.containers)
    if (!(step.kind == ReductionKind::FlattenContainer && c.id == step.subject)) out.containers.push_back(c);
  if (step.kind == ReductionKind::DropInfoSubgraph)
    out.resources.erase(std::remove_if(out.resources.begin(), out.resources.end(),
                                       [&](const Resource& r) { return r.id == step.subject; }),
                        out.resources.end());
  return out;
}

NetworkGraph replay(NetworkGraph g, const std::vector<ReductionStep>& log) {
  for (const auto& step : log) g = apply_step(g, step);
  return g;
}

namespace {

Bounds intersect(const Bounds& a, const Bounds& b) {
  return Bounds{std::max(a.lower, b.lower), std::min(a.upper, b.upper)};
}

std::string fresh_arc_id(const NetworkGraph& g, const std::string& base, const std::set<std::string>& released) {
  auto taken = [&](const std::string& id) { return g.find_arc(id) && !released.count(id); };
  if (!taken(base)) return base;
  for (int k = 2;; ++k) {
    std::string id = base + "_" + std::to_string(k);
    if (!taken(id)) return id;
  }
}

std::string contract_blocker(const NetworkGraph& g, const std::string& v) {
  const Node* n = g.find_node(v);
  if (!n) return "no node " + v;
  if (!n->is(NodeKind::balance)) return v + " is not a balance node";
  Incidence inc(g);
  const auto& ins = inc.in_arcs(v);
  const auto& outs = inc.out_arcs(v);
  if (ins.size() != 1 || outs.size() != 1) return v + " does not have exactly one in-arc and one out-arc";
  if (ins.front()->resource != outs.front()->resource) return v + " joins different resources";
  if (ins.front()->tail == outs.front()->head) return v + " would leave a self-loop";
  return {};
}

struct MergePlan {
  std::string why_not;
  Node merged;
  std::vector<const Arc*> ins;
  const Arc* link = nullptr;
  std::vector<const Arc*> outs;
};

MergePlan plan_merge(const NetworkGraph& g, const std::string& v, const std::string& w) {
  MergePlan plan;
  const Node* nv = g.find_node(v);
  const Node* nw = g.find_node(w);
  if (!nv || !nw || v == w) {
    plan.why_not = "merge needs two distinct existing nodes";
    return plan;
  }
  if (!nv->is(NodeKind::unit) || !nw->is(NodeKind::unit)) {
    plan.why_not = "both nodes must be generating units";
    return plan;
  }
  const auto& uv = nv->unit();
  const auto& uw = nw->unit();
  if (!uv.stages.empty() || !uw.stages.empty()) {
    plan.why_not = "units must not carry unexpanded stages";
    return plan;
  }
  Incidence inc(g);
  const auto& v_out = inc.out_arcs(v);
  const auto& w_in = inc.in_arcs(w);
  if (v_out.size() != 1 || v_out.front()->head != w) {
    plan.why_not = v + " must feed only " + w;
    return plan;
  }
  if (w_in.size() != 1) {
    plan.why_not = w + " has an input besides " + v;
    return plan;
  }
  if (uv.conversions.size() != 1) {
    plan.why_not = v + " must have a single conversion";
    return plan;
  }
  const Conversion& phi = uv.conversions.front();
  const Arc* link = v_out.front();
  if (link->resource != phi.output) {
    plan.why_not = "link resource differs from the output of " + v;
    return plan;
  }
  for (const auto& c : uw.conversions)
    if (c.input != phi.output) {
      plan.why_not = w + " consumes a resource " + v + " does not produce";
      return plan;
    }
  if (link->bounds.lower > 0.0 || link->bounds.upper < phi.curve.target_max()) {
    plan.why_not = "bounds on the link between " + v + " and " + w + " can bind";
    return plan;
  }

  GeneratingUnit merged;
  try {
    for (const auto& c : uw.conversions)
      merged.conversions.push_back(Conversion{phi.input, c.output, compose(phi.curve, c.curve)});
  } catch (const DomainMismatch& e) {
    plan.why_not = e.what();
    return plan;
  } catch (const InvalidCurve& e) {
    plan.why_not = e.what();
    return plan;
  }

  const std::string gv = group_of(*nv);
  const std::string gw = group_of(*nw);
  std::string id;
  if (gv == gw) {
    merged.min_up_steps = uv.min_up_steps;
    merged.min_down_steps = uv.min_down_steps;
    merged.ramp_up = uw.ramp_up;
    merged.ramp_down = uw.ramp_down;
    merged.startup_cost = uv.startup_cost;
    merged.initial_status = uv.initial_status;
    merged.group = gv;
    id = gv;
  } else {
    double slope = 0.0;
    for (const auto& c : uw.conversions) slope = std::max(slope, max_slope(c.curve));
    merged.min_up_steps = std::max(uv.min_up_steps, uw.min_up_steps);
    merged.min_down_steps = std::max(uv.min_down_steps, uw.min_down_steps);
    merged.ramp_up = std::min(uw.ramp_up, slope * uv.ramp_up);
    merged.ramp_down = std::min(uw.ramp_down, slope * uv.ramp_down);
    merged.startup_cost = uv.startup_cost + uw.startup_cost;
    merged.initial_status = std::max(uv.initial_status, uw.initial_status);
    id = v + "_" + w;
  }
  if (const Node* clash = g.find_node(id); clash && id != v && id != w) {
    plan.why_not = "merged id " + id + " is taken";
    return plan;
  }
  if (merged.group == id) merged.group.clear();
  plan.merged = Node{id, merged};
  plan.ins = inc.in_arcs(v);
  plan.link = link;
  plan.outs = inc.out_arcs(w);
  return plan;
}

}  // namespace

bool contractible(const NetworkGraph& g, const std::string& v) { return contract_blocker(g, v).empty(); }

std::pair<NetworkGraph, ReductionStep> contract_balance(const NetworkGraph& g, const std::string& v) {
  if (auto why = contract_blocker(g, v); !why.empty()) throw NotContractible(why);
  Incidence inc(g);
  const Arc* in = inc.in_arcs(v).front();
  const Arc* out = inc.out_arcs(v).front();
  ReductionStep step;
  step.kind = ReductionKind::ContractBalance;
  step.subject = v;
  step.removed_nodes = {v};
  step.removed_arcs = {in->id, out->id};
  const std::set<std::string> released{in->id, out->id};
  step.added_arcs.push_back(Arc{fresh_arc_id(g, in->tail + "_" + out->head, released), in->tail, out->head,
                                in->resource, intersect(in->bounds, out->bounds)});
  return {apply_step(g, step), step};
}

bool mergeable(const NetworkGraph& g, const std::string& v, const std::string& w) {
  return plan_merge(g, v, w).why_not.empty();
}

std::pair<NetworkGraph, ReductionStep> merge_units(const NetworkGraph& g, const std::string& v, const std::string& w) {
  MergePlan plan = plan_merge(g, v, w);
  if (!plan.why_not.empty()) throw NotMergeable(plan.why_not);
  ReductionStep step;
  step.kind = ReductionKind::MergeUnits;
  step.subject = plan.merged.id;
  step.removed_nodes = {v, w};
  step.eliminated_curves = static_cast<int>(g.find_node(v)->unit().conversions.size() +
                                            g.find_node(w)->unit().conversions.size() -
                                            plan.merged.unit().conversions.size());
  for (const Arc* a : plan.ins) {
    step.removed_arcs.push_back(a->id);
    Arc moved = *a;
    moved.head = plan.merged.id;
    step.added_arcs.push_back(std::move(moved));
  }
  step.removed_arcs.push_back(plan.link->id);
  for (const Arc* a : plan.outs) {
    step.removed_arcs.push_back(a->id);
    Arc moved = *a;
    moved.tail = plan.merged.id;
    step.added_arcs.push_back(std::move(moved));
  }
  step.added_nodes.push_back(std::move(plan.merged));
  return {apply_step(g, step), step};
}

namespace {

/// Kahn order, smallest id first among ready nodes; nodes on cycles follow in id order.
std::vector<std::string> topological_order(const NetworkGraph& g) {
  std::map<std::string, int> indegree;
  for (const auto& n : g.nodes) indegree[n.id] = 0;
  for (const auto& a : g.arcs) ++indegree[a.head];
  Incidence inc(g);
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [id, d] : indegree)
    if (d == 0) ready.push(id);
  std::vector<std::string> order;
  std::set<std::string> done;
  while (!ready.empty()) {
    std::string v = ready.top();
    ready.pop();
    order.push_back(v);
    done.insert(v);
    for (const Arc* a : inc.out_arcs(v))
      if (--indegree[a->head] == 0) ready.push(a->head);
  }
  for (const auto& [id, d] : indegree)
    if (!done.count(id)) order.push_back(id);
  return order;
}

}  // namespace

ModelBGraph flatten(const ModelAGraph& ma) {
  ModelBGraph mb;
  NetworkGraph g = ma.base;
  auto record = [&](NetworkGraph next, ReductionStep step) {
    g = std::move(next);
    mb.eliminated_curves += step.eliminated_curves;
    mb.contraction_log.push_back(std::move(step));
  };

  for (auto it = ma.frames.rbegin(); it != ma.frames.rend(); ++it) {
    const Arc* outer_in = g.find_arc(it->outer_in_arc);
    const Arc* inner_in = g.find_arc(it->inner_in_arc);
    const Arc* inner_out = g.find_arc(it->inner_out_arc);
    const Arc* outer_out = g.find_arc(it->outer_out_arc);
    ReductionStep step;
    step.kind = ReductionKind::FlattenContainer;
    step.subject = it->container;
    step.removed_nodes = {it->in_node, it->out_node};
    step.removed_arcs = {outer_in->id, inner_in->id, inner_out->id, outer_out->id};
    step.added_arcs.push_back(Arc{outer_in->id, outer_in->tail, inner_in->head, outer_in->resource,
                                  intersect(outer_in->bounds, inner_in->bounds)});
    step.added_arcs.push_back(Arc{outer_out->id, inner_out->tail, outer_out->head, outer_out->resource,
                                  intersect(inner_out->bounds, outer_out->bounds)});
    NetworkGraph next = apply_step(g, step);
    record(std::move(next), std::move(step));
  }

  for (const auto& sub : ma.info_subgraphs) {
    int sign = 1;
    if (const Node* obj = g.find_node(objective_node_id(sub.objective)); obj && obj->is(NodeKind::objective))
      sign = obj->objective().sign;
    for (const auto& arc : sub.arcs) {
      auto it = ma.info_sources.find(arc);
      if (it == ma.info_sources.end()) continue;
      for (ObjectiveTerm term : it->second) {
        for (double& c : term.coefficient) c *= sign;
        mb.objective_terms.push_back(std::move(term));
      }
    }
    ReductionStep step;
    step.kind = ReductionKind::DropInfoSubgraph;
    step.subject = info_resource_id(sub.objective);
    step.removed_nodes = sub.nodes;
    step.removed_arcs = sub.arcs;
    NetworkGraph next = apply_step(g, step);
    record(std::move(next), std::move(step));
  }

  for (;;) {
    std::vector<std::string> ids;
    for (const auto& n : g.nodes)
      if (n.is(NodeKind::balance)) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    auto hit = std::find_if(ids.begin(), ids.end(), [&](const std::string& v) { return contractible(g, v); });
    if (hit == ids.end()) break;
    auto [next, step] = contract_balance(g, *hit);
    record(std::move(next), std::move(step));
  }

  for (bool progress = true; progress;) {
    progress = false;
    Incidence inc(g);
    for (const auto& v : topological_order(g)) {
      const Node* nv = g.find_node(v);
      if (!nv || !nv->is(NodeKind::unit)) continue;
      const auto& outs = inc.out_arcs(v);
      if (outs.size() != 1) continue;
      const std::string w = outs.front()->head;
      if (!mergeable(g, v, w)) continue;
      const std::string gv = group_of(*nv);
      const std::string gw = group_of(*g.find_node(w));
      auto [next, step] = merge_units(g, v, w);
      const std::string merged = step.subject;
      const std::string gm = group_of(*next.find_node(merged));

      std::vector<std::string> origin;
      for (const auto& part : {v, w}) {
        auto it = mb.merged_units.find(part);
        if (it != mb.merged_units.end()) {
          origin.insert(origin.end(), it->second.begin(), it->second.end());
          mb.merged_units.erase(it);
        } else {
          origin.push_back(part);
        }
      }
      mb.merged_units[merged] = std::move(origin);
      for (auto& term : mb.objective_terms)
        if ((term.kind == TermKind::startup || term.kind == TermKind::chp_heat) &&
            (term.subject == gv || term.subject == gw))
          term.subject = gm;
      record(std::move(next), std::move(step));
      progress = true;
      break;
    }
  }

  mb.base = std::move(g);
  return mb;
}

ModelAGraph lift_flat(const NetworkGraph& g) {
  ModelAGraph ma;
  ma.base = g;
  return ma;
}

bool same_graph(const NetworkGraph& a, const NetworkGraph& b) {
  auto by_id = [](const auto& x, const auto& y) { return x.id < y.id; };
  auto nodes_a = a.nodes, nodes_b = b.nodes;
  auto arcs_a = a.arcs, arcs_b = b.arcs;
  auto res_a = a.resources, res_b = b.resources;
  auto con_a = a.containers, con_b = b.containers;
  std::sort(nodes_a.begin(), nodes_a.end(), by_id);
  std::sort(nodes_b.begin(), nodes_b.end(), by_id);
  std::sort(arcs_a.begin(), arcs_a.end(), by_id);
  std::sort(arcs_b.begin(), arcs_b.end(), by_id);
  std::sort(res_a.begin(), res_a.end(), by_id);
  std::sort(res_b.begin(), res_b.end(), by_id);
  std::sort(con_a.begin(), con_a.end(), by_id);
  std::sort(con_b.begin(), con_b.end(), by_id);
  return a.grid == b.grid && nodes_a == nodes_b && arcs_a == arcs_b && res_a == res_b && con_a == con_b;
}

}  // namespace mesmix
