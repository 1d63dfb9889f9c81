#include "mesmix/model_a.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <tuple>

namespace mesmix {

const char* to_string(TermKind kind) {
  switch (kind) {
    case TermKind::purchase: return "purchase";
    case TermKind::sale: return "sale";
    case TermKind::emission: return "emission";
    case TermKind::startup: return "startup";
    case TermKind::chp_heat: return "chp_heat";
  }
  return "purchase";
}

std::string info_resource_id(int objective) {
  switch (objective) {
    case 1: return "info_cost";
    case 2: return "info_emission";
    default: return "info_chp_heat";
  }
}

std::string objective_node_id(int objective) { return "objective_" + std::to_string(objective); }

namespace {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

Range scaled(const std::vector<double>& coef, double qty_hi) {
  Range r{kInf, -kInf};
  for (double c : coef) {
    r.lo = std::min({r.lo, 0.0, c * qty_hi});
    r.hi = std::max({r.hi, 0.0, c * qty_hi});
  }
  if (coef.empty()) r = {0.0, 0.0};
  return r;
}

double sum_upper(const std::vector<const Arc*>& arcs) {
  double s = 0.0;
  for (const Arc* a : arcs) s += a->bounds.upper;
  return s;
}

bool any_nonzero(const std::vector<double>& v) {
  return std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; });
}

void require_fresh(const NetworkGraph& g, const std::string& id) {
  if (g.find_node(id) || g.find_arc(id))
    throw InvalidInstance("generated id collides with an existing one: " + id);
}

Arc* arc_by_id(NetworkGraph& g, const std::string& id) {
  for (auto& a : g.arcs)
    if (a.id == id) return &a;
  return nullptr;
}

/// Replaces every unit declared as a stage chain by its chained stage nodes.
void expand_stages(NetworkGraph& g, ModelAGraph& ma) {
  std::vector<Node> nodes;
  std::vector<Arc> links;
  std::map<std::string, std::pair<std::string, std::string>> endpoints;  // unit -> (first, last)
  for (const auto& n : g.nodes) {
    if (!n.is(NodeKind::unit) || n.unit().stages.empty()) {
      nodes.push_back(n);
      continue;
    }
    const auto& u = n.unit();
    const std::string group = group_of(n);
    std::vector<std::string> ids;
    for (std::size_t k = 0; k < u.stages.size(); ++k) {
      GeneratingUnit st = u;
      st.stages.clear();
      st.conversions = u.stages[k].conversions;
      st.group = group;
      const std::string id = n.id + "." + u.stages[k].name;
      ids.push_back(id);
      nodes.push_back(Node{id, st});
      if (k > 0) {
        const auto& prev = u.stages[k - 1].conversions.front();
        links.push_back(Arc{n.id + ".link" + std::to_string(k), ids[k - 1], id, prev.output,
                            Bounds{0.0, prev.curve.target_max()}});
      }
    }
    ma.subcomponents += static_cast<int>(u.stages.size()) - 1;
    endpoints[n.id] = {ids.front(), ids.back()};
    ma.stage_nodes[n.id] = ids;
  }
  for (auto& a : g.arcs) {
    if (auto it = endpoints.find(a.head); it != endpoints.end()) a.head = it->second.first;
    if (auto it = endpoints.find(a.tail); it != endpoints.end()) a.tail = it->second.second;
  }
  for (auto& c : g.containers) {
    std::vector<std::string> members;
    for (const auto& m : c.members) {
      if (auto it = ma.stage_nodes.find(m); it != ma.stage_nodes.end())
        members.insert(members.end(), it->second.begin(), it->second.end());
      else
        members.push_back(m);
    }
    c.members = std::move(members);
  }
  g.nodes = std::move(nodes);
  for (auto& l : links) {
    require_fresh(g, l.id);
    g.arcs.push_back(std::move(l));
  }
}

std::string kind_of(const NetworkGraph& g, const std::string& resource) {
  const auto* r = g.find_resource(resource);
  return r ? to_string(r->kind) : std::string();
}

void check_templates(const NetworkGraph& g) {
  Incidence inc(g);
  for (const auto& n : g.nodes) {
    const auto& ins = inc.in_arcs(n.id);
    const auto& outs = inc.out_arcs(n.id);
    auto fail = [&](const std::string& why) { throw TemplateMismatch(n.id + ": " + why); };
    switch (n.kind()) {
      case NodeKind::unit: {
        const auto& convs = n.unit().conversions;
        const std::string input = convs.front().input;
        if (ins.size() != 1 || ins.front()->resource != input) fail("needs exactly one " + input + " input arc");
        if (outs.size() != convs.size()) fail("needs exactly one arc per output port");
        for (const auto& c : convs) {
          auto hits = std::count_if(outs.begin(), outs.end(),
                                    [&](const Arc* a) { return a->resource == c.output; });
          if (hits != 1) fail("needs exactly one " + c.output + " output arc");
        }
        break;
      }
      case NodeKind::storage: {
        const auto& r = n.storage().resource;
        if (ins.size() != 1 || outs.size() != 1 || ins.front()->resource != r || outs.front()->resource != r)
          fail("storage needs one loading and one unloading arc of " + r);
        break;
      }
      case NodeKind::market:
        for (const auto* a : ins)
          if (a->resource != n.market().resource) fail("market arc of foreign resource " + a->id);
        for (const auto* a : outs)
          if (a->resource != n.market().resource) fail("market arc of foreign resource " + a->id);
        break;
      case NodeKind::demand:
        if (!outs.empty()) fail("demand node cannot have outgoing arcs");
        for (const auto* a : ins)
          if (a->resource != n.demand().resource) fail("demand arc of foreign resource " + a->id);
        break;
      case NodeKind::balance:
      case NodeKind::objective: break;
    }
  }
}

void add_container_frames(NetworkGraph& g, ModelAGraph& ma) {
  for (auto& c : g.containers) {
    ContainerFrame f;
    f.container = c.id;
    f.in_node = c.id + "_in";
    f.out_node = c.id + "_out";
    f.outer_in_arc = c.boundary_in;
    f.outer_out_arc = c.boundary_out;
    f.inner_in_arc = c.id + "_in_link";
    f.inner_out_arc = c.id + "_out_link";
    for (const auto& id : {f.in_node, f.out_node, f.inner_in_arc, f.inner_out_arc}) require_fresh(g, id);
    g.nodes.push_back(Node{f.in_node, Balance{}});
    g.nodes.push_back(Node{f.out_node, Balance{}});

    Arc* in = arc_by_id(g, c.boundary_in);
    Arc inner_in{f.inner_in_arc, f.in_node, in->head, in->resource, in->bounds};
    in->head = f.in_node;
    Arc* out = arc_by_id(g, c.boundary_out);
    Arc inner_out{f.inner_out_arc, out->tail, f.out_node, out->resource, out->bounds};
    out->tail = f.out_node;
    g.arcs.push_back(std::move(inner_in));
    g.arcs.push_back(std::move(inner_out));
    c.boundary_in = f.inner_in_arc;
    c.boundary_out = f.inner_out_arc;
    ma.frames.push_back(std::move(f));
  }
}

struct Source {
  std::string node;
  std::vector<ObjectiveTerm> terms;
  Range range;
};

/// External output arcs of a commitment group.
std::vector<const Arc*> group_outputs(const NetworkGraph& g, const Incidence& inc, const std::string& group) {
  std::set<std::string> members;
  for (const auto& n : g.nodes)
    if (n.is(NodeKind::unit) && group_of(n) == group) members.insert(n.id);
  std::vector<const Arc*> out;
  for (const auto& n : g.nodes) {
    if (!members.count(n.id)) continue;
    for (const Arc* a : inc.out_arcs(n.id))
      if (!members.count(a->head)) out.push_back(a);
  }
  return out;
}

void add_information(NetworkGraph& g, ModelAGraph& ma) {
  const int T = g.grid.step_count;
  Incidence inc(g);
  std::array<std::vector<Source>, 3> sources;

  for (const auto& n : g.nodes) {
    if (!n.is(NodeKind::market)) continue;
    const auto& m = n.market();
    const double buy_cap = sum_upper(inc.out_arcs(n.id));
    const double sell_cap = sum_upper(inc.in_arcs(n.id));
    Source cost{n.id, {}, {0.0, 0.0}};
    if (!inc.out_arcs(n.id).empty() && any_nonzero(m.buy_price)) {
      cost.terms.push_back(ObjectiveTerm{1, TermKind::purchase, n.id, m.buy_price});
      Range r = scaled(m.buy_price, buy_cap);
      cost.range.lo += r.lo;
      cost.range.hi += r.hi;
    }
    if (!inc.in_arcs(n.id).empty() && any_nonzero(m.sell_price)) {
      std::vector<double> c(m.sell_price.size());
      std::transform(m.sell_price.begin(), m.sell_price.end(), c.begin(), [](double v) { return -v; });
      Range r = scaled(c, sell_cap);
      cost.terms.push_back(ObjectiveTerm{1, TermKind::sale, n.id, std::move(c)});
      cost.range.lo += r.lo;
      cost.range.hi += r.hi;
    }
    if (!cost.terms.empty()) sources[0].push_back(std::move(cost));
    if (!inc.out_arcs(n.id).empty() && m.emission_factor != 0.0) {
      std::vector<double> c(static_cast<std::size_t>(T), m.emission_factor);
      sources[1].push_back(Source{n.id, {ObjectiveTerm{2, TermKind::emission, n.id, c}}, scaled(c, buy_cap)});
    }
  }

  std::set<std::string> seen_groups;
  for (const auto& n : g.nodes) {
    if (!n.is(NodeKind::unit)) continue;
    const std::string group = group_of(n);
    if (!seen_groups.insert(group).second) continue;
    const auto& u = n.unit();
    if (u.startup_cost > 0.0) {
      std::vector<double> c(static_cast<std::size_t>(T), u.startup_cost);
      sources[0].push_back(Source{n.id, {ObjectiveTerm{1, TermKind::startup, group, c}}, scaled(c, 1.0)});
    }
    auto outs = group_outputs(g, inc, group);
    std::vector<const Arc*> heat;
    bool power = false;
    for (const Arc* a : outs) {
      const std::string k = kind_of(g, a->resource);
      if (k == "heat") heat.push_back(a);
      if (k == "power") power = true;
    }
    if (!heat.empty() && power) {
      std::vector<double> c(static_cast<std::size_t>(T), 1.0);
      sources[2].push_back(
          Source{heat.front()->tail, {ObjectiveTerm{3, TermKind::chp_heat, group, c}}, scaled(c, sum_upper(heat))});
    }
  }

  for (int k = 1; k <= 3; ++k) {
    const std::string res = info_resource_id(k);
    if (g.find_resource(res)) throw InvalidInstance("resource id reserved for information: " + res);
    g.resources.push_back(Resource{res, ResourceKind::information});
    const std::string obj = objective_node_id(k);
    require_fresh(g, obj);
    g.nodes.push_back(Node{obj, ObjectiveNode{k, k == 3 ? -1 : 1}});
    InfoSubgraph sub;
    sub.objective = k;
    sub.nodes.push_back(obj);

    auto& src = sources[static_cast<std::size_t>(k - 1)];
    std::string sink = obj;
    Range total{0.0, 0.0};
    for (const auto& s : src) {
      total.lo += s.range.lo;
      total.hi += s.range.hi;
    }
    if (src.size() >= 2) {
      sink = obj + "_sum";
      require_fresh(g, sink);
      g.nodes.push_back(Node{sink, Balance{}});
      sub.nodes.push_back(sink);
    }
    for (const auto& s : src) {
      std::string id = "info" + std::to_string(k) + "_" + s.node;
      require_fresh(g, id);
      g.arcs.push_back(Arc{id, s.node, sink, res, Bounds{s.range.lo, s.range.hi}});
      sub.arcs.push_back(id);
      ma.info_sources[id] = s.terms;
    }
    if (src.size() >= 2) {
      std::string id = "info" + std::to_string(k) + "_sum";
      require_fresh(g, id);
      g.arcs.push_back(Arc{id, sink, obj, res, Bounds{total.lo, total.hi}});
      sub.arcs.push_back(id);
    }
    ma.info_subgraphs.push_back(std::move(sub));
  }
}

int add_port(ModelAGraph& ma, const std::string& owner, PortDirection dir, const std::string& resource, int slot,
             const std::string& label) {
  ma.ports.push_back(Port{owner, dir, resource, slot, label});
  return static_cast<int>(ma.ports.size()) - 1;
}

void instantiate_ports(ModelAGraph& ma) {
  const auto& g = ma.base;
  Incidence inc(g);
  std::set<std::string> chp_sources;
  for (const auto& [arc, terms] : ma.info_sources)
    if (terms.front().kind == TermKind::chp_heat) chp_sources.insert(g.find_arc(arc)->tail);

  for (const auto& n : g.nodes) {
    const auto in = PortDirection::in;
    const auto out = PortDirection::out;
    switch (n.kind()) {
      case NodeKind::unit: {
        const auto& convs = n.unit().conversions;
        add_port(ma, n.id, in, convs.front().input, 0, "input");
        int slot = 0;
        for (const auto& c : convs) add_port(ma, n.id, out, c.output, slot++, "output");
        add_port(ma, n.id, out, info_resource_id(1), slot++, "cost");
        if (chp_sources.count(n.id)) add_port(ma, n.id, out, info_resource_id(3), slot++, "chp_heat");
        break;
      }
      case NodeKind::storage: {
        const auto& r = n.storage().resource;
        int slot = 0;
        for (const char* label : {"actual_input", "thermal_input", "flow_temperature", "operation_loading", "loading"})
          add_port(ma, n.id, in, r, slot++, label);
        slot = 0;
        for (const char* label : {"actual_output", "thermal_output", "return_temperature", "operation_unloading"})
          add_port(ma, n.id, out, r, slot++, label);
        break;
      }
      case NodeKind::market: {
        const auto& r = n.market().resource;
        add_port(ma, n.id, in, r, 0, "sale");
        add_port(ma, n.id, out, r, 0, "purchase");
        add_port(ma, n.id, out, info_resource_id(1), 1, "cost");
        add_port(ma, n.id, out, info_resource_id(2), 2, "emission");
        break;
      }
      case NodeKind::demand: add_port(ma, n.id, in, n.demand().resource, 0, "demand"); break;
      case NodeKind::balance: {
        std::set<std::string> resources;
        for (const Arc* a : inc.in_arcs(n.id)) resources.insert(a->resource);
        for (const Arc* a : inc.out_arcs(n.id)) resources.insert(a->resource);
        int slot = 0;
        for (const auto& r : resources) {
          add_port(ma, n.id, in, r, slot, "in");
          add_port(ma, n.id, out, r, slot, "out");
          ++slot;
        }
        break;
      }
      case NodeKind::objective: {
        const int k = n.objective().objective_index;
        add_port(ma, n.id, in, info_resource_id(k), 0, n.objective().sign > 0 ? "positive" : "negative");
        break;
      }
    }
  }

  std::map<std::tuple<std::string, int, std::string>, int> lookup;
  for (int p = static_cast<int>(ma.ports.size()) - 1; p >= 0; --p) {
    const auto& port = ma.ports[static_cast<std::size_t>(p)];
    lookup[{port.owner, static_cast<int>(port.direction), port.resource}] = p;  // lowest slot wins
  }
  for (const auto& a : g.arcs) {
    auto o = lookup.find({a.tail, static_cast<int>(PortDirection::out), a.resource});
    auto i = lookup.find({a.head, static_cast<int>(PortDirection::in), a.resource});
    if (o == lookup.end()) throw TemplateMismatch(a.tail + ": no out-port for " + a.resource + " on arc " + a.id);
    if (i == lookup.end()) throw TemplateMismatch(a.head + ": no in-port for " + a.resource + " on arc " + a.id);
    ma.port_bindings.push_back(PortBinding{a.id, o->second, i->second});
  }
}

}  // namespace

ModelAGraph build_model_a(const NetworkGraph& g) {
  auto violations = validate_instance(g);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw InvalidInstance(v.code + " " + v.subject + (v.detail.empty() ? "" : " (" + v.detail + ")"));
  }
  ModelAGraph ma;
  ma.base = g;
  expand_stages(ma.base, ma);
  check_templates(ma.base);
  add_container_frames(ma.base, ma);
  add_information(ma.base, ma);
  instantiate_ports(ma);
  return ma;
}

std::vector<FlowDescriptor> enumerate_port_variables(const ModelAGraph& ma) {
  std::vector<FlowDescriptor> out;
  const int T = ma.base.grid.step_count;
  out.reserve(ma.base.arcs.size() * static_cast<std::size_t>(2 * T));
  for (const auto& a : ma.base.arcs)
    for (int t = 0; t < T; ++t) {
      out.push_back(FlowDescriptor{a.id, a.tail, PortDirection::out, t});
      out.push_back(FlowDescriptor{a.id, a.head, PortDirection::in, t});
    }
  return out;
}

}  // namespace mesmix
