#include "mesmix/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace mesmix {

const char* to_string(ResourceKind kind) {
  switch (kind) {
    case ResourceKind::fuel: return "fuel";
    case ResourceKind::heat: return "heat";
    case ResourceKind::power: return "power";
    case ResourceKind::information: return "information";
  }
  return "fuel";
}

std::optional<ResourceKind> resource_kind_from_string(const std::string& s) {
  if (s == "fuel") return ResourceKind::fuel;
  if (s == "heat") return ResourceKind::heat;
  if (s == "power") return ResourceKind::power;
  if (s == "information") return ResourceKind::information;
  return std::nullopt;
}

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::unit: return "unit";
    case NodeKind::storage: return "storage";
    case NodeKind::market: return "market";
    case NodeKind::demand: return "demand";
    case NodeKind::balance: return "balance";
    case NodeKind::objective: return "objective";
  }
  return "balance";
}

const Node* NetworkGraph::find_node(const std::string& id) const {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

const Arc* NetworkGraph::find_arc(const std::string& id) const {
  for (const auto& a : arcs)
    if (a.id == id) return &a;
  return nullptr;
}

const Resource* NetworkGraph::find_resource(const std::string& id) const {
  for (const auto& r : resources)
    if (r.id == id) return &r;
  return nullptr;
}

std::string group_of(const Node& node) {
  if (node.is(NodeKind::unit) && !node.unit().group.empty()) return node.unit().group;
  return node.id;
}

std::string unit_input(const GeneratingUnit& u) {
  auto conv = external_conversions(u);
  return conv.empty() ? std::string() : conv.front().input;
}

std::vector<Conversion> external_conversions(const GeneratingUnit& u) {
  if (u.stages.empty()) return u.conversions;
  std::vector<Conversion> out = u.stages.back().conversions;
  const auto& first = u.stages.front().conversions;
  if (!first.empty())
    for (auto& c : out) c.input = first.front().input;
  return out;
}

Incidence::Incidence(const NetworkGraph& g) {
  for (const auto& a : g.arcs) {
    out[a.tail].push_back(&a);
    in[a.head].push_back(&a);
  }
}

const std::vector<const Arc*>& Incidence::in_arcs(const std::string& node) const {
  static const std::vector<const Arc*> none;
  auto it = in.find(node);
  return it == in.end() ? none : it->second;
}

const std::vector<const Arc*>& Incidence::out_arcs(const std::string& node) const {
  static const std::vector<const Arc*> none;
  auto it = out.find(node);
  return it == out.end() ? none : it->second;
}

namespace {

const char* curve_code(CurveDefect d) {
  switch (d) {
    case CurveDefect::non_increasing_source: return "NonIncreasingSource";
    case CurveDefect::non_increasing_target: return "NonIncreasingTarget";
    case CurveDefect::non_finite: return "BadParameter";
    case CurveDefect::too_few_breakpoints:
    case CurveDefect::length_mismatch: return "ShortCurve";
  }
  return "ShortCurve";
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

class Checker {
 public:
  Checker(const NetworkGraph& g, bool allow_information) : g_(g), allow_info_(allow_information) {}

  std::vector<Violation> run() {
    check_grid();
    check_resources();
    check_nodes();
    check_arcs();
    check_containers();
    check_reachability();
    std::sort(out_.begin(), out_.end());
    return out_;
  }

 private:
  void add(std::string code, std::string subject, std::string detail = {}) {
    out_.push_back({std::move(code), std::move(subject), std::move(detail)});
  }

  bool has_resource(const std::string& id) const { return resource_ids_.count(id) > 0; }

  void check_grid() {
    if (g_.grid.step_count < 1) add("BadParameter", "time", "step_count must be at least 1");
    if (!(g_.grid.step_hours > 0.0) || !std::isfinite(g_.grid.step_hours))
      add("BadParameter", "time", "step_hours must be positive");
  }

  void check_resources() {
    for (const auto& r : g_.resources) {
      if (!resource_ids_.insert(r.id).second) add("DuplicateResourceId", r.id);
      if (r.kind == ResourceKind::information && !allow_info_) add("InformationInInstance", r.id);
    }
  }

  void check_series(const std::string& node, const std::vector<double>& s, const char* what) {
    if (static_cast<int>(s.size()) != g_.grid.step_count)
      add("SeriesLength", node, what);
    for (double v : s)
      if (!std::isfinite(v)) {
        add("BadParameter", node, std::string(what) + " must be finite");
        break;
      }
  }

  void check_resource_ref(const std::string& node, const std::string& resource) {
    if (!has_resource(resource)) add("MissingResource", resource, "referenced by " + node);
  }

  void check_conversions(const std::string& node, const std::vector<Conversion>& convs) {
    std::set<std::string> outputs;
    for (const auto& c : convs) {
      check_resource_ref(node, c.input);
      check_resource_ref(node, c.output);
      if (auto d = c.curve.defect()) add(curve_code(*d), node, c.input + "->" + c.output);
      if (c.curve.valid() && c.curve.source_min() < 0.0)
        add("BadParameter", node, "curve source must be nonnegative");
      if (c.curve.valid() && c.curve.target_min() < 0.0)
        add("BadParameter", node, "curve target must be nonnegative");
      if (!outputs.insert(c.output).second) add("BadParameter", node, "duplicate output " + c.output);
      if (c.input != convs.front().input) add("BadParameter", node, "unit has more than one input resource");
    }
  }

  void check_unit(const Node& n) {
    const auto& u = n.unit();
    if (u.min_up_steps < 0 || u.min_down_steps < 0) add("BadParameter", n.id, "negative minimum time");
    if (!(u.ramp_up >= 0.0) || !(u.ramp_down >= 0.0)) add("BadParameter", n.id, "negative ramp");
    if (!finite_nonneg(u.startup_cost)) add("BadParameter", n.id, "startup cost");
    if (u.initial_status != 0 && u.initial_status != 1) add("BadParameter", n.id, "initial status");
    if (u.stages.empty()) {
      if (u.conversions.empty()) add("BadParameter", n.id, "unit without conversion");
      check_conversions(n.id, u.conversions);
      return;
    }
    if (!u.conversions.empty()) add("BadParameter", n.id, "unit declares both conversions and stages");
    std::set<std::string> names;
    for (std::size_t k = 0; k < u.stages.size(); ++k) {
      const auto& st = u.stages[k];
      if (!names.insert(st.name).second) add("BadParameter", n.id, "duplicate stage " + st.name);
      if (st.conversions.empty()) {
        add("BadParameter", n.id, "stage without conversion " + st.name);
        continue;
      }
      check_conversions(n.id, st.conversions);
      if (k + 1 < u.stages.size()) {
        if (st.conversions.size() != 1)
          add("BadParameter", n.id, "inner stage must have one conversion " + st.name);
        const auto& next = u.stages[k + 1].conversions;
        if (!next.empty() && next.front().input != st.conversions.front().output)
          add("BadParameter", n.id, "stage chain broken after " + st.name);
      }
    }
  }

  void check_nodes() {
    std::set<std::string> seen;
    for (const auto& n : g_.nodes) {
      if (!seen.insert(n.id).second) add("DuplicateNodeId", n.id);
      switch (n.kind()) {
        case NodeKind::unit: check_unit(n); break;
        case NodeKind::storage: {
          const auto& s = n.storage();
          check_resource_ref(n.id, s.resource);
          if (!(s.loss > 0.0 && s.loss <= 1.0)) add("BadParameter", n.id, "loss");
          if (!(s.load_eff > 0.0 && s.load_eff <= 1.0)) add("BadParameter", n.id, "load efficiency");
          if (!(s.unload_eff > 0.0 && s.unload_eff <= 1.0)) add("BadParameter", n.id, "unload efficiency");
          if (!(std::isfinite(s.level_min) && std::isfinite(s.level_max) && s.level_min >= 0.0 &&
                s.level_min <= s.initial_level && s.initial_level <= s.level_max))
            add("BadParameter", n.id, "storage levels");
          break;
        }
        case NodeKind::market: {
          const auto& m = n.market();
          check_resource_ref(n.id, m.resource);
          check_series(n.id, m.buy_price, "buy_price");
          check_series(n.id, m.sell_price, "sell_price");
          if (!finite_nonneg(m.emission_factor)) add("BadParameter", n.id, "emission factor");
          break;
        }
        case NodeKind::demand: {
          const auto& d = n.demand();
          check_resource_ref(n.id, d.resource);
          check_series(n.id, d.demand, "demand");
          for (double v : d.demand)
            if (v < 0.0) {
              add("BadParameter", n.id, "negative demand");
              break;
            }
          break;
        }
        case NodeKind::balance: break;
        case NodeKind::objective:
          if (!allow_info_) add("InformationInInstance", n.id, "objective node");
          break;
      }
    }
    node_ids_ = std::move(seen);
  }

  void check_arcs() {
    std::set<std::string> seen;
    for (const auto& a : g_.arcs) {
      if (!seen.insert(a.id).second) add("DuplicateArc", a.id);
      if (!node_ids_.count(a.tail)) add("MissingEndpoint", a.tail, "tail of " + a.id);
      if (!node_ids_.count(a.head)) add("MissingEndpoint", a.head, "head of " + a.id);
      if (a.tail == a.head) add("SelfLoop", a.id);
      if (!has_resource(a.resource)) add("MissingResource", a.resource, "referenced by " + a.id);
      const bool info = [&] {
        const auto* r = g_.find_resource(a.resource);
        return r && r->kind == ResourceKind::information;
      }();
      if (!info && !(std::isfinite(a.bounds.lower) && a.bounds.lower >= 0.0))
        add("BadParameter", a.id, "arc lower bound");
      if (!(a.bounds.lower <= a.bounds.upper)) add("BadParameter", a.id, "arc bounds crossed");
    }
  }

  void check_containers() {
    std::map<std::string, std::string> owner;
    std::set<std::string> ids;
    for (const auto& c : g_.containers) {
      if (!ids.insert(c.id).second || node_ids_.count(c.id)) add("DuplicateNodeId", c.id, "container");
      std::set<std::string> members;
      for (const auto& m : c.members) {
        if (!node_ids_.count(m)) add("ContainerMembership", c.id, "missing member " + m);
        auto [it, fresh] = owner.emplace(m, c.id);
        if (!fresh) add("ContainerMembership", m, "member of " + it->second + " and " + c.id);
        members.insert(m);
      }
      if (members.empty()) add("ContainerMembership", c.id, "empty container");
      int crossing_in = 0;
      int crossing_out = 0;
      for (const auto& a : g_.arcs) {
        const bool t = members.count(a.tail) > 0;
        const bool h = members.count(a.head) > 0;
        if (!t && h) ++crossing_in;
        if (t && !h) ++crossing_out;
      }
      const Arc* in = g_.find_arc(c.boundary_in);
      const Arc* out = g_.find_arc(c.boundary_out);
      if (!in || members.count(in->tail) || !members.count(in->head))
        add("ContainerBoundary", c.id, "boundary_in must enter the container");
      if (!out || !members.count(out->tail) || members.count(out->head))
        add("ContainerBoundary", c.id, "boundary_out must leave the container");
      if (crossing_in != 1 || crossing_out != 1)
        add("ContainerBoundary", c.id, "container needs exactly one entering and one leaving arc");
    }
  }

  bool produces(const Node& n, const std::string& resource) const {
    switch (n.kind()) {
      case NodeKind::unit:
        for (const auto& c : external_conversions(n.unit()))
          if (c.output == resource) return true;
        return false;
      case NodeKind::market: return n.market().resource == resource;
      case NodeKind::storage: return n.storage().resource == resource;
      default: return false;
    }
  }

  void check_reachability() {
    Incidence inc(g_);
    for (const auto& n : g_.nodes) {
      if (!n.is(NodeKind::demand)) continue;
      const std::string& r = n.demand().resource;
      std::set<std::string> visited{n.id};
      std::deque<std::string> queue{n.id};
      bool found = false;
      while (!queue.empty() && !found) {
        std::string v = queue.front();
        queue.pop_front();
        for (const Arc* a : inc.in_arcs(v)) {
          if (a->resource != r || !visited.insert(a->tail).second) continue;
          const Node* t = g_.find_node(a->tail);
          if (!t) continue;
          if (produces(*t, r)) {
            found = true;
            break;
          }
          queue.push_back(a->tail);
        }
      }
      if (!found) add("UnreachableDemand", n.id, "no producer of " + r + " upstream");
    }
  }

  const NetworkGraph& g_;
  bool allow_info_;
  std::set<std::string> resource_ids_;
  std::set<std::string> node_ids_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate_instance(const NetworkGraph& g, bool allow_information) {
  return Checker(g, allow_information).run();
}

}  // namespace mesmix
