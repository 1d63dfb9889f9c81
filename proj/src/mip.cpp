#include "mesmix/mip.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace mesmix {

const char* to_string(VarFamily f) {
  switch (f) {
    case VarFamily::flow_port_in: return "flow_port_in";
    case VarFamily::flow_port_out: return "flow_port_out";
    case VarFamily::flow_arc: return "flow_arc";
    case VarFamily::status: return "status";
    case VarFamily::change: return "change";
    case VarFamily::storage_level: return "storage_level";
    case VarFamily::purchase: return "purchase";
    case VarFamily::sale: return "sale";
    case VarFamily::pwl_lambda: return "pwl_lambda";
    case VarFamily::pwl_segment_binary: return "pwl_segment_binary";
  }
  return "flow_arc";
}

const char* to_string(RowFamily f) {
  switch (f) {
    case RowFamily::balance: return "balance";
    case RowFamily::conversion: return "conversion";
    case RowFamily::activation: return "activation";
    case RowFamily::min_up: return "min_up";
    case RowFamily::min_down: return "min_down";
    case RowFamily::ramp_up: return "ramp_up";
    case RowFamily::ramp_down: return "ramp_down";
    case RowFamily::storage: return "storage";
    case RowFamily::capacity: return "capacity";
    case RowFamily::arc_identity: return "arc_identity";
    case RowFamily::information: return "information";
  }
  return "balance";
}

const char* to_string(Sense s) {
  switch (s) {
    case Sense::le: return "<=";
    case Sense::eq: return "=";
    case Sense::ge: return ">=";
  }
  return "=";
}

int MipProgram::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

int MipProgram::add_variable(MipVariable v) {
  if (v.binary) {
    v.lower = 0.0;
    v.upper = 1.0;
  }
  const int id = static_cast<int>(variables.size());
  if (!index_.emplace(v.name, id).second) throw InvalidInstance("duplicate variable name " + v.name);
  variables.push_back(std::move(v));
  return id;
}

int MipProgram::add_constraint(LinearConstraint c) {
  std::sort(c.terms.begin(), c.terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  for (const auto& t : c.terms) {
    if (!merged.empty() && merged.back().var == t.var)
      merged.back().coef += t.coef;
    else
      merged.push_back(t);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(), [](const Term& t) { return t.coef == 0.0; }),
               merged.end());
  c.terms = std::move(merged);
  constraints.push_back(std::move(c));
  return static_cast<int>(constraints.size()) - 1;
}

int MipProgram::binary_count() const {
  return static_cast<int>(std::count_if(variables.begin(), variables.end(), [](const MipVariable& v) { return v.binary; }));
}

namespace {

std::string step_suffix(int t) { return "_t" + std::to_string(t); }

LinearExpr& operator+=(LinearExpr& e, const LinearExpr& o) {
  e.terms.insert(e.terms.end(), o.terms.begin(), o.terms.end());
  e.constant += o.constant;
  return e;
}

LinearExpr scaled(const LinearExpr& e, double k) {
  LinearExpr out = e;
  for (auto& t : out.terms) t.coef *= k;
  out.constant *= k;
  return out;
}

void push(std::vector<Term>& terms, const LinearExpr& e, double k) {
  for (const auto& t : e.terms) terms.push_back(Term{t.var, t.coef * k});
}

}  // namespace

void encode_pwl(MipProgram& program, const std::string& prefix, const std::string& origin, int step,
                const Curve& curve, const LinearExpr& x_in, const LinearExpr& x_out, int z_var) {
  detail::require_valid(curve);
  const std::string sfx = step_suffix(step);
  const int segments = static_cast<int>(curve.segments());
  std::vector<int> delta(static_cast<std::size_t>(segments));
  std::vector<int> order(static_cast<std::size_t>(segments));
  for (int k = 0; k < segments; ++k) {
    delta[static_cast<std::size_t>(k)] = program.add_variable(MipVariable{
        "d" + std::to_string(k + 1) + "_" + prefix + sfx, VarFamily::pwl_lambda, false, 0.0, curve.segment_length(k)});
    order[static_cast<std::size_t>(k)] = program.add_variable(
        MipVariable{"y" + std::to_string(k + 1) + "_" + prefix + sfx, VarFamily::pwl_segment_binary, true, 0.0, 1.0});
  }

  LinearConstraint in{"cin_" + prefix + sfx, {}, Sense::eq, -x_in.constant, RowFamily::conversion, origin, step};
  push(in.terms, x_in, 1.0);
  in.terms.push_back(Term{z_var, -curve.source()(0)});
  for (int k = 0; k < segments; ++k) in.terms.push_back(Term{delta[static_cast<std::size_t>(k)], -1.0});
  program.add_constraint(std::move(in));

  LinearConstraint out{"cout_" + prefix + sfx, {}, Sense::eq, -x_out.constant, RowFamily::conversion, origin, step};
  push(out.terms, x_out, 1.0);
  out.terms.push_back(Term{z_var, -curve.target()(0)});
  for (int k = 0; k < segments; ++k) out.terms.push_back(Term{delta[static_cast<std::size_t>(k)], -curve.slope(k)});
  program.add_constraint(std::move(out));

  for (int k = 0; k < segments; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    program.add_constraint(LinearConstraint{"cub" + std::to_string(k + 1) + "_" + prefix + sfx,
                                            {{delta[uk], 1.0}, {order[uk], -curve.segment_length(k)}},
                                            Sense::le, 0.0, RowFamily::conversion, origin, step});
  }
  for (int k = 0; k + 1 < segments; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    program.add_constraint(LinearConstraint{"clb" + std::to_string(k + 1) + "_" + prefix + sfx,
                                            {{delta[uk], 1.0}, {order[uk + 1], -curve.segment_length(k)}},
                                            Sense::ge, 0.0, RowFamily::conversion, origin, step});
  }
}

namespace {

struct Group {
  std::string id;
  std::vector<std::string> members;
  const GeneratingUnit* params = nullptr;
  std::vector<const Arc*> outputs;  // external, non-information
  std::vector<int> z, su, sd;
};

class Compiler {
 public:
  Compiler(const NetworkGraph& g, bool port_form) : g_(g), inc_(g), port_form_(port_form), T_(g.grid.step_count) {
    p_.name = g.name;
  }

  MipProgram run(const std::map<std::string, std::vector<ObjectiveTerm>>* info_sources,
                 const std::vector<ObjectiveTerm>* terms, bool extras) {
    info_sources_ = info_sources;
    check_bounds();
    add_flow_variables();
    collect_groups();
    add_state_variables();
    add_balance_rows();
    add_conversion_rows();
    add_commitment_rows();
    add_ramp_rows();
    add_storage_rows();
    add_capacity_rows(extras);
    if (port_form_) add_identity_rows();
    if (info_sources) add_information_rows();
    if (port_form_)
      add_objectives_from_nodes();
    else
      add_objectives_from_terms(*terms);
    return std::move(p_);
  }

 private:
  bool is_info(const Arc& a) const {
    const auto* r = g_.find_resource(a.resource);
    return r && r->kind == ResourceKind::information;
  }

  void check_bounds() const {
    for (const auto& a : g_.arcs)
      if (!std::isfinite(a.bounds.upper) || !std::isfinite(a.bounds.lower))
        throw UnboundedVariable("arc " + a.id + " has no finite flow bounds");
  }

  void add_flow_variables() {
    for (std::size_t i = 0; i < g_.arcs.size(); ++i) {
      const auto& a = g_.arcs[i];
      arc_index_[a.id] = i;
      std::vector<int> tail, head;
      for (int t = 0; t < T_; ++t) {
        const std::string sfx = "_" + a.id + step_suffix(t);
        if (port_form_) {
          tail.push_back(p_.add_variable({"xo" + sfx, VarFamily::flow_port_out, false, a.bounds.lower, a.bounds.upper}));
          head.push_back(p_.add_variable({"xi" + sfx, VarFamily::flow_port_in, false, a.bounds.lower, a.bounds.upper}));
        } else {
          tail.push_back(p_.add_variable({"x" + sfx, VarFamily::flow_arc, false, a.bounds.lower, a.bounds.upper}));
        }
      }
      tail_var_.push_back(tail);
      head_var_.push_back(port_form_ ? head : tail);
    }
  }

  int tail_side(const Arc& a, int t) const {
    return tail_var_[arc_index_.at(a.id)][static_cast<std::size_t>(t)];
  }
  int head_side(const Arc& a, int t) const {
    return head_var_[arc_index_.at(a.id)][static_cast<std::size_t>(t)];
  }

  void collect_groups() {
    for (const auto& n : g_.nodes) {
      if (!n.is(NodeKind::unit)) continue;
      const std::string gid = group_of(n);
      auto it = std::find_if(groups_.begin(), groups_.end(), [&](const Group& gr) { return gr.id == gid; });
      if (it == groups_.end()) {
        groups_.push_back(Group{gid, {}, &n.unit(), {}, {}, {}, {}});
        it = std::prev(groups_.end());
      }
      it->members.push_back(n.id);
      group_index_[n.id] = static_cast<std::size_t>(it - groups_.begin());
    }
    for (auto& gr : groups_) {
      const std::set<std::string> members(gr.members.begin(), gr.members.end());
      for (const auto& m : gr.members)
        for (const Arc* a : inc_.out_arcs(m))
          if (!members.count(a->head) && !is_info(*a)) gr.outputs.push_back(a);
    }
  }

  void add_state_variables() {
    for (auto& gr : groups_)
      for (int t = 0; t < T_; ++t) {
        const std::string sfx = "_" + gr.id + step_suffix(t);
        gr.z.push_back(p_.add_variable({"z" + sfx, VarFamily::status, true, 0.0, 1.0}));
        gr.su.push_back(p_.add_variable({"su" + sfx, VarFamily::change, false, 0.0, 1.0}));
        gr.sd.push_back(p_.add_variable({"sd" + sfx, VarFamily::change, false, 0.0, 1.0}));
      }
    for (const auto& n : g_.nodes) {
      if (n.is(NodeKind::storage)) {
        const auto& s = n.storage();
        for (int t = 0; t < T_; ++t)
          level_[n.id].push_back(
              p_.add_variable({"h_" + n.id + step_suffix(t), VarFamily::storage_level, false, s.level_min, s.level_max}));
      } else if (n.is(NodeKind::market)) {
        const auto& r = n.market().resource;
        double buy = 0.0, sell = 0.0;
        bool buys = false, sells = false;
        for (const Arc* a : inc_.out_arcs(n.id))
          if (a->resource == r) {
            buy += a->bounds.upper;
            buys = true;
          }
        for (const Arc* a : inc_.in_arcs(n.id))
          if (a->resource == r) {
            sell += a->bounds.upper;
            sells = true;
          }
        for (int t = 0; t < T_; ++t) {
          if (buys)
            purchase_[n.id].push_back(
                p_.add_variable({"buy_" + n.id + step_suffix(t), VarFamily::purchase, false, 0.0, buy}));
          if (sells)
            sale_[n.id].push_back(p_.add_variable({"sale_" + n.id + step_suffix(t), VarFamily::sale, false, 0.0, sell}));
        }
      }
    }
  }

  LinearExpr inflow(const std::string& node, int t, const std::string& resource = {}) const {
    LinearExpr e;
    for (const Arc* a : inc_.in_arcs(node))
      if (resource.empty() || a->resource == resource) e.terms.push_back(Term{head_side(*a, t), 1.0});
    return e;
  }
  LinearExpr outflow(const std::string& node, int t, const std::string& resource = {}) const {
    LinearExpr e;
    for (const Arc* a : inc_.out_arcs(node))
      if (resource.empty() || a->resource == resource) e.terms.push_back(Term{tail_side(*a, t), 1.0});
    return e;
  }

  void row(std::string name, const LinearExpr& lhs, Sense sense, double rhs, RowFamily family,
           const std::string& origin, int t, bool redundant = false) {
    LinearConstraint c{std::move(name), {}, sense, rhs - lhs.constant, family, origin, t, redundant};
    push(c.terms, lhs, 1.0);
    p_.add_constraint(std::move(c));
  }

  void add_balance_rows() {
    for (const auto& n : g_.nodes) {
      switch (n.kind()) {
        case NodeKind::balance: {
          std::vector<std::string> resources;
          for (const Arc* a : inc_.in_arcs(n.id))
            if (std::find(resources.begin(), resources.end(), a->resource) == resources.end())
              resources.push_back(a->resource);
          for (const Arc* a : inc_.out_arcs(n.id))
            if (std::find(resources.begin(), resources.end(), a->resource) == resources.end())
              resources.push_back(a->resource);
          for (const auto& r : resources)
            for (int t = 0; t < T_; ++t) {
              LinearExpr e = inflow(n.id, t, r);
              e += scaled(outflow(n.id, t, r), -1.0);
              row("bal_" + n.id + "_" + r + step_suffix(t), e, Sense::eq, 0.0, RowFamily::balance, n.id, t);
            }
          break;
        }
        case NodeKind::demand:
          for (int t = 0; t < T_; ++t) {
            const auto& r = n.demand().resource;
            LinearExpr e = inflow(n.id, t, r);
            e += scaled(outflow(n.id, t, r), -1.0);
            row("dem_" + n.id + step_suffix(t), e, Sense::eq, n.demand().demand[static_cast<std::size_t>(t)],
                RowFamily::balance, n.id, t);
          }
          break;
        case NodeKind::market:
          for (int t = 0; t < T_; ++t) {
            if (auto it = purchase_.find(n.id); it != purchase_.end()) {
              LinearExpr e = outflow(n.id, t, n.market().resource);
              e.terms.push_back(Term{it->second[static_cast<std::size_t>(t)], -1.0});
              row("mbuy_" + n.id + step_suffix(t), e, Sense::eq, 0.0, RowFamily::balance, n.id, t);
            }
            if (auto it = sale_.find(n.id); it != sale_.end()) {
              LinearExpr e = inflow(n.id, t, n.market().resource);
              e.terms.push_back(Term{it->second[static_cast<std::size_t>(t)], -1.0});
              row("msell_" + n.id + step_suffix(t), e, Sense::eq, 0.0, RowFamily::balance, n.id, t);
            }
          }
          break;
        default: break;
      }
    }
  }

  const Group& group(const std::string& node) const { return groups_[group_index_.at(node)]; }

  void add_conversion_rows() {
    for (const auto& n : g_.nodes) {
      if (!n.is(NodeKind::unit)) continue;
      const Group& gr = group(n.id);
      for (const auto& c : n.unit().conversions)
        for (int t = 0; t < T_; ++t)
          encode_pwl(p_, n.id + "_" + c.output, n.id, t, c.curve, inflow(n.id, t, c.input), outflow(n.id, t, c.output),
                     gr.z[static_cast<std::size_t>(t)]);
    }
  }

  void add_commitment_rows() {
    for (const auto& gr : groups_) {
      const double z0 = gr.params->initial_status;
      for (int t = 0; t < T_; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        const std::string sfx = "_" + gr.id + step_suffix(t);
        LinearExpr prev;
        if (t == 0)
          prev.constant = z0;
        else
          prev.terms.push_back(Term{gr.z[ut - 1], 1.0});
        const LinearExpr z{{Term{gr.z[ut], 1.0}}, 0.0};
        const LinearExpr su{{Term{gr.su[ut], 1.0}}, 0.0};
        const LinearExpr sd{{Term{gr.sd[ut], 1.0}}, 0.0};
        auto combo = [](std::initializer_list<std::pair<const LinearExpr*, double>> parts) {
          LinearExpr e;
          for (const auto& [x, k] : parts) e += scaled(*x, k);
          return e;
        };
        row("act1" + sfx, combo({{&su, 1.0}, {&z, -1.0}, {&prev, 1.0}}), Sense::ge, 0.0, RowFamily::activation, gr.id, t);
        row("act2" + sfx, combo({{&su, 1.0}, {&z, -1.0}}), Sense::le, 0.0, RowFamily::activation, gr.id, t);
        row("act3" + sfx, combo({{&su, 1.0}, {&prev, 1.0}}), Sense::le, 1.0, RowFamily::activation, gr.id, t);
        row("act4" + sfx, combo({{&sd, 1.0}, {&prev, -1.0}, {&z, 1.0}}), Sense::ge, 0.0, RowFamily::activation, gr.id, t);
        row("act5" + sfx, combo({{&sd, 1.0}, {&prev, -1.0}}), Sense::le, 0.0, RowFamily::activation, gr.id, t);
        row("act6" + sfx, combo({{&sd, 1.0}, {&z, 1.0}}), Sense::le, 1.0, RowFamily::activation, gr.id, t);
      }
      const int up = gr.params->min_up_steps;
      const int down = gr.params->min_down_steps;
      for (int t = 0; t < T_ && up >= 1; ++t) {
        const int last = std::min(t + up - 1, T_ - 1);
        LinearExpr e;
        for (int tau = t; tau <= last; ++tau) e.terms.push_back(Term{gr.z[static_cast<std::size_t>(tau)], 1.0});
        e.terms.push_back(Term{gr.su[static_cast<std::size_t>(t)], -static_cast<double>(last - t + 1)});
        row("up_" + gr.id + step_suffix(t), e, Sense::ge, 0.0, RowFamily::min_up, gr.id, t);
      }
      for (int t = 0; t < T_ && down >= 1; ++t) {
        const int last = std::min(t + down - 1, T_ - 1);
        const double width = last - t + 1;
        LinearExpr e;
        for (int tau = t; tau <= last; ++tau) e.terms.push_back(Term{gr.z[static_cast<std::size_t>(tau)], 1.0});
        e.terms.push_back(Term{gr.sd[static_cast<std::size_t>(t)], width});
        row("dn_" + gr.id + step_suffix(t), e, Sense::le, width, RowFamily::min_down, gr.id, t);
      }
    }
  }

  std::vector<std::string> output_resources(const Group& gr) const {
    std::vector<std::string> out;
    for (const Arc* a : gr.outputs)
      if (std::find(out.begin(), out.end(), a->resource) == out.end()) out.push_back(a->resource);
    return out;
  }

  LinearExpr group_output(const Group& gr, const std::string& resource, int t) const {
    LinearExpr e;
    for (const Arc* a : gr.outputs)
      if (a->resource == resource) e.terms.push_back(Term{tail_side(*a, t), 1.0});
    return e;
  }

  void add_ramp_rows() {
    for (const auto& gr : groups_) {
      const double up = gr.params->ramp_up;
      const double down = gr.params->ramp_down;
      for (const auto& r : output_resources(gr)) {
        for (int t = 0; t + 1 < T_ && std::isfinite(up); ++t) {
          LinearExpr e = group_output(gr, r, t + 1);
          e += scaled(group_output(gr, r, t), -1.0);
          row("rup_" + gr.id + "_" + r + step_suffix(t), e, Sense::le, up, RowFamily::ramp_up, gr.id, t);
        }
        for (int t = 0; t + 1 < T_ && std::isfinite(down); ++t) {
          LinearExpr e = group_output(gr, r, t);
          e += scaled(group_output(gr, r, t + 1), -1.0);
          row("rdn_" + gr.id + "_" + r + step_suffix(t), e, Sense::le, down, RowFamily::ramp_down, gr.id, t);
        }
      }
    }
  }

  void add_storage_rows() {
    for (const auto& n : g_.nodes) {
      if (!n.is(NodeKind::storage)) continue;
      const auto& s = n.storage();
      const auto& h = level_.at(n.id);
      for (int t = 0; t < T_; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        LinearExpr e{{Term{h[ut], 1.0}}, 0.0};
        double rhs = 0.0;
        if (t == 0)
          rhs = s.loss * s.initial_level;
        else
          e.terms.push_back(Term{h[ut - 1], -s.loss});
        e += scaled(inflow(n.id, t), -s.load_eff);
        e += scaled(outflow(n.id, t), s.unload_eff);
        row("sto_" + n.id + step_suffix(t), e, Sense::eq, rhs, RowFamily::storage, n.id, t);
      }
    }
  }

  void add_capacity_rows(bool extras) {
    for (const auto& n : g_.nodes) {
      if (!n.is(NodeKind::unit)) continue;
      const Group& gr = group(n.id);
      auto couple = [&](const Arc& a, bool unit_is_head) {
        for (int t = 0; t < T_; ++t) {
          const int x = unit_is_head ? head_side(a, t) : tail_side(a, t);
          LinearExpr e{{Term{x, 1.0}, Term{gr.z[static_cast<std::size_t>(t)], -a.bounds.upper}}, 0.0};
          row("cap_" + n.id + "_" + a.id + step_suffix(t), e, Sense::le, 0.0, RowFamily::capacity, n.id, t);
        }
      };
      for (const Arc* a : inc_.in_arcs(n.id))
        if (!is_info(*a)) couple(*a, true);
      for (const Arc* a : inc_.out_arcs(n.id))
        if (!is_info(*a)) couple(*a, false);
    }
    if (!extras || !port_form_) return;
    for (const auto& a : g_.arcs) {
      if (is_info(a)) continue;
      for (int t = 0; t < T_; ++t) {
        row("xcapo_" + a.id + step_suffix(t), LinearExpr{{Term{tail_side(a, t), 1.0}}, 0.0}, Sense::le,
            a.bounds.upper, RowFamily::capacity, a.id, t, true);
        row("xcapi_" + a.id + step_suffix(t), LinearExpr{{Term{head_side(a, t), 1.0}}, 0.0}, Sense::le,
            a.bounds.upper, RowFamily::capacity, a.id, t, true);
      }
    }
  }

  void add_identity_rows() {
    for (const auto& a : g_.arcs)
      for (int t = 0; t < T_; ++t)
        row("id_" + a.id + step_suffix(t), LinearExpr{{Term{tail_side(a, t), 1.0}, Term{head_side(a, t), -1.0}}, 0.0},
            Sense::eq, 0.0, RowFamily::arc_identity, a.id, t);
  }

  LinearExpr quantity(const ObjectiveTerm& term, int t) const {
    const auto ut = static_cast<std::size_t>(t);
    switch (term.kind) {
      case TermKind::purchase:
      case TermKind::emission: return LinearExpr{{Term{purchase_.at(term.subject)[ut], 1.0}}, 0.0};
      case TermKind::sale: return LinearExpr{{Term{sale_.at(term.subject)[ut], 1.0}}, 0.0};
      case TermKind::startup: return LinearExpr{{Term{group_by_id(term.subject).su[ut], 1.0}}, 0.0};
      case TermKind::chp_heat: {
        const Group& gr = group_by_id(term.subject);
        LinearExpr e;
        for (const Arc* a : gr.outputs) {
          const auto* r = g_.find_resource(a->resource);
          if (r && r->kind == ResourceKind::heat) e.terms.push_back(Term{tail_side(*a, t), 1.0});
        }
        return e;
      }
    }
    return {};
  }

  const Group& group_by_id(const std::string& id) const {
    for (const auto& gr : groups_)
      if (gr.id == id) return gr;
    throw InvalidInstance("objective term refers to unknown group " + id);
  }

  void add_information_rows() {
    for (const auto& a : g_.arcs) {
      auto it = info_sources_->find(a.id);
      if (it == info_sources_->end()) continue;
      for (int t = 0; t < T_; ++t) {
        LinearExpr e{{Term{tail_side(a, t), 1.0}}, 0.0};
        for (const auto& term : it->second)
          e += scaled(quantity(term, t), -term.coefficient[static_cast<std::size_t>(t)]);
        row("info_" + a.id + step_suffix(t), e, Sense::eq, 0.0, RowFamily::information, a.tail, t);
      }
    }
  }

  void add_objectives_from_nodes() {
    for (const auto& n : g_.nodes) {
      if (!n.is(NodeKind::objective)) continue;
      const auto& o = n.objective();
      auto& target = p_.objectives[static_cast<std::size_t>(o.objective_index - 1)];
      for (int t = 0; t < T_; ++t) push(target.terms, inflow(n.id, t), o.sign);
    }
  }

  void add_objectives_from_terms(const std::vector<ObjectiveTerm>& terms) {
    for (const auto& term : terms) {
      auto& target = p_.objectives[static_cast<std::size_t>(term.objective - 1)];
      for (int t = 0; t < T_; ++t) push(target.terms, quantity(term, t), term.coefficient[static_cast<std::size_t>(t)]);
    }
  }

  const NetworkGraph& g_;
  Incidence inc_;
  bool port_form_;
  int T_;
  MipProgram p_;
  const std::map<std::string, std::vector<ObjectiveTerm>>* info_sources_ = nullptr;
  std::map<std::string, std::size_t> arc_index_;
  std::vector<std::vector<int>> tail_var_, head_var_;
  std::vector<Group> groups_;
  std::map<std::string, std::size_t> group_index_;
  std::map<std::string, std::vector<int>> level_, purchase_, sale_;
};

void normalize_objectives(MipProgram& p) {
  for (auto& obj : p.objectives) {
    LinearConstraint tmp;
    tmp.terms = std::move(obj.terms);
    std::sort(tmp.terms.begin(), tmp.terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> merged;
    for (const auto& t : tmp.terms) {
      if (!merged.empty() && merged.back().var == t.var)
        merged.back().coef += t.coef;
      else
        merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const Term& t) { return t.coef == 0.0; }),
                 merged.end());
    obj.terms = std::move(merged);
  }
}

}  // namespace

MipProgram compile_model_a(const ModelAGraph& ma, const CompileOptions& options) {
  MipProgram p = Compiler(ma.base, true).run(&ma.info_sources, nullptr, options.redundant_extras);
  normalize_objectives(p);
  return p;
}

MipProgram compile_model_b(const ModelBGraph& mb) {
  MipProgram p = Compiler(mb.base, false).run(nullptr, &mb.objective_terms, false);
  normalize_objectives(p);
  return p;
}

namespace {

long common_breakpoints(const NetworkGraph& g) {
  long rho = -1;
  for (const auto& n : g.nodes) {
    if (!n.is(NodeKind::unit)) continue;
    for (const auto& c : n.unit().conversions) {
      const long k = static_cast<long>(c.curve.size());
      if (rho < 0)
        rho = k;
      else if (rho != k)
        return 0;
    }
  }
  return rho < 0 ? 0 : rho;
}

void fill_program_counts(SizeReport& r, const MipProgram& p) {
  r.variables = static_cast<long>(p.variables.size());
  r.constraints = static_cast<long>(p.constraints.size());
  for (const auto& v : p.variables) {
    ++r.variables_by_family[to_string(v.family)];
    if (v.family == VarFamily::flow_arc || v.family == VarFamily::flow_port_in || v.family == VarFamily::flow_port_out)
      ++r.flow_variables;
    if (v.binary) ++r.binaries;
  }
  for (const auto& c : p.constraints)
    ++r.constraints_by_family[c.redundant ? std::string("capacity_redundant") : std::string(to_string(c.family))];
}

}  // namespace

SizeReport size_report(const MipProgram& program, const ModelAGraph& ma, const ModelBGraph& mb) {
  SizeReport r;
  r.nodes = static_cast<long>(ma.base.nodes.size());
  r.arcs = static_cast<long>(ma.base.arcs.size());
  r.containers = static_cast<long>(ma.frames.size());
  for (const auto& sub : ma.info_subgraphs) {
    r.info_nodes += static_cast<long>(sub.nodes.size());
    r.info_arcs += static_cast<long>(sub.arcs.size());
  }
  r.subcomponents = ma.subcomponents;
  r.eliminated_curves = mb.eliminated_curves;
  r.breakpoints = common_breakpoints(ma.base);
  r.steps = ma.base.grid.step_count;
  fill_program_counts(r, program);
  return r;
}

SizeReport size_report(const MipProgram& program, const ModelBGraph& mb) {
  SizeReport r;
  r.nodes = static_cast<long>(mb.base.nodes.size());
  r.arcs = static_cast<long>(mb.base.arcs.size());
  r.eliminated_curves = mb.eliminated_curves;
  r.breakpoints = common_breakpoints(mb.base);
  r.steps = mb.base.grid.step_count;
  fill_program_counts(r, program);
  return r;
}

SizeIdentities size_identities(const SizeReport& a, const SizeReport& b) {
  SizeIdentities s;
  const long T = a.steps;
  const long hidden = 2 * a.containers + a.info_arcs + a.subcomponents;
  s.graph_nodes_slack = a.nodes - (b.nodes + 2 * a.containers + a.info_nodes + a.subcomponents);
  s.graph_arcs_slack = a.arcs - (b.arcs + hidden);

  long pwl_vars = 2 * a.eliminated_curves * (a.breakpoints - 1) * T;
  long pwl_rows = a.eliminated_curves * (2 * a.breakpoints - 1) * T;
  if (a.breakpoints == 0) {
    // Curves of different sizes: use the measured difference of the encodings.
    auto get = [](const std::map<std::string, long>& m, const char* k) {
      auto it = m.find(k);
      return it == m.end() ? 0L : it->second;
    };
    pwl_vars = get(a.variables_by_family, "pwl_lambda") + get(a.variables_by_family, "pwl_segment_binary") -
               get(b.variables_by_family, "pwl_lambda") - get(b.variables_by_family, "pwl_segment_binary");
    pwl_rows = get(a.constraints_by_family, "conversion") - get(b.constraints_by_family, "conversion");
  }
  s.variables_lhs = a.variables;
  s.variables_rhs = b.variables + 2 * a.arcs * T + pwl_vars;
  s.constraints_lhs = a.constraints;
  s.constraints_rhs = b.constraints + a.arcs * T + pwl_rows;
  s.variables_bound = b.variables + 2 * (b.arcs + hidden) * T + pwl_vars;
  s.constraints_bound = b.constraints + (b.arcs + hidden) * T + pwl_rows;
  s.flow_a = a.flow_variables;
  s.flow_b = b.flow_variables;
  return s;
}

std::vector<CoverageGap> audit_coverage(const MipProgram& program, const NetworkGraph& g, bool port_form) {
  std::set<std::tuple<std::string, int, int>> present;
  for (const auto& c : program.constraints)
    if (!c.redundant) present.insert({c.origin, static_cast<int>(c.family), c.step});

  const int T = g.grid.step_count;
  std::vector<CoverageGap> gaps;
  auto expect = [&](const std::string& origin, RowFamily family, int first, int last) {
    for (int t = first; t < last; ++t)
      if (!present.count({origin, static_cast<int>(family), t})) gaps.push_back(CoverageGap{origin, family, t});
  };

  Incidence inc(g);
  auto is_info = [&](const Arc& a) {
    const auto* r = g.find_resource(a.resource);
    return r && r->kind == ResourceKind::information;
  };
  std::set<std::string> groups_seen;
  for (const auto& n : g.nodes) {
    const bool has_arcs = !inc.in_arcs(n.id).empty() || !inc.out_arcs(n.id).empty();
    switch (n.kind()) {
      case NodeKind::balance:
      case NodeKind::market:
        if (has_arcs) expect(n.id, RowFamily::balance, 0, T);
        break;
      case NodeKind::demand: expect(n.id, RowFamily::balance, 0, T); break;
      case NodeKind::storage: expect(n.id, RowFamily::storage, 0, T); break;
      case NodeKind::objective: break;
      case NodeKind::unit: {
        expect(n.id, RowFamily::conversion, 0, T);
        expect(n.id, RowFamily::capacity, 0, T);
        const std::string gid = group_of(n);
        if (!groups_seen.insert(gid).second) break;
        const auto& u = n.unit();
        expect(gid, RowFamily::activation, 0, T);
        if (u.min_up_steps >= 1) expect(gid, RowFamily::min_up, 0, T);
        if (u.min_down_steps >= 1) expect(gid, RowFamily::min_down, 0, T);
        std::set<std::string> members;
        for (const auto& m : g.nodes)
          if (m.is(NodeKind::unit) && group_of(m) == gid) members.insert(m.id);
        bool outputs = false;
        for (const auto& m : members)
          for (const Arc* a : inc.out_arcs(m))
            if (!members.count(a->head) && !is_info(*a)) outputs = true;
        if (outputs && std::isfinite(u.ramp_up)) expect(gid, RowFamily::ramp_up, 0, T - 1);
        if (outputs && std::isfinite(u.ramp_down)) expect(gid, RowFamily::ramp_down, 0, T - 1);
        break;
      }
    }
  }
  if (port_form)
    for (const auto& a : g.arcs) {
      expect(a.id, RowFamily::arc_identity, 0, T);
      const Node* tail = g.find_node(a.tail);
      if (is_info(a) && tail && !tail->is(NodeKind::balance)) expect(a.tail, RowFamily::information, 0, T);
    }
  return gaps;
}

}  // namespace mesmix
