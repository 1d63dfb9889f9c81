#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "mesmix/model_a.hpp"
#include "mesmix/model_b.hpp"
#include "mesmix/network.hpp"

namespace mesmix {

enum class VarFamily {
  flow_port_in,
  flow_port_out,
  flow_arc,
  status,
  change,
  storage_level,
  purchase,
  sale,
  pwl_lambda,
  pwl_segment_binary,
};

enum class RowFamily {
  balance,
  conversion,
  activation,
  min_up,
  min_down,
  ramp_up,
  ramp_down,
  storage,
  capacity,
  arc_identity,
  information,
};

enum class Sense { le, eq, ge };

const char* to_string(VarFamily f);
const char* to_string(RowFamily f);
const char* to_string(Sense s);

struct MipVariable {
  std::string name;
  VarFamily family = VarFamily::flow_arc;
  bool binary = false;
  double lower = 0.0;
  double upper = kInf;
};

struct Term {
  int var = -1;
  double coef = 0.0;
};

struct LinearExpr {
  std::vector<Term> terms;
  double constant = 0.0;
};

struct LinearConstraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::eq;
  double rhs = 0.0;
  RowFamily family = RowFamily::balance;
  std::string origin;  // node, group or arc id the row belongs to
  int step = -1;
  bool redundant = false;  // duplicated bound kept on purpose
};

struct MipProgram {
  std::string name;
  std::vector<MipVariable> variables;
  std::vector<LinearConstraint> constraints;
  std::array<LinearExpr, 3> objectives;  // costs, emissions, negated CHP heat

  /// Index of the variable with this name, or -1.
  int find(const std::string& name) const;
  int add_variable(MipVariable v);
  /// Adds a row after merging repeated variables and dropping zero coefficients.
  int add_constraint(LinearConstraint c);
  int binary_count() const;

 private:
  std::map<std::string, int> index_;
};

struct CompileOptions {
  // Adds an explicit upper-bound row on both port variables of every arc (hierarchical form only).
  bool redundant_extras = false;
};

/// Incremental piecewise-linear encoding of x_out = curve(x_in) switched by z.
///
/// Adds curve.size()-1 fill variables and as many ordering binaries, plus
/// 2*curve.size()-1 rows. Fill variables vanish with z = 0 only together with
/// the capacity coupling of the unit's arcs.
void encode_pwl(MipProgram& program, const std::string& prefix, const std::string& origin, int step,
                const Curve& curve, const LinearExpr& x_in, const LinearExpr& x_out, int z_var);

MipProgram compile_model_a(const ModelAGraph& ma, const CompileOptions& options = {});
MipProgram compile_model_b(const ModelBGraph& mb);

struct SizeReport {
  long nodes = 0;
  long arcs = 0;
  long containers = 0;
  long info_nodes = 0;
  long info_arcs = 0;
  long subcomponents = 0;
  long eliminated_curves = 0;
  long breakpoints = 0;  // common breakpoint count per curve, 0 when curves differ
  long steps = 0;
  long variables = 0;
  long constraints = 0;
  long flow_variables = 0;
  long binaries = 0;
  std::map<std::string, long> variables_by_family;
  std::map<std::string, long> constraints_by_family;
};

SizeReport size_report(const MipProgram& program, const ModelAGraph& ma, const ModelBGraph& mb);
SizeReport size_report(const MipProgram& program, const ModelBGraph& mb);

/// The graph and program size relations between the two forms of one instance.
///
/// Per-arc and per-curve quantities are counted once per time step.
struct SizeIdentities {
  long graph_nodes_slack = 0;  // |V_A| - (|V_B| + 2|C| + info nodes + s)
  long graph_arcs_slack = 0;   // |A_A| - (|A_B| + 2|C| + info arcs + s)
  long variables_lhs = 0;      // n_A
  long variables_rhs = 0;      // n_B + 2|A_A|T + 2mu(rho-1)T
  long constraints_lhs = 0;    // m_A
  long constraints_rhs = 0;    // m_B + |A_A|T + mu(2rho-1)T
  long variables_bound = 0;    // n_B + 2(|A_B| + 2|C| + info arcs + s)T + 2mu(rho-1)T
  long constraints_bound = 0;  // m_B + (|A_B| + 2|C| + info arcs + s)T + mu(2rho-1)T
  long flow_a = 0;
  long flow_b = 0;

  long variables_slack() const { return variables_lhs - variables_rhs; }
  long constraints_slack() const { return constraints_lhs - constraints_rhs; }
  bool graph_inequalities_hold() const { return graph_nodes_slack >= 0 && graph_arcs_slack >= 0; }
  bool identities_hold() const { return variables_slack() == 0 && constraints_slack() == 0; }
  bool inequalities_hold() const {
    return variables_lhs >= variables_bound && constraints_lhs >= constraints_bound;
  }
  bool flow_ratio_holds() const { return flow_a == 2 * flow_b; }
};

SizeIdentities size_identities(const SizeReport& a, const SizeReport& b);

struct CoverageGap {
  std::string origin;
  RowFamily family = RowFamily::balance;
  int step = -1;
};

/// Families each node, group or arc of `g` needs, checked against the program rows.
std::vector<CoverageGap> audit_coverage(const MipProgram& program, const NetworkGraph& g, bool port_form);

}  // namespace mesmix
