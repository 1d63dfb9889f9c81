#include "mesmix/report.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>

#include "mesmix/instance_io.hpp"
#include "mesmix/model_a.hpp"

namespace mesmix {

using nlohmann::json;

namespace {

template <class F>
auto labelled(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

json objective_array(const std::array<double, 3>& v) { return json::array({v[0], v[1], v[2]}); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// "z_<group>_t<k>" -> ("<group>", k)
bool split_step_name(const std::string& name, const std::string& prefix, std::string& subject, int& step) {
  if (name.rfind(prefix, 0) != 0) return false;
  const auto at = name.rfind("_t");
  if (at == std::string::npos || at < prefix.size()) return false;
  subject = name.substr(prefix.size(), at - prefix.size());
  step = std::stoi(name.substr(at + 2));
  return true;
}

}  // namespace

double relative_difference(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

ComparisonReport run_compare(const NetworkGraph& instance, const CompareConfig& config) {
  ComparisonReport r;
  r.instance = instance.name;
  labelled("validate", [&] {
    const auto violations = validate_instance(instance);
    if (!violations.empty())
      throw InvalidInstance(violations.front().code + " " + violations.front().subject + " " +
                            violations.front().detail);
    return 0;
  });
  const ModelAGraph ma = labelled("build", [&] { return build_model_a(instance); });
  const ModelBGraph mb = labelled("reduce", [&] { return flatten(ma); });
  const MipProgram pa = labelled("compile", [&] { return compile_model_a(ma, config.compile); });
  const MipProgram pb = labelled("compile", [&] { return compile_model_b(mb); });

  r.size_a = size_report(pa, ma, mb);
  r.size_b = size_report(pb, mb);
  r.identities = size_identities(r.size_a, r.size_b);
  r.coverage_a = audit_coverage(pa, ma.base, true);
  r.coverage_b = audit_coverage(pb, mb.base, false);
  if (!config.run_solver) return r;

  auto solve = [&](const MipProgram& p) { return labelled("solve", [&] { return solve_lexicographic(p, config.solve); }); };
  if (config.concurrent) {
    auto fa = std::async(std::launch::async, solve, std::cref(pa));
    r.solution_b = solve(pb);
    r.solution_a = fa.get();
  } else {
    r.solution_a = solve(pa);
    r.solution_b = solve(pb);
  }
  r.solved = true;
  r.objectives_agree =
      r.solution_a.status == SolveStatus::Optimal && r.solution_b.status == SolveStatus::Optimal;
  for (int k = 0; k < 3; ++k) {
    r.relative_difference[k] = relative_difference(r.solution_a.objective_vector[k], r.solution_b.objective_vector[k]);
    if (!(r.relative_difference[k] <= config.agreement_tolerance)) r.objectives_agree = false;
  }
  if (r.solution_a.status != r.solution_b.status) r.objectives_agree = false;
  if (r.solution_a.status == r.solution_b.status && r.solution_a.status == SolveStatus::Infeasible)
    r.objectives_agree = true;
  return r;
}

json size_report_to_json(const SizeReport& r) {
  return {{"nodes", r.nodes},
          {"arcs", r.arcs},
          {"containers", r.containers},
          {"info_nodes", r.info_nodes},
          {"info_arcs", r.info_arcs},
          {"subcomponents", r.subcomponents},
          {"eliminated_curves", r.eliminated_curves},
          {"breakpoints", r.breakpoints},
          {"steps", r.steps},
          {"variables", r.variables},
          {"constraints", r.constraints},
          {"flow_variables", r.flow_variables},
          {"binaries", r.binaries},
          {"variables_by_family", r.variables_by_family},
          {"constraints_by_family", r.constraints_by_family}};
}

json size_identities_to_json(const SizeIdentities& s) {
  return {{"graph_nodes_slack", s.graph_nodes_slack},
          {"graph_arcs_slack", s.graph_arcs_slack},
          {"graph_inequalities_hold", s.graph_inequalities_hold()},
          {"variables", {{"lhs", s.variables_lhs}, {"rhs", s.variables_rhs}, {"slack", s.variables_slack()},
                         {"bound", s.variables_bound}}},
          {"constraints", {{"lhs", s.constraints_lhs}, {"rhs", s.constraints_rhs}, {"slack", s.constraints_slack()},
                           {"bound", s.constraints_bound}}},
          {"identities_hold", s.identities_hold()},
          {"inequalities_hold", s.inequalities_hold()},
          {"flow_variables", {{"a", s.flow_a}, {"b", s.flow_b}, {"ratio_holds", s.flow_ratio_holds()}}}};
}

json coverage_to_json(const std::vector<CoverageGap>& gaps) {
  json out = json::array();
  for (const auto& g : gaps) out.push_back({{"origin", g.origin}, {"family", to_string(g.family)}, {"step", g.step}});
  return out;
}

json contraction_log_to_json(const std::vector<ReductionStep>& log) {
  json out = json::array();
  for (const auto& s : log) {
    json added_nodes = json::array(), added_arcs = json::array();
    for (const auto& n : s.added_nodes) added_nodes.push_back(node_to_json(n));
    for (const auto& a : s.added_arcs) added_arcs.push_back(arc_to_json(a));
    out.push_back({{"kind", to_string(s.kind)},
                   {"subject", s.subject},
                   {"removed_nodes", s.removed_nodes},
                   {"removed_arcs", s.removed_arcs},
                   {"added_nodes", added_nodes},
                   {"added_arcs", added_arcs},
                   {"eliminated_curves", s.eliminated_curves}});
  }
  return out;
}

json solution_to_json(const MipProgram& program, const Solution& s) {
  json doc;
  doc["status"] = to_string(s.status);
  doc["objective_vector"] = objective_array(s.objective_vector);
  doc["evaluated"] = objective_array(s.evaluated);
  json stages = json::array();
  for (const auto& st : s.stages)
    stages.push_back({{"objective", st.objective},
                      {"optimum", number_or_null(st.optimum)},
                      {"epsilon", st.epsilon},
                      {"status", to_string(st.status)},
                      {"nodes", st.nodes}});
  doc["stages"] = stages;
  doc["failed_stage"] = s.failed_stage;
  doc["nodes"] = s.nodes;
  doc["lp_iterations"] = s.lp_iterations;

  std::map<std::string, std::vector<double>> commitment, storage;
  json values = json::object();
  if (s.values.size() == program.variables.size()) {
    for (std::size_t j = 0; j < program.variables.size(); ++j) {
      const auto& v = program.variables[j];
      values[v.name] = s.values[j];
      std::string subject;
      int step = 0;
      auto put = [&](std::map<std::string, std::vector<double>>& m) {
        auto& row = m[subject];
        if (row.size() <= static_cast<std::size_t>(step)) row.resize(static_cast<std::size_t>(step) + 1, 0.0);
        row[static_cast<std::size_t>(step)] = s.values[j];
      };
      if (v.family == VarFamily::status && split_step_name(v.name, "z_", subject, step)) put(commitment);
      if (v.family == VarFamily::storage_level && split_step_name(v.name, "h_", subject, step)) put(storage);
    }
  }
  doc["commitment"] = commitment;
  doc["storage_level"] = storage;
  doc["values"] = values;
  return doc;
}

json comparison_to_json(const ComparisonReport& r) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["instance"] = r.instance;
  doc["size"] = {{"a", size_report_to_json(r.size_a)}, {"b", size_report_to_json(r.size_b)}};
  doc["reduction"] = {{"nodes", ComparisonReport::reduction(r.size_a.nodes, r.size_b.nodes)},
                      {"arcs", ComparisonReport::reduction(r.size_a.arcs, r.size_b.arcs)},
                      {"variables", ComparisonReport::reduction(r.size_a.variables, r.size_b.variables)},
                      {"constraints", ComparisonReport::reduction(r.size_a.constraints, r.size_b.constraints)}};
  doc["delta"] = {{"nodes", r.size_a.nodes - r.size_b.nodes},
                  {"arcs", r.size_a.arcs - r.size_b.arcs},
                  {"variables", r.size_a.variables - r.size_b.variables},
                  {"constraints", r.size_a.constraints - r.size_b.constraints}};
  doc["identities"] = size_identities_to_json(r.identities);
  doc["coverage"] = {{"a", coverage_to_json(r.coverage_a)}, {"b", coverage_to_json(r.coverage_b)}};
  doc["solved"] = r.solved;
  if (r.solved) {
    auto brief = [](const Solution& s) {
      json stages = json::array();
      for (const auto& st : s.stages)
        stages.push_back({{"objective", st.objective},
                          {"optimum", number_or_null(st.optimum)},
                          {"epsilon", st.epsilon},
                          {"status", to_string(st.status)},
                          {"nodes", st.nodes}});
      return json{{"status", to_string(s.status)},
                  {"objective_vector", objective_array(s.objective_vector)},
                  {"stages", stages},
                  {"nodes", s.nodes},
                  {"lp_iterations", s.lp_iterations}};
    };
    doc["solution"] = {{"a", brief(r.solution_a)}, {"b", brief(r.solution_b)}};
    doc["relative_difference"] = objective_array(r.relative_difference);
  }
  doc["objective_vectors_agree"] = r.solved ? json(r.objectives_agree) : json(nullptr);
  return doc;
}

}  // namespace mesmix
