#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "mesmix/error.hpp"
#include "mesmix/instance_io.hpp"
#include "mesmix/mip_io.hpp"
#include "mesmix/model_a.hpp"
#include "mesmix/model_b.hpp"
#include "mesmix/report.hpp"
#include "mesmix/scenario.hpp"
#include "mesmix/solve.hpp"

using namespace mesmix;
using nlohmann::json;

namespace {

enum Exit { ok = 0, usage = 1, invalid = 2, solve_failed = 3, not_equivalent = 4 };

struct Options {
  std::string input;
  std::string model = "b";
  std::string format;
  std::string out;
  std::string season = "onset";
  std::uint64_t seed = 1;
  int steps = 186;
  bool lex = false;
  bool as_json = false;
  bool log = false;
  bool hash_names = false;
  bool redundant_extras = false;
  long node_limit = 1'000'000;
};

void emit(const Options& o, const std::string& text) {
  if (o.out.empty())
    std::cout << text;
  else
    write_text(o.out, text);
}

json versioned(json body) {
  json doc{{"schema_version", kSchemaVersion}};
  doc.update(body);
  return doc;
}

NetworkGraph load_valid(const Options& o) {
  NetworkGraph g = load_instance(o.input);
  const auto violations = validate_instance(g);
  if (!violations.empty()) {
    std::ostringstream msg;
    for (const auto& v : violations) msg << "\n  " << v.code << " " << v.subject << ": " << v.detail;
    throw InvalidInstance(o.input + msg.str());
  }
  return g;
}

SolveConfig solve_config(const Options& o) {
  SolveConfig c;
  c.node_limit = o.node_limit;
  return c;
}

MipProgram compile(const Options& o, const NetworkGraph& g) {
  const ModelAGraph ma = build_model_a(g);
  if (o.model == "a") return compile_model_a(ma, CompileOptions{o.redundant_extras});
  return compile_model_b(flatten(ma));
}

std::string format_vector(const std::array<double, 3>& f) {
  std::ostringstream s;
  s.precision(12);
  s << "(" << f[0] << ", " << f[1] << ", " << f[2] << ")";
  return s.str();
}

int cmd_validate(const Options& o) {
  const NetworkGraph g = load_instance(o.input);
  const auto violations = validate_instance(g);
  if (o.as_json) {
    json list = json::array();
    for (const auto& v : violations) list.push_back({{"code", v.code}, {"subject", v.subject}, {"detail", v.detail}});
    emit(o, dump_json(versioned({{"instance", g.name}, {"valid", violations.empty()}, {"violations", list}})));
  } else {
    std::ostringstream s;
    for (const auto& v : violations) s << v.code << " " << v.subject << ": " << v.detail << "\n";
    s << (violations.empty() ? "valid" : "invalid") << " (" << violations.size() << " violations)\n";
    emit(o, s.str());
  }
  return violations.empty() ? ok : invalid;
}

int cmd_build(const Options& o) {
  const ModelAGraph ma = build_model_a(load_valid(o));
  json frames = json::array();
  for (const auto& f : ma.frames)
    frames.push_back({{"container", f.container}, {"in_node", f.in_node}, {"out_node", f.out_node},
                      {"outer_in_arc", f.outer_in_arc}, {"inner_in_arc", f.inner_in_arc},
                      {"inner_out_arc", f.inner_out_arc}, {"outer_out_arc", f.outer_out_arc}});
  json graph = instance_to_json(ma.base);
  graph.erase("schema_version");
  emit(o, dump_json(versioned({{"model", "a"}, {"graph", graph}, {"frames", frames},
                               {"subcomponents", ma.subcomponents}, {"ports", ma.ports.size()}})));
  return ok;
}

int cmd_reduce(const Options& o) {
  const ModelBGraph mb = flatten(build_model_a(load_valid(o)));
  json graph = instance_to_json(mb.base);
  graph.erase("schema_version");
  json doc = versioned({{"model", "b"}, {"graph", graph}, {"merged_units", mb.merged_units},
                        {"eliminated_curves", mb.eliminated_curves}});
  if (o.log) doc["contraction_log"] = contraction_log_to_json(mb.contraction_log);
  emit(o, dump_json(doc));
  return ok;
}

int cmd_compile(const Options& o) {
  const NetworkGraph g = load_valid(o);
  const MipProgram p = compile(o, g);
  if (o.format.empty()) {
    const ModelAGraph ma = build_model_a(g);
    const ModelBGraph mb = flatten(ma);
    const SizeReport r = o.model == "a" ? size_report(p, ma, mb) : size_report(p, mb);
    emit(o, dump_json(versioned({{"model", o.model}, {"size", size_report_to_json(r)}})));
    return ok;
  }
  if (o.format == "lp") {
    const std::string text = export_lp(p);
    const MipProgram back = read_lp(text);
    if (back.variables.size() != p.variables.size() || back.constraints.size() != p.constraints.size())
      throw InvalidInstance("LP export does not read back to the same program size");
    emit(o, text);
    return ok;
  }
  const MpsExport e = export_mps(p, MpsOptions{o.hash_names});
  const MipProgram back = read_mps(e.text);
  if (back.variables.size() != p.variables.size() || back.constraints.size() != p.constraints.size())
    throw InvalidInstance("MPS export does not read back to the same program size");
  emit(o, e.text);
  if (o.hash_names && !o.out.empty()) write_text(o.out + ".names.json", name_map_json(e));
  return ok;
}

int cmd_solve(const Options& o) {
  const MipProgram p = compile(o, load_valid(o));
  const SolveConfig cfg = solve_config(o);
  const Solution s = o.lex ? solve_lexicographic(p, cfg) : solve_mip(p, cfg);
  if (o.as_json || !o.out.empty()) {
    json doc = versioned({{"model", o.model}, {"lexicographic", o.lex}});
    doc.update(solution_to_json(p, s));
    emit(o, dump_json(doc));
  } else {
    std::ostringstream t;
    t << "status " << to_string(s.status) << "\n";
    t << "objective vector " << format_vector(s.objective_vector) << "\n";
    for (const auto& st : s.stages)
      t << "  stage f" << st.objective << " " << to_string(st.status) << " optimum " << st.optimum << " nodes "
        << st.nodes << "\n";
    t << "nodes " << s.nodes << ", lp iterations " << s.lp_iterations << "\n";
    emit(o, t.str());
  }
  return s.status == SolveStatus::Optimal ? ok : solve_failed;
}

std::string size_table(const ComparisonReport& r) {
  std::ostringstream t;
  auto line = [&](const char* what, long a, long b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-12s %10ld %10ld %9.1f%%\n", what, a, b, 100.0 * ComparisonReport::reduction(a, b));
    t << buf;
  };
  t << "instance " << r.instance << "\n";
  t << "               model A    model B reduction\n";
  line("nodes", r.size_a.nodes, r.size_b.nodes);
  line("arcs", r.size_a.arcs, r.size_b.arcs);
  line("variables", r.size_a.variables, r.size_b.variables);
  line("constraints", r.size_a.constraints, r.size_b.constraints);
  line("binaries", r.size_a.binaries, r.size_b.binaries);
  const auto& s = r.identities;
  t << "variable identity  " << s.variables_lhs << " = " << s.variables_rhs << " (slack " << s.variables_slack() << ")\n";
  t << "constraint identity " << s.constraints_lhs << " = " << s.constraints_rhs << " (slack "
    << s.constraints_slack() << ")\n";
  t << "flow variables " << s.flow_a << " vs 2 x " << s.flow_b << (s.flow_ratio_holds() ? " (holds)" : " (differs)")
    << "\n";
  t << "coverage gaps A " << r.coverage_a.size() << ", B " << r.coverage_b.size() << "\n";
  return t.str();
}

int cmd_compare(const Options& o, bool run_solver) {
  CompareConfig cfg;
  cfg.solve = solve_config(o);
  cfg.compile.redundant_extras = o.redundant_extras;
  cfg.run_solver = run_solver;
  const ComparisonReport r = run_compare(load_valid(o), cfg);
  if (o.as_json || !o.out.empty()) {
    emit(o, dump_json(comparison_to_json(r)));
  } else {
    std::string t = size_table(r);
    if (r.solved) {
      t += "model A " + std::string(to_string(r.solution_a.status)) + " " + format_vector(r.solution_a.objective_vector) + "\n";
      t += "model B " + std::string(to_string(r.solution_b.status)) + " " + format_vector(r.solution_b.objective_vector) + "\n";
      t += std::string("objective vectors agree: ") + (r.objectives_agree ? "true" : "false") + "\n";
    }
    emit(o, t);
  }
  if (!r.coverage_a.empty() || !r.coverage_b.empty()) return not_equivalent;
  if (!r.solved) return ok;
  if (r.solution_a.status != SolveStatus::Optimal || r.solution_b.status != SolveStatus::Optimal)
    return r.objectives_agree ? solve_failed : not_equivalent;
  return r.objectives_agree ? ok : not_equivalent;
}

int cmd_gen(const Options& o) {
  ScenarioSpec spec;
  const auto season = season_from_string(o.season);
  if (!season) throw CLI::ValidationError("--season", "unknown season " + o.season);
  spec.season = *season;
  spec.seed = o.seed;
  spec.step_count = o.steps;
  emit(o, dump_json(instance_to_json(generate_instance(spec))));
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical and flat unit commitment models for multi-energy networks"};
  app.require_subcommand(1);
  Options o;

  auto input = [&](CLI::App* c) { c->add_option("--input", o.input, "instance JSON")->required()->check(CLI::ExistingFile); };
  auto out = [&](CLI::App* c) { c->add_option("--out", o.out, "output file (default stdout)"); };
  auto as_json = [&](CLI::App* c) { c->add_flag("--json", o.as_json, "machine-readable output"); };
  auto model = [&](CLI::App* c) {
    c->add_option("--model", o.model, "a (hierarchical) or b (flat)")->check(CLI::IsMember({"a", "b"}));
    c->add_flag("--redundant-extras", o.redundant_extras, "keep the duplicated arc bound rows of model A");
  };
  auto limits = [&](CLI::App* c) { c->add_option("--node-limit", o.node_limit, "branch-and-bound node limit"); };

  auto* validate = app.add_subcommand("validate", "check an instance file");
  input(validate), out(validate), as_json(validate);
  auto* build = app.add_subcommand("build", "write the hierarchical graph");
  input(build), out(build);
  auto* reduce = app.add_subcommand("reduce", "write the flat graph");
  input(reduce), out(reduce);
  reduce->add_flag("--log", o.log, "include the contraction log");
  auto* comp = app.add_subcommand("compile", "compile to a MIP and print sizes or export it");
  input(comp), out(comp), model(comp);
  comp->add_option("--export", o.format, "mps or lp")->check(CLI::IsMember({"mps", "lp"}));
  comp->add_flag("--hash-names", o.hash_names, "hash names longer than 8 characters in MPS output");
  auto* solve = app.add_subcommand("solve", "solve one compilation");
  input(solve), out(solve), as_json(solve), model(solve), limits(solve);
  solve->add_flag("--lex", o.lex, "lexicographic f1, f2, f3 instead of f1 alone");
  auto* compare = app.add_subcommand("compare", "solve both compilations and compare");
  input(compare), out(compare), as_json(compare), limits(compare);
  compare->add_flag("--redundant-extras", o.redundant_extras, "keep the duplicated arc bound rows of model A");
  auto* gen = app.add_subcommand("gen", "generate a synthetic district heating instance");
  out(gen);
  gen->add_option("--season", o.season, "onset, midseason or conclusion")
      ->check(CLI::IsMember({"onset", "midseason", "conclusion"}));
  gen->add_option("--seed", o.seed, "random seed");
  gen->add_option("--steps", o.steps, "number of 4 h steps")->check(CLI::PositiveNumber);
  auto* report = app.add_subcommand("report", "size comparison of both models without solving");
  input(report), out(report), as_json(report);
  report->add_flag("--redundant-extras", o.redundant_extras, "keep the duplicated arc bound rows of model A");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*build) return cmd_build(o);
    if (*reduce) return cmd_reduce(o);
    if (*comp) return cmd_compile(o);
    if (*solve) return cmd_solve(o);
    if (*compare) return cmd_compare(o, true);
    if (*gen) return cmd_gen(o);
    if (*report) return cmd_compare(o, false);
  } catch (const InvalidInstance& e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.stage() == "validate") return invalid;
    return e.stage() == "solve" ? solve_failed : usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  }
  return usage;
}
