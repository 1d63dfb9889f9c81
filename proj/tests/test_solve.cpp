#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "fixtures.hpp"
#include "mesmix/mip.hpp"
#include "mesmix/model_a.hpp"
#include "mesmix/model_b.hpp"
#include "mesmix/solve.hpp"

using namespace mesmix;
using namespace mesmix::testing;

namespace {

struct Pair {
  MipProgram a;
  MipProgram b;
};

Pair compile_pair(const NetworkGraph& g) {
  const auto ma = build_model_a(g);
  return {compile_model_a(ma), compile_model_b(flatten(ma))};
}

bool close(double x, double y, double tol) { return std::abs(x - y) <= tol * std::max(1.0, std::max(std::abs(x), std::abs(y))); }

bool pwl_family(const MipVariable& v) {
  return v.family == VarFamily::pwl_lambda || v.family == VarFamily::pwl_segment_binary;
}

/// Feasibility of `target` once every variable named in `fixed` takes its value.
bool completes(MipProgram target, const std::map<std::string, double>& fixed) {
  for (auto& v : target.variables) {
    auto it = fixed.find(v.name);
    if (it == fixed.end()) continue;
    v.lower = v.upper = it->second;
  }
  for (auto& f : target.objectives) f = LinearExpr{};
  SolveConfig c;
  c.node_limit = 20000;
  return solve_mip(target, c).status == SolveStatus::Optimal;
}

std::map<std::string, double> shared_values(const MipProgram& from, const std::vector<double>& values,
                                            const MipProgram& to) {
  std::map<std::string, double> out;
  for (std::size_t j = 0; j < from.variables.size(); ++j) {
    const auto& v = from.variables[j];
    if (pwl_family(v)) continue;
    const double x = std::abs(values[j]) < 1e-10 ? 0.0 : values[j];
    if (v.name.rfind("x_", 0) == 0) {
      out["xo_" + v.name.substr(2)] = x;
      out["xi_" + v.name.substr(2)] = x;
    } else if (v.name.rfind("xo_", 0) == 0) {
      out["x_" + v.name.substr(3)] = x;
    } else if (v.name.rfind("xi_", 0) != 0) {
      out[v.name] = x;
    }
  }
  std::erase_if(out, [&](const auto& kv) { return to.find(kv.first) < 0; });
  return out;
}

}  // namespace

TEST_SUITE("solve") {
  TEST_CASE("single unit buys ten units of fuel") {
    const auto p = compile_pair(single_unit());
    for (const MipProgram* prog : {&p.a, &p.b}) {
      const auto s = solve_lexicographic(*prog);
      REQUIRE(s.status == SolveStatus::Optimal);
      CHECK(s.objective_vector[0] == doctest::Approx(10.0));
      CHECK(s.value(*prog, "z_u_t0") == doctest::Approx(1.0));
      CHECK(s.value(*prog, "buy_m_t0") == doctest::Approx(10.0));
      CHECK(brute_force(*prog).objective_vector[0] == doctest::Approx(10.0));
    }
  }

  TEST_CASE("demand above capacity is infeasible") {
    auto g = single_unit();
    std::get<Demand>(g.nodes[2].data).demand = {11.0};
    const auto p = compile_pair(g);
    CHECK(solve_lexicographic(p.a).status == SolveStatus::Infeasible);
    CHECK(solve_lexicographic(p.b).failed_stage == 1);
    CHECK(brute_force(p.b).status == SolveStatus::Infeasible);
  }

  TEST_CASE("cost tie is broken by emissions") {
    const auto p = compile_pair(cost_tie());
    for (const MipProgram* prog : {&p.a, &p.b}) {
      const auto s = solve_lexicographic(*prog);
      REQUIRE(s.status == SolveStatus::Optimal);
      CHECK(s.objective_vector[0] == doctest::Approx(20.0));
      CHECK(s.objective_vector[1] == doctest::Approx(0.5));
      CHECK(s.value(*prog, "buy_bio_market_t0") == doctest::Approx(10.0));
      CHECK(s.value(*prog, "z_b1_t0") == doctest::Approx(0.0).epsilon(1e-6));
      const auto bf = brute_force(*prog);
      CHECK(bf.objective_vector[1] == doctest::Approx(0.5));
      REQUIRE(s.stages.size() == 3);
      CHECK(s.stages[1].optimum == doctest::Approx(0.5));
    }
  }

  TEST_CASE("brute force without binaries equals the LP") {
    MipProgram p;
    const int x = p.add_variable({"x", VarFamily::flow_arc, false, 0.0, 4.0});
    const int y = p.add_variable({"y", VarFamily::flow_arc, false, 0.0, 4.0});
    p.add_constraint({"c", {{x, 1.0}, {y, 2.0}}, Sense::ge, 3.0});
    p.objectives[0].terms = {{x, 1.0}, {y, 1.0}};
    CHECK(brute_force(p).objective_vector[0] == doctest::Approx(solve_lp(p).objective_vector[0]));
  }

  TEST_CASE("brute force finds the only feasible assignment") {
    MipProgram p;
    const int a = p.add_variable({"a", VarFamily::status, true, 0.0, 1.0});
    const int b = p.add_variable({"b", VarFamily::status, true, 0.0, 1.0});
    p.add_constraint({"c1", {{a, 1.0}, {b, -1.0}}, Sense::ge, 1.0});
    p.objectives[0].terms = {{b, 1.0}};
    const auto s = brute_force(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.values[static_cast<std::size_t>(a)] == 1.0);
    CHECK(s.values[static_cast<std::size_t>(b)] == 0.0);
    CHECK(solve_mip(p).values == s.values);
  }

  TEST_CASE("enumeration cap") {
    MipProgram p;
    for (int k = 0; k < 21; ++k) p.add_variable({"b" + std::to_string(k), VarFamily::status, true, 0.0, 1.0});
    CHECK_THROWS_AS(brute_force(p), TooManyBinaries);
  }

  TEST_CASE("branch and bound matches enumeration on tiny instances") {
    for (int s = 0; s < 10; ++s) {
      const auto p = compile_pair(oracle_instance(s));
      for (const MipProgram* prog : {&p.a, &p.b}) {
        const auto x = solve_lexicographic(*prog);
        const auto y = brute_force(*prog);
        REQUIRE(x.status == y.status);
        if (x.status != SolveStatus::Optimal) continue;
        for (std::size_t k = 0; k < 3; ++k) {
          CHECK(close(x.objective_vector[k], y.objective_vector[k], 1e-8));
          CHECK(close(x.stages[k].optimum, y.stages[k].optimum, 1e-8));
        }
      }
    }
  }

  TEST_CASE("relaxation bounds the integer optimum") {
    for (int s = 0; s < 15; ++s) {
      const auto p = compile_pair(oracle_instance(s));
      for (const MipProgram* prog : {&p.a, &p.b}) {
        const auto lp = solve_lp(*prog);
        const auto mip = solve_mip(*prog);
        if (mip.status != SolveStatus::Optimal) continue;
        REQUIRE(lp.status == SolveStatus::Optimal);
        CHECK(lp.objective_vector[0] <= mip.objective_vector[0] + 1e-7);
      }
    }
  }

  TEST_CASE("stage caps hold and solutions pass the audit") {
    for (int s = 0; s < 12; ++s) {
      const auto p = compile_pair(corpus_instance(s * 4 + 1));
      const auto sol = solve_lexicographic(p.b);
      if (sol.status != SolveStatus::Optimal) continue;
      CHECK(audit_solution(p.b, sol.values).empty());
      CHECK(sol.evaluated[0] <= sol.stages[0].optimum + sol.stages[0].epsilon + 1e-9);
      CHECK(sol.evaluated[1] <= sol.stages[1].optimum + sol.stages[1].epsilon + 1e-9);
      CHECK(sol.evaluated[2] == doctest::Approx(sol.objective_vector[2]));
    }
  }

  TEST_CASE("solving twice gives identical values") {
    const auto p = compile_pair(corpus_instance(5));
    const auto x = solve_lexicographic(p.a);
    const auto y = solve_lexicographic(p.a);
    CHECK(x.values == y.values);
    CHECK(x.nodes == y.nodes);
    CHECK(x.lp_iterations == y.lp_iterations);
  }

  TEST_CASE("flat solutions lift to port form and port solutions project") {
    for (int s = 0; s < 10; ++s) {
      const auto p = compile_pair(oracle_instance(s));
      const auto xb = solve_lexicographic(p.b);
      const auto xa = solve_lexicographic(p.a);
      if (xb.status != SolveStatus::Optimal) continue;
      REQUIRE(xa.status == SolveStatus::Optimal);
      CHECK(completes(p.a, shared_values(p.b, xb.values, p.a)));
      CHECK(completes(p.b, shared_values(p.a, xa.values, p.b)));
    }
  }

  TEST_CASE("node limit is reported") {
    const auto p = compile_pair(corpus_instance(0));
    SolveConfig c;
    c.node_limit = 1;
    const auto s = solve_mip(p.b, c);
    CHECK(s.status == SolveStatus::NodeLimit);
  }
}
