#include <doctest.h>

#include "corpus.hpp"
#include "fixtures.hpp"
#include "mesmix/instance_io.hpp"
#include "mesmix/report.hpp"

using namespace mesmix;
using namespace mesmix::testing;

TEST_SUITE("report") {
  TEST_CASE("comparison of a small instance") {
    const auto r = run_compare(corpus_instance(1));
    CHECK(r.solved);
    CHECK(r.objectives_agree);
    CHECK(r.equivalent());
    CHECK(r.coverage_a.empty());
    CHECK(r.coverage_b.empty());
    CHECK(r.size_a.nodes > r.size_b.nodes);
    CHECK(ComparisonReport::reduction(r.size_a.variables, r.size_b.variables) > 0.0);
    const auto doc = comparison_to_json(r);
    CHECK(doc.at("schema_version") == kSchemaVersion);
    CHECK(doc.at("objective_vectors_agree") == true);
    for (const char* key : {"size", "reduction", "identities", "coverage", "solution"}) CHECK(doc.contains(key));
  }

  TEST_CASE("sizes without solving") {
    CompareConfig c;
    c.run_solver = false;
    const auto r = run_compare(corpus_instance(2), c);
    CHECK(!r.solved);
    CHECK(r.equivalent());
  }

  TEST_CASE("sequential and concurrent runs agree") {
    CompareConfig c;
    c.concurrent = false;
    const auto g = corpus_instance(4);
    const auto x = run_compare(g, c);
    const auto y = run_compare(g);
    CHECK(dump_json(comparison_to_json(x)) == dump_json(comparison_to_json(y)));
  }

  TEST_CASE("errors carry the failing step") {
    auto g = single_unit();
    g.arcs[0].head = "missing";
    try {
      run_compare(g);
      FAIL("expected StageError");
    } catch (const StageError& e) {
      CHECK(e.stage() == "validate");
    }
    auto h = single_unit();
    h.arcs[1].bounds.upper = kInf;
    try {
      run_compare(h);
      FAIL("expected StageError");
    } catch (const StageError& e) {
      CHECK(e.stage() == "compile");
    }
  }

  TEST_CASE("solution document lists schedules and storage") {
    const auto g = corpus_instance(2);
    const auto r = run_compare(g);
    REQUIRE(r.solution_b.status == SolveStatus::Optimal);
    const auto ma = build_model_a(g);
    const auto prog = compile_model_b(flatten(ma));
    const auto doc = solution_to_json(prog, r.solution_b);
    CHECK(doc.at("status") == "Optimal");
    CHECK(doc.at("objective_vector").size() == 3);
    CHECK(doc.at("stages").size() == 3);
    CHECK(!doc.at("commitment").empty());
    for (const auto& [group, schedule] : doc.at("commitment").items())
      CHECK(schedule.size() == static_cast<std::size_t>(g.grid.step_count));
    CHECK(doc.at("storage_level").contains("store"));
    CHECK(doc.at("values").size() == prog.variables.size());
  }

  TEST_CASE("relative difference") {
    CHECK(relative_difference(0.0, 0.5) == doctest::Approx(0.5));
    CHECK(relative_difference(100.0, 101.0) == doctest::Approx(1.0 / 101.0));
    CHECK(relative_difference(-3.0, -3.0) == 0.0);
  }
}
