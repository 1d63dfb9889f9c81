#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "corpus.hpp"
#include "fixtures.hpp"
#include "mesmix/model_b.hpp"
#include "oracles.hpp"

using namespace mesmix;
using namespace mesmix::testing;

namespace {

NetworkGraph chain_through_balance() {
  auto g = single_unit();
  g.nodes.push_back(Node{"hub", Balance{}});
  g.arcs[0].head = "hub";
  g.arcs.push_back(arc("a3", "hub", "u", "gas"));
  return g;
}

}  // namespace

TEST_SUITE("model_b") {
  TEST_CASE("contracting a degree-two balance node") {
    const auto g = chain_through_balance();
    REQUIRE(contractible(g, "hub"));
    const auto [h, step] = contract_balance(g, "hub");
    CHECK(h.nodes.size() == g.nodes.size() - 1);
    CHECK(h.arcs.size() == g.arcs.size() - 1);
    CHECK(step.kind == ReductionKind::ContractBalance);
    CHECK(step.removed_nodes == std::vector<std::string>{"hub"});
    CHECK(step.added_arcs.size() == 1);
    const Arc& joined = step.added_arcs.front();
    CHECK(joined.tail == "m");
    CHECK(joined.head == "u");
    CHECK(joined.resource == "gas");
    CHECK(h.find_node("hub") == nullptr);
    CHECK(same_graph(apply_step(g, step), h));
  }

  TEST_CASE("balance node with two inputs is not contractible") {
    const auto g = cost_tie();
    CHECK(!contractible(g, "heat_bus"));
    CHECK_THROWS_AS(contract_balance(g, "heat_bus"), NotContractible);
    CHECK_THROWS_AS(contract_balance(g, "b1"), NotContractible);
  }

  TEST_CASE("merging a turbine into a boiler multiplies the slopes") {
    const auto g = turbine_boiler();
    REQUIRE(mergeable(g, "turbine", "boiler"));
    const auto [h, step] = merge_units(g, "turbine", "boiler");
    const Node* merged = h.find_node(step.subject);
    REQUIRE(merged != nullptr);
    const auto& u = merged->unit();
    REQUIRE(u.conversions.size() == 1);
    const Curve& c = u.conversions[0].curve;
    for (int i = 0; i <= 100; ++i)
      CHECK(scan_eval(c, i) == doctest::Approx(0.36 * i).epsilon(1e-12));
    CHECK(u.min_up_steps == 5);
    CHECK(u.startup_cost == doctest::Approx(5.0));
    CHECK(u.ramp_up == doctest::Approx(20.0));
    CHECK(step.eliminated_curves == 1);
    CHECK(h.nodes.size() == g.nodes.size() - 1);
    CHECK(h.arcs.size() == g.arcs.size() - 1);
  }

  TEST_CASE("second input into the downstream unit blocks the merge") {
    auto g = turbine_boiler();
    g.nodes.push_back(Node{"m2", Market{"steam", {1.0, 1.0}, {0.0, 0.0}, 0.0}});
    g.arcs.push_back(arc("extra", "m2", "boiler", "steam"));
    CHECK(!mergeable(g, "turbine", "boiler"));
    CHECK_THROWS_AS(merge_units(g, "turbine", "boiler"), NotMergeable);
  }

  TEST_CASE("market and demand flatten to two nodes and one arc") {
    const auto mb = flatten(build_model_a(market_demand()));
    CHECK(mb.base.nodes.size() == 2);
    CHECK(mb.base.arcs.size() == 1);
    CHECK(std::none_of(mb.base.resources.begin(), mb.base.resources.end(),
                       [](const Resource& r) { return r.kind == ResourceKind::information; }));
    REQUIRE(!mb.objective_terms.empty());
    for (const auto& t : mb.objective_terms) CHECK(t.subject == "market");
  }

  TEST_CASE("flat forms carry no hierarchy") {
    for (int s = 0; s < kCorpusSize; ++s) {
      const auto mb = flatten(build_model_a(corpus_instance(s)));
      CHECK(mb.base.containers.empty());
      for (const auto& n : mb.base.nodes) CHECK(!n.is(NodeKind::objective));
      for (const auto& a : mb.base.arcs) CHECK(mb.base.find_resource(a.resource)->kind != ResourceKind::information);
      CHECK(validate_instance(mb.base).empty());
    }
  }

  TEST_CASE("replaying the log reproduces the flat graph") {
    for (int s = 0; s < kCorpusSize; ++s) {
      const auto ma = build_model_a(corpus_instance(s));
      const auto mb = flatten(ma);
      CHECK(same_graph(replay(ma.base, mb.contraction_log), mb.base));
    }
  }

  TEST_CASE("merged curves equal the composition of their parts") {
    for (int s = 0; s < kCorpusSize; ++s) {
      const auto ma = build_model_a(corpus_instance(s));
      NetworkGraph g = ma.base;
      for (const auto& step : flatten(ma).contraction_log) {
        if (step.kind == ReductionKind::MergeUnits) {
          const auto& first = g.find_node(step.removed_nodes[0])->unit().conversions.front();
          const auto& second = g.find_node(step.removed_nodes[1])->unit().conversions;
          const auto& merged = step.added_nodes.front().unit().conversions;
          REQUIRE(merged.size() == second.size());
          for (std::size_t k = 0; k < merged.size(); ++k) {
            double worst = 0.0;
            const Curve& f = first.curve;
            for (int i = 0; i < 1000; ++i) {
              const double x = f.source_min() + (f.source_max() - f.source_min()) * i / 999.0;
              worst = std::max(worst,
                               std::abs(scan_eval(merged[k].curve, x) - scan_eval(second[k].curve, scan_eval(f, x))));
            }
            CHECK(worst <= 1e-9);
          }
        }
        g = apply_step(g, step);
      }
    }
  }

  TEST_CASE("flatten is idempotent") {
    for (int s = 0; s < 20; ++s) {
      const auto mb = flatten(build_model_a(corpus_instance(s)));
      const auto again = flatten(lift_flat(mb.base));
      CHECK(again.contraction_log.empty());
      CHECK(same_graph(again.base, mb.base));
    }
  }

  TEST_CASE("containers flatten by removing their four elements") {
    for (int s = 0; s < kCorpusSize; ++s) {
      const auto ma = build_model_a(corpus_instance(s));
      const auto mb = flatten(ma);
      long flattened = 0;
      for (const auto& step : mb.contraction_log) {
        if (step.kind != ReductionKind::FlattenContainer) continue;
        ++flattened;
        CHECK(step.removed_nodes.size() == 2);
        CHECK(static_cast<long>(step.removed_arcs.size()) - static_cast<long>(step.added_arcs.size()) == 2);
      }
      CHECK(flattened == static_cast<long>(ma.frames.size()));
    }
  }

  TEST_CASE("reduction order does not depend on input order") {
    for (int s = 0; s < 10; ++s) {
      const auto g = corpus_instance(s);
      const auto a = flatten(build_model_a(g));
      const auto b = flatten(build_model_a(shuffled(g, 1000 + s)));
      CHECK(same_graph(a.base, b.base));
    }
  }
}
