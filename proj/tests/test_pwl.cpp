#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "mesmix/pwl.hpp"
#include "oracles.hpp"

using namespace mesmix;
using mesmix::testing::Rng;
using mesmix::testing::scan_eval;

namespace {

double max_compose_error(const Curve& phi, const Curve& psi, const Curve& merged, int samples) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = phi.source_min() + (phi.source_max() - phi.source_min()) * i / (samples - 1);
    worst = std::max(worst, std::abs(scan_eval(merged, x) - scan_eval(psi, scan_eval(phi, x))));
  }
  return worst;
}

}  // namespace

TEST_SUITE("pwl") {
  TEST_CASE("evaluate is exact at breakpoints and linear between") {
    const Curve f({0.0, 2.0, 10.0}, {0.0, 1.0, 9.0});
    CHECK(evaluate(f, 0.0) == 0.0);
    CHECK(evaluate(f, 2.0) == 1.0);
    CHECK(evaluate(f, 10.0) == 9.0);
    CHECK(evaluate(f, 1.0) == doctest::Approx(0.5));
    CHECK(evaluate(f, 6.0) == doctest::Approx(5.0));
    CHECK_THROWS_AS(evaluate(f, 10.5), OutOfDomain);
    CHECK_THROWS_AS(evaluate(f, -0.1), OutOfDomain);
  }

  TEST_CASE("defects are reported") {
    CHECK(Curve({0.0}, {0.0}).defect() == CurveDefect::too_few_breakpoints);
    CHECK(Curve({0.0, 1.0}, {0.0, 1.0, 2.0}).defect() == CurveDefect::length_mismatch);
    CHECK(Curve({0.0, 0.0}, {0.0, 1.0}).defect() == CurveDefect::non_increasing_source);
    CHECK(Curve({0.0, 1.0}, {1.0, 1.0}).defect() == CurveDefect::non_increasing_target);
    CHECK(Curve({0.0, NAN}, {0.0, 1.0}).defect() == CurveDefect::non_finite);
    CHECK_THROWS_AS(evaluate(Curve({0.0, 1.0}, {1.0, 0.5}), 0.5), InvalidCurve);
  }

  TEST_CASE("compose of two lines") {
    const Curve phi({0.0, 10.0}, {0.0, 5.0});
    const Curve psi({0.0, 5.0}, {0.0, 20.0});
    CHECK(compose(phi, psi) == Curve({0.0, 10.0}, {0.0, 20.0}));
  }

  TEST_CASE("compose merges preimages of the outer breakpoints") {
    const Curve phi({0.0, 2.0, 10.0}, {0.0, 1.0, 9.0});
    const Curve psi({0.0, 1.0, 9.0}, {0.0, 3.0, 11.0});
    const Curve r = compose(phi, psi);
    REQUIRE(r.size() == 3);
    CHECK(r.source()(0) == 0.0);
    CHECK(r.source()(1) == doctest::Approx(2.0));
    CHECK(r.source()(2) == 10.0);
    CHECK(r.target()(0) == 0.0);
    CHECK(r.target()(1) == doctest::Approx(3.0));
    CHECK(r.target()(2) == doctest::Approx(11.0));
    CHECK(max_compose_error(phi, psi, r, 1000) <= 1e-9);
  }

  TEST_CASE("compose rejects disjoint domains and invalid curves") {
    CHECK_THROWS_AS(compose(Curve({0.0, 1.0}, {0.0, 5.0}), Curve({6.0, 7.0}, {0.0, 1.0})), DomainMismatch);
    CHECK_THROWS_AS(compose(Curve({0.0, 1.0}, {2.0, 1.0}), Curve({0.0, 7.0}, {0.0, 1.0})), InvalidCurve);
  }

  TEST_CASE("compose matches sequential evaluation on random pairs") {
    Rng rng(11);
    for (int pair = 0; pair < 100; ++pair) {
      const Curve phi = testing::random_curve(rng, rng.integer(2, 8), rng.uniform(1.0, 100.0), 0.2, 2.0);
      const Curve psi =
          testing::random_curve(rng, rng.integer(2, 8), phi.target_max() * rng.uniform(1.0, 1.5), 0.2, 2.0);
      const Curve merged = compose(phi, psi);
      CHECK(merged.valid());
      CHECK(max_compose_error(phi, psi, merged, 1000) <= 1e-9);
    }
  }

  TEST_CASE("composition with the identity keeps every value") {
    Rng rng(5);
    for (int k = 0; k < 50; ++k) {
      const Curve f = testing::random_curve(rng, rng.integer(2, 8), rng.uniform(1.0, 50.0), 0.3, 1.5);
      const Curve left = compose(identity_curve(f.source_min(), f.source_max()), f);
      const Curve right = compose(f, identity_curve(f.target_min(), f.target_max()));
      for (const Curve* r : {&left, &right})
        for (Eigen::Index i = 0; i < r->size(); ++i)
          CHECK(scan_eval(*r, r->source()(i)) == doctest::Approx(scan_eval(f, r->source()(i))).epsilon(1e-12));
    }
  }

  TEST_CASE("inverse swaps the series") {
    const Curve f({0.0, 2.0, 10.0}, {0.0, 1.0, 9.0});
    const Curve g = inverse(f);
    for (double x : {0.0, 1.0, 2.0, 7.5, 10.0}) CHECK(evaluate(g, evaluate(f, x)) == doctest::Approx(x));
  }

  TEST_CASE("max slope") {
    CHECK(max_slope(Curve({0.0, 1.0, 3.0}, {0.0, 0.5, 2.5})) == doctest::Approx(1.0));
  }

  TEST_CASE("long double curves") {
    const PiecewiseLinear<long double> f({0.0L, 3.0L}, {0.0L, 1.0L});
    CHECK(evaluate(f, 1.5L) == doctest::Approx(0.5));
  }
}
