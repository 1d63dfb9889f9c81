#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "basis_factor.hpp"
#include "corpus.hpp"
#include "mesmix/lp.hpp"
#include "mesmix/solve.hpp"
#include "oracles.hpp"

using namespace mesmix;
using namespace mesmix::testing;

namespace {

LpProblem from_dense(const DenseLp& d, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  LpProblem lp;
  lp.A = d.A.sparseView();
  lp.cost = d.c;
  lp.col_lower = d.l;
  lp.col_upper = d.u;
  lp.row_lower = lo;
  lp.row_upper = hi;
  return lp;
}

}  // namespace

TEST_SUITE("lp") {
  TEST_CASE("textbook cases") {
    MipProgram p;
    const int x = p.add_variable({"x", VarFamily::flow_arc, false, 0.0, 10.0});
    p.add_constraint({"c", {{x, 1.0}}, Sense::ge, 3.0});
    p.objectives[0].terms = {{x, 1.0}};
    const auto s = solve_lp(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.values[0] == doctest::Approx(3.0));

    MipProgram q;
    const int a = q.add_variable({"x", VarFamily::flow_arc, false, 0.0, 1.0});
    const int b = q.add_variable({"y", VarFamily::flow_arc, false, 0.0, 1.0});
    q.add_constraint({"c", {{a, 1.0}, {b, 1.0}}, Sense::le, 1.0});
    q.objectives[0].terms = {{a, -1.0}, {b, -1.0}};
    const auto t = solve_lp(q);
    REQUIRE(t.status == SolveStatus::Optimal);
    CHECK(t.objective_vector[0] == doctest::Approx(-1.0));
  }

  TEST_CASE("infeasible and unbounded") {
    MipProgram p;
    const int x = p.add_variable({"x", VarFamily::flow_arc, false, 0.0, 2.0});
    p.add_constraint({"c", {{x, 1.0}}, Sense::ge, 3.0});
    CHECK(solve_lp(p).status == SolveStatus::Infeasible);

    MipProgram q;
    const int y = q.add_variable({"y", VarFamily::flow_arc, false, 0.0, kInf});
    q.add_constraint({"c", {{y, 1.0}}, Sense::ge, 1.0});
    q.objectives[0].terms = {{y, -1.0}};
    CHECK(solve_lp(q).status == SolveStatus::Unbounded);
  }

  TEST_CASE("random bounded programs match vertex enumeration") {
    Rng rng(2024);
    int feasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const int n = rng.integer(1, 3);
      const int m = rng.integer(1, 3);
      DenseLp d;
      d.A.resize(m, n);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) d.A(i, j) = rng.chance(0.3) ? 0.0 : rng.integer(-3, 3);
      d.c.resize(n);
      d.l.resize(n);
      d.u.resize(n);
      for (int j = 0; j < n; ++j) {
        d.c(j) = rng.integer(-5, 5);
        d.l(j) = rng.integer(-3, 2);
        d.u(j) = d.l(j) + rng.integer(0, 6);
      }
      Eigen::VectorXd lo(m), hi(m);
      d.lo.resize(m);
      d.hi.resize(m);
      for (int i = 0; i < m; ++i) {
        const double a = rng.integer(-8, 8);
        const double b = rng.chance(0.2) ? a : a + rng.integer(0, 8);
        lo(i) = rng.chance(0.25) ? -kInf : a;
        hi(i) = rng.chance(0.25) ? kInf : b;
        d.lo(i) = std::isfinite(lo(i)) ? lo(i) : -1e3;
        d.hi(i) = std::isfinite(hi(i)) ? hi(i) : 1e3;
      }
      const auto expected = vertex_enumeration(d);
      DualSimplex simplex(from_dense(d, lo, hi));
      const LpStatus st = simplex.solve();
      if (!expected) {
        CHECK(st == LpStatus::infeasible);
        continue;
      }
      ++feasible;
      REQUIRE(st == LpStatus::optimal);
      CHECK(simplex.objective() == doctest::Approx(*expected).epsilon(1e-9));
      const Eigen::VectorXd x = simplex.primal();
      const Eigen::VectorXd ax = d.A * x;
      for (int i = 0; i < m; ++i) {
        CHECK(ax(i) >= d.lo(i) - 1e-9);
        CHECK(ax(i) <= d.hi(i) + 1e-9);
      }
    }
    CHECK(feasible > 100);
  }

  TEST_CASE("bound changes warm start to the same optimum as a fresh solve") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 3, m = 2;
      DenseLp d;
      d.A = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return static_cast<double>(rng.integer(-3, 3)); });
      d.c = Eigen::VectorXd::NullaryExpr(n, [&] { return static_cast<double>(rng.integer(-5, 5)); });
      d.l = Eigen::VectorXd::Zero(n);
      d.u = Eigen::VectorXd::Constant(n, 5.0);
      d.lo = Eigen::VectorXd::Constant(m, -4.0);
      d.hi = Eigen::VectorXd::Constant(m, 6.0);
      DualSimplex warm(from_dense(d, d.lo, d.hi));
      warm.solve();
      const int j = rng.integer(0, n - 1);
      const double v = rng.integer(0, 5);
      warm.set_column_bounds(j, v, v);
      d.l(j) = d.u(j) = v;
      DualSimplex fresh(from_dense(d, d.lo, d.hi));
      const LpStatus a = warm.solve();
      const LpStatus b = fresh.solve();
      REQUIRE(a == b);
      if (a == LpStatus::optimal) CHECK(warm.objective() == doctest::Approx(fresh.objective()).epsilon(1e-9));
    }
  }

  TEST_CASE("basis factor solves agree with a dense LU") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
      const int m = rng.integer(1, 30);
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) B(i, i) = rng.uniform(0.5, 2.0) * (rng.chance(0.5) ? 1 : -1);
      for (int k = 0; k < 2 * m; ++k) B(rng.integer(0, m - 1), rng.integer(0, m - 1)) += rng.uniform(-1.0, 1.0);
      Eigen::FullPivLU<Eigen::MatrixXd> dense(B);
      if (dense.rank() < m || dense.rcond() < 1e-8) continue;
      std::vector<BasisFactor::Column> cols(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
          if (B(i, j) != 0.0) {
            cols[static_cast<std::size_t>(j)].rows.push_back(i);
            cols[static_cast<std::size_t>(j)].values.push_back(B(i, j));
          }
      BasisFactor lu;
      REQUIRE(lu.factor(cols));
      const Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(m, [&] { return rng.uniform(-1.0, 1.0); });
      Eigen::VectorXd x = b;
      lu.ftran(x);
      CHECK((x - dense.solve(b)).cwiseAbs().maxCoeff() < 1e-8);
      Eigen::VectorXd y = b;
      lu.btran(y);
      CHECK((y - B.transpose().fullPivLu().solve(b)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("singular bases report their deficient columns") {
    std::vector<BasisFactor::Column> cols = {{{0, 1}, {1.0, 1.0}}, {{0, 1}, {2.0, 2.0}}, {{2}, {1.0}}};
    BasisFactor lu;
    CHECK(!lu.factor(cols));
    CHECK(lu.deficient_columns().size() == 1);
    CHECK(lu.deficient_rows().size() == 1);
  }
}
