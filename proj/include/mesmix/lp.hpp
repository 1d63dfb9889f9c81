#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace mesmix {

/// min c'x  subject to  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper.
struct LpProblem {
  Eigen::SparseMatrix<double> A;  // rows x cols
  Eigen::VectorXd cost;
  Eigen::VectorXd col_lower, col_upper;
  Eigen::VectorXd row_lower, row_upper;

  Eigen::Index rows() const { return A.rows(); }
  Eigen::Index cols() const { return A.cols(); }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus s);

struct LpOptions {
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  long iteration_limit = 5'000'000;
  int refactor_interval = 100;
  int degenerate_limit = 1000;  // consecutive degenerate pivots before Bland's rule
  double infinite_box = 1e9;    // stand-in for infinite structural bounds
  double cost_perturbation = 5e-7;  // relative; 0 disables
};

/// Bounded dual simplex with a product-form update of a sparse LU basis factorization.
///
/// The slack basis is dual feasible once every structural sits at the bound its
/// cost sign prefers, so no phase one is needed. Bounds may be changed between
/// solves; the current basis stays dual feasible and is reused.
class DualSimplex {
 public:
  explicit DualSimplex(const LpProblem& lp, LpOptions options = {});
  ~DualSimplex();
  DualSimplex(const DualSimplex&) = delete;
  DualSimplex& operator=(const DualSimplex&) = delete;

  void set_column_bounds(Eigen::Index j, double lower, double upper);
  double column_lower(Eigen::Index j) const;
  double column_upper(Eigen::Index j) const;

  LpStatus solve();

  /// Structural values of the last solve.
  Eigen::VectorXd primal() const;
  double objective() const;
  long iterations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mesmix
