#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mesmix {

/// Sparse LU of a simplex basis by right-looking Markowitz elimination.
///
/// Column k of the basis is the k-th basic variable. Solves skip zero entries,
/// which keeps them cheap on the very sparse vectors a simplex iteration produces.
class BasisFactor {
 public:
  struct Column {
    std::vector<int> rows;
    std::vector<double> values;
  };

  /// Factors the m x m matrix with the given columns. Returns false when some
  /// columns have no acceptable pivot; those columns and the rows nobody
  /// pivoted on are left in deficient_columns / deficient_rows (same length).
  bool factor(const std::vector<Column>& columns);

  /// b indexed by row in, solution of B x = b indexed by column out.
  void ftran(Eigen::VectorXd& v) const;
  /// c indexed by column in, solution of B^T y = c indexed by row out.
  void btran(Eigen::VectorXd& v) const;

  const std::vector<int>& deficient_columns() const { return bad_cols_; }
  const std::vector<int>& deficient_rows() const { return bad_rows_; }
  std::size_t fill() const { return l_idx_.size() + u_idx_.size(); }

  double pivot_threshold = 0.1;   // relative to the largest entry of the column
  double absolute_tolerance = 1e-11;

 private:
  int m_ = 0;
  std::vector<int> prow_, pcol_;
  std::vector<double> piv_;
  // L etas, one per pivot: entries (row, multiplier)
  std::vector<int> l_start_, l_idx_;
  std::vector<double> l_val_;
  // U by pivot row: entries (column, value); and by column: entries (row, value)
  std::vector<int> u_start_, u_idx_;
  std::vector<double> u_val_;
  std::vector<int> uc_start_, uc_idx_;
  std::vector<double> uc_val_;
  std::vector<int> bad_cols_, bad_rows_;
  mutable Eigen::VectorXd work_;
};

}  // namespace mesmix
