#include "basis_factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mesmix {

namespace {

// Columns bucketed by their active entry count.
class CountBuckets {
 public:
  explicit CountBuckets(int n) : head_(static_cast<std::size_t>(n) + 1, -1), next_(n, -1), prev_(n, -1), count_(n, -1) {}

  void insert(int c, int count) {
    count_[c] = count;
    prev_[c] = -1;
    next_[c] = head_[count];
    if (next_[c] >= 0) prev_[next_[c]] = c;
    head_[count] = c;
  }
  void remove(int c) {
    if (count_[c] < 0) return;
    if (prev_[c] >= 0)
      next_[prev_[c]] = next_[c];
    else
      head_[count_[c]] = next_[c];
    if (next_[c] >= 0) prev_[next_[c]] = prev_[c];
    count_[c] = -1;
  }
  void move(int c, int count) {
    remove(c);
    insert(c, count);
  }
  int first(int count) const { return head_[count]; }
  int next(int c) const { return next_[c]; }
  int size() const { return static_cast<int>(head_.size()) - 1; }

 private:
  std::vector<int> head_, next_, prev_, count_;
};

}  // namespace

bool BasisFactor::factor(const std::vector<Column>& columns) {
  const int m = static_cast<int>(columns.size());
  m_ = m;
  prow_.clear();
  pcol_.clear();
  piv_.clear();
  l_start_.assign(1, 0);
  l_idx_.clear();
  l_val_.clear();
  bad_cols_.clear();
  bad_rows_.clear();
  std::vector<std::vector<std::pair<int, double>>> urows;
  urows.reserve(static_cast<std::size_t>(m));

  std::vector<std::vector<int>> crow(m), rcols(m);
  std::vector<std::vector<double>> cval(m);
  std::vector<int> rcount(m, 0);
  for (int c = 0; c < m; ++c) {
    const auto& col = columns[static_cast<std::size_t>(c)];
    for (std::size_t k = 0; k < col.rows.size(); ++k) {
      if (col.values[k] == 0.0) continue;
      const int r = col.rows[k];
      crow[c].push_back(r);
      cval[c].push_back(col.values[k]);
      rcols[r].push_back(c);
      ++rcount[r];
    }
  }
  std::vector<char> col_active(m, 1), row_active(m, 1);
  CountBuckets buckets(m);
  for (int c = 0; c < m; ++c) buckets.insert(c, static_cast<int>(crow[c].size()));
  std::vector<int> singles;
  for (int r = 0; r < m; ++r)
    if (rcount[r] == 1) singles.push_back(r);
  std::vector<int> mark(m, -1);

  auto col_max = [&](int c) {
    double mx = 0.0;
    for (double v : cval[c]) mx = std::max(mx, std::abs(v));
    return mx;
  };
  auto find_in_col = [&](int c, int r) {
    for (std::size_t k = 0; k < crow[c].size(); ++k)
      if (crow[c][k] == r) return static_cast<int>(k);
    return -1;
  };

  // Returns (row, column) or (-1, -1) when nothing acceptable is left.
  auto choose = [&]() -> std::pair<int, int> {
    while (!singles.empty()) {
      const int r = singles.back();
      singles.pop_back();
      if (!row_active[r] || rcount[r] != 1) continue;
      for (int c : rcols[r]) {
        if (!col_active[c]) continue;
        const int k = find_in_col(c, r);
        if (k < 0) continue;
        const double a = std::abs(cval[c][k]);
        if (a > absolute_tolerance && a >= pivot_threshold * col_max(c)) return {r, c};
        break;
      }
    }
    int best_r = -1, best_c = -1, searched = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int count = 1; count <= buckets.size(); ++count) {
      for (int c = buckets.first(count); c >= 0;) {
        const int next = buckets.next(c);
        const double mx = col_max(c);
        if (mx <= absolute_tolerance) {
          buckets.remove(c);
          c = next;
          continue;
        }
        for (std::size_t k = 0; k < crow[c].size(); ++k) {
          if (std::abs(cval[c][k]) < pivot_threshold * mx) continue;
          const int r = crow[c][k];
          const double cost = static_cast<double>(rcount[r] - 1) * (count - 1);
          if (cost < best_cost) {
            best_cost = cost;
            best_r = r;
            best_c = c;
          }
        }
        if (best_c >= 0 && (count == 1 || ++searched >= 4)) return {best_r, best_c};
        c = next;
      }
      if (best_c >= 0 && best_cost <= static_cast<double>(count) * count) return {best_r, best_c};
    }
    return {best_r, best_c};
  };

  for (int step = 0; step < m; ++step) {
    const auto [r, c] = choose();
    if (c < 0) break;
    const int kp = find_in_col(c, r);
    const double p = cval[c][kp];

    for (std::size_t k = 0; k < crow[c].size(); ++k) {
      const int i = crow[c][k];
      if (i == r) continue;
      l_idx_.push_back(i);
      l_val_.push_back(cval[c][k] / p);
      if (--rcount[i] == 1) singles.push_back(i);
    }
    l_start_.push_back(static_cast<int>(l_idx_.size()));
    col_active[c] = 0;
    buckets.remove(c);
    row_active[r] = 0;

    std::vector<std::pair<int, double>> urow;
    for (int j : rcols[r]) {
      if (!col_active[j]) continue;
      const int k = find_in_col(j, r);
      if (k < 0) continue;
      urow.emplace_back(j, cval[j][k]);
      crow[j][k] = crow[j].back();
      cval[j][k] = cval[j].back();
      crow[j].pop_back();
      cval[j].pop_back();
    }
    const int lbegin = l_start_[l_start_.size() - 2];
    const int lend = l_start_.back();
    for (const auto& [j, u] : urow) {
      if (lbegin < lend) {
        for (std::size_t k = 0; k < crow[j].size(); ++k) mark[crow[j][k]] = static_cast<int>(k);
        for (int q = lbegin; q < lend; ++q) {
          const int i = l_idx_[q];
          const double delta = l_val_[q] * u;
          if (mark[i] >= 0) {
            cval[j][mark[i]] -= delta;
          } else {
            crow[j].push_back(i);
            cval[j].push_back(-delta);
            rcols[i].push_back(j);
            ++rcount[i];
          }
        }
        for (int i : crow[j]) mark[i] = -1;
      }
      buckets.move(j, static_cast<int>(crow[j].size()));
    }
    prow_.push_back(r);
    pcol_.push_back(c);
    piv_.push_back(p);
    urows.push_back(std::move(urow));
  }

  if (static_cast<int>(pcol_.size()) < m) {
    for (int c = 0; c < m; ++c)
      if (col_active[c]) bad_cols_.push_back(c);
    for (int r = 0; r < m; ++r)
      if (row_active[r]) bad_rows_.push_back(r);
    return false;
  }

  std::vector<int> pivot_of_col(m);
  for (int k = 0; k < m; ++k) pivot_of_col[pcol_[k]] = k;
  u_start_.assign(1, 0);
  u_idx_.clear();
  u_val_.clear();
  std::vector<int> ccount(m, 0);
  for (int k = 0; k < m; ++k) {
    for (const auto& [j, u] : urows[k]) {
      u_idx_.push_back(j);
      u_val_.push_back(u);
      ++ccount[pivot_of_col[j]];
    }
    u_start_.push_back(static_cast<int>(u_idx_.size()));
  }
  uc_start_.assign(static_cast<std::size_t>(m) + 1, 0);
  for (int k = 0; k < m; ++k) uc_start_[k + 1] = uc_start_[k] + ccount[k];
  uc_idx_.assign(u_idx_.size(), 0);
  uc_val_.assign(u_idx_.size(), 0.0);
  std::vector<int> fillpos(uc_start_.begin(), uc_start_.end() - 1);
  for (int k = 0; k < m; ++k)
    for (int q = u_start_[k]; q < u_start_[k + 1]; ++q) {
      const int kc = pivot_of_col[u_idx_[q]];
      uc_idx_[fillpos[kc]] = prow_[k];
      uc_val_[fillpos[kc]++] = u_val_[q];
    }
  return true;
}

void BasisFactor::ftran(Eigen::VectorXd& v) const {
  for (int k = 0; k < m_; ++k) {
    const double b = v[prow_[k]];
    if (b == 0.0) continue;
    for (int q = l_start_[k]; q < l_start_[k + 1]; ++q) v[l_idx_[q]] -= l_val_[q] * b;
  }
  work_.setZero(m_);
  for (int k = m_ - 1; k >= 0; --k) {
    const double xk = v[prow_[k]] / piv_[k];
    if (xk == 0.0) continue;
    work_[pcol_[k]] = xk;
    for (int q = uc_start_[k]; q < uc_start_[k + 1]; ++q) v[uc_idx_[q]] -= uc_val_[q] * xk;
  }
  v.swap(work_);
}

void BasisFactor::btran(Eigen::VectorXd& v) const {
  work_.setZero(m_);
  for (int k = 0; k < m_; ++k) {
    const double zk = v[pcol_[k]] / piv_[k];
    if (zk == 0.0) continue;
    work_[prow_[k]] = zk;
    for (int q = u_start_[k]; q < u_start_[k + 1]; ++q) v[u_idx_[q]] -= u_val_[q] * zk;
  }
  for (int k = m_ - 1; k >= 0; --k) {
    double s = 0.0;
    for (int q = l_start_[k]; q < l_start_[k + 1]; ++q) s += l_val_[q] * work_[l_idx_[q]];
    work_[prow_[k]] -= s;
  }
  v.swap(work_);
}

}  // namespace mesmix
