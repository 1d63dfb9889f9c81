#include "mesmix/lp.hpp"

#include "basis_factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>


namespace mesmix {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "Optimal";
    case LpStatus::infeasible: return "Infeasible";
    case LpStatus::unbounded: return "Unbounded";
    case LpStatus::iteration_limit: return "IterationLimit";
  }
  return "Optimal";
}

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kDrop = 1e-14;
constexpr double kPivot = 1e-7;

enum Status : std::int8_t { kBasic, kLower, kUpper };

struct Eta {
  int row = 0;
  double pivot = 1.0;
  std::vector<int> index;
  std::vector<double> value;  // entries other than the pivot row
};

}  // namespace

struct DualSimplex::Impl {
  using ColMatrix = Eigen::SparseMatrix<double>;
  using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  LpOptions opt;
  int m = 0;
  int n = 0;
  ColMatrix A;
  RowMatrix Ar;
  std::vector<double> cost, lo, up;
  std::vector<double> true_cost;  // cost holds the perturbed copy while perturbed is set
  bool perturbed = false;
  std::vector<bool> boxed;  // infinite bound replaced by the box
  std::vector<double> x, d;
  std::vector<std::int8_t> status;
  std::vector<int> head, pos;
  BasisFactor lu;
  std::vector<Eta> etas;
  long iterations = 0;
  bool factor_dirty = true;
  bool primal_dirty = true;

  Impl(const LpProblem& lp, LpOptions o) : opt(o) {
    m = static_cast<int>(lp.rows());
    n = static_cast<int>(lp.cols());
    A = lp.A;
    A.makeCompressed();
    Ar = A;
    const int N = n + m;
    cost.assign(static_cast<std::size_t>(N), 0.0);
    lo.assign(static_cast<std::size_t>(N), 0.0);
    up.assign(static_cast<std::size_t>(N), 0.0);
    boxed.assign(static_cast<std::size_t>(N), false);
    for (int j = 0; j < n; ++j) {
      cost[j] = lp.cost(j);
      set_bounds(j, lp.col_lower(j), lp.col_upper(j));
    }
    true_cost = cost;
    for (int i = 0; i < m; ++i) {
      // Open row sides take the activity range implied by the column bounds.
      double amin = 0.0, amax = 0.0;
      bool implied = true;
      for (RowMatrix::InnerIterator it(Ar, i); it; ++it) {
        const int j = static_cast<int>(it.col());
        implied = implied && !boxed[j];
        amin += it.value() * (it.value() > 0.0 ? lo[j] : up[j]);
        amax += it.value() * (it.value() > 0.0 ? up[j] : lo[j]);
      }
      double l = lp.row_lower(i), u = lp.row_upper(i);
      if (implied && !std::isfinite(l)) l = std::min(amin, u);
      if (implied && !std::isfinite(u)) u = std::max(amax, l);
      set_bounds(n + i, l, u);
    }
    x.assign(static_cast<std::size_t>(N), 0.0);
    d.assign(static_cast<std::size_t>(N), 0.0);
    status.assign(static_cast<std::size_t>(N), kLower);
    pos.assign(static_cast<std::size_t>(N), -1);
    head.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < n; ++j) {
      d[j] = cost[j];
      status[j] = (cost[j] >= 0.0 || lo[j] == up[j]) ? kLower : kUpper;
      x[j] = status[j] == kLower ? lo[j] : up[j];
    }
    for (int i = 0; i < m; ++i) {
      head[i] = n + i;
      pos[n + i] = i;
      status[n + i] = kBasic;
    }
  }

  void set_bounds(int j, double l, double u) {
    boxed[j] = false;
    if (!std::isfinite(l)) {
      l = -opt.infinite_box;
      boxed[j] = true;
    }
    if (!std::isfinite(u)) {
      u = opt.infinite_box;
      boxed[j] = true;
    }
    lo[j] = l;
    up[j] = u;
  }

  template <typename F>
  void for_column(int j, F&& f) const {
    if (j < n) {
      for (ColMatrix::InnerIterator it(A, j); it; ++it) f(static_cast<int>(it.row()), it.value());
    } else {
      f(j - n, -1.0);
    }
  }

  bool factorize() {
    std::vector<BasisFactor::Column> cols(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      for_column(head[i], [&](int r, double v) {
        cols[i].rows.push_back(r);
        cols[i].values.push_back(v);
      });
    etas.clear();
    return lu.factor(cols);
  }

  /// Replaces the basic variables that left the factor without a pivot by the
  /// logicals of the uncovered rows.
  void repair_basis() {
    const auto& bad_cols = lu.deficient_columns();
    const auto& bad_rows = lu.deficient_rows();
    for (std::size_t k = 0; k < bad_cols.size(); ++k) {
      const int i = bad_cols[k];
      const int j = head[i];
      pos[j] = -1;
      status[j] = (cost[j] >= 0.0 || lo[j] == up[j]) ? kLower : kUpper;
      x[j] = status[j] == kLower ? lo[j] : up[j];
      const int s = n + bad_rows[k];
      head[i] = s;
      pos[s] = i;
      status[s] = kBasic;
    }
  }

  /// Shifts nonbasic structural costs away from zero reduced cost, keeping dual feasibility.
  void perturb() {
    for (int j = 0; j < n; ++j) {
      if (status[j] == kBasic || lo[j] == up[j]) continue;
      // deterministic spread in [1, 2)
      std::uint64_t h = static_cast<std::uint64_t>(j) * 0x9E3779B97F4A7C15ULL;
      h ^= h >> 29;
      const double spread = 1.0 + static_cast<double>(h >> 11) * 0x1.0p-53;
      const double xi = opt.cost_perturbation * (1.0 + std::abs(true_cost[j])) * spread;
      const double shift = status[j] == kLower ? xi : -xi;
      cost[j] += shift;
      d[j] += shift;
    }
    perturbed = true;
  }

  void unperturb() {
    cost = true_cost;
    perturbed = false;
  }

  void ftran(Eigen::VectorXd& v) const {
    if (m == 0) return;
    lu.ftran(v);
    for (const auto& e : etas) {
      const double vr = v[e.row] / e.pivot;
      v[e.row] = vr;
      if (vr == 0.0) continue;
      for (std::size_t k = 0; k < e.index.size(); ++k) v[e.index[k]] -= e.value[k] * vr;
    }
  }

  void btran(Eigen::VectorXd& v) const {
    if (m == 0) return;
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      double dot = 0.0;
      for (std::size_t k = 0; k < it->index.size(); ++k) dot += it->value[k] * v[it->index[k]];
      v[it->row] = (v[it->row] - dot) / it->pivot;
    }
    lu.btran(v);
  }

  void compute_primal() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < n + m; ++j) {
      if (status[j] == kBasic || x[j] == 0.0) continue;
      const double xj = x[j];
      for_column(j, [&](int r, double v) { rhs[r] -= v * xj; });
    }
    ftran(rhs);
    for (int i = 0; i < m; ++i) x[head[i]] = rhs[i];
    primal_dirty = false;
  }

  /// Recomputes reduced costs and moves nonbasic variables to the bound their sign requires.
  bool compute_dual() {
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) y[i] = cost[head[i]];
    btran(y);
    bool moved = false;
    for (int j = 0; j < n + m; ++j) {
      if (status[j] == kBasic) {
        d[j] = 0.0;
        continue;
      }
      double dot = 0.0;
      for_column(j, [&](int r, double v) { dot += v * y[r]; });
      d[j] = cost[j] - dot;
      if (lo[j] == up[j]) continue;
      if (status[j] == kLower && d[j] < -opt.dual_tolerance && std::isfinite(up[j])) {
        status[j] = kUpper;
        x[j] = up[j];
        moved = true;
      } else if (status[j] == kUpper && d[j] > opt.dual_tolerance && std::isfinite(lo[j])) {
        status[j] = kLower;
        x[j] = lo[j];
        moved = true;
      }
    }
    return moved;
  }

  void refactor() {
    if (!factorize()) {
      repair_basis();
      if (!factorize()) throw std::runtime_error("basis repair left a singular factor");
    }
    compute_dual();
    compute_primal();
    factor_dirty = false;
  }

  double infeasibility(int j) const {
    const double v = x[j];
    const double tl = opt.primal_tolerance;
    if (v < lo[j] - tl) return lo[j] - v;
    if (v > up[j] + tl) return v - up[j];
    return 0.0;
  }

  int choose_leaving(bool bland) const {
    int best = -1;
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      const double inf = infeasibility(head[i]);
      if (inf <= 0.0) continue;
      if (bland) {
        if (best < 0 || head[i] < head[best]) best = i;
      } else if (inf > worst) {
        worst = inf;
        best = i;
      }
    }
    return best;
  }

  LpStatus run() {
    if (factor_dirty)
      refactor();
    else if (primal_dirty)
      compute_primal();
    if (opt.cost_perturbation > 0.0) perturb();

    Eigen::VectorXd rho(m), col(m);
    std::vector<double> alpha(static_cast<std::size_t>(n + m), 0.0);
    std::vector<int> touched;
    std::vector<char> mark(static_cast<std::size_t>(n + m), 0);
    int degenerate = 0;
    bool verified = false;

    for (;;) {
      if (iterations >= opt.iteration_limit) {
        if (perturbed) unperturb();
        factor_dirty = true;
        return LpStatus::iteration_limit;
      }
      if (static_cast<int>(etas.size()) >= opt.refactor_interval) refactor();

      const bool bland = degenerate >= opt.degenerate_limit;
      const int r = choose_leaving(bland);
      if (r < 0 && perturbed) {
        unperturb();
        compute_dual();
        compute_primal();
        verified = true;
        continue;
      }
      if (r < 0) {
        if (!verified && !etas.empty()) {
          refactor();
          verified = true;
          continue;
        }
        for (int j = 0; j < n + m; ++j)
          if (boxed[j] && std::abs(x[j]) >= opt.infinite_box * (1.0 - 1e-9)) return LpStatus::unbounded;
        return LpStatus::optimal;
      }
      verified = false;

      const int p = head[r];
      const bool to_lower = x[p] < lo[p];
      const double target = to_lower ? lo[p] : up[p];
      const double s = to_lower ? 1.0 : -1.0;

      rho.setZero();
      rho[r] = 1.0;
      btran(rho);

      for (int j : touched) {
        alpha[j] = 0.0;
        mark[j] = 0;
      }
      touched.clear();
      for (int i = 0; i < m; ++i) {
        const double ri = rho[i];
        if (std::abs(ri) <= kDrop) continue;
        for (RowMatrix::InnerIterator it(Ar, i); it; ++it) {
          const int j = static_cast<int>(it.col());
          if (!mark[j]) {
            mark[j] = 1;
            touched.push_back(j);
          }
          alpha[j] += ri * it.value();
        }
        const int lj = n + i;
        mark[lj] = 1;
        touched.push_back(lj);
        alpha[lj] = -ri;
      }

      auto eligible = [&](int j) {
        if (status[j] == kBasic || lo[j] == up[j]) return false;
        const double a = alpha[j];
        if (std::abs(a) <= kPivot) return false;
        return (status[j] == kLower && s * a < 0.0) || (status[j] == kUpper && s * a > 0.0);
      };

      int q = -1;
      if (bland) {
        double best = kInfinity;
        for (int j : touched) {
          if (!eligible(j)) continue;
          const double ratio = std::abs(d[j]) / std::abs(alpha[j]);
          if (ratio < best - 1e-12) {
            best = ratio;
            q = j;
          } else if (ratio <= best + 1e-12 && j < q) {
            q = j;
          }
        }
      } else {
        double tmax = kInfinity;
        for (int j : touched) {
          if (!eligible(j)) continue;
          const double dj = std::abs(d[j]);
          tmax = std::min(tmax, (dj + opt.dual_tolerance) / std::abs(alpha[j]));
        }
        double best_alpha = 0.0;
        for (int j : touched) {
          if (!eligible(j)) continue;
          const double ratio = std::abs(d[j]) / std::abs(alpha[j]);
          if (ratio <= tmax && (std::abs(alpha[j]) > best_alpha || (std::abs(alpha[j]) == best_alpha && j < q))) {
            best_alpha = std::abs(alpha[j]);
            q = j;
          }
        }
      }

      if (q < 0) {
        if (!etas.empty()) {
          refactor();
          continue;
        }
        if (perturbed) unperturb();
        factor_dirty = true;
        return LpStatus::infeasible;
      }

      col.setZero();
      for_column(q, [&](int row, double v) { col[row] = v; });
      ftran(col);
      const double pivot = col[r];
      if (std::abs(pivot - alpha[q]) > 1e-6 * (1.0 + std::abs(alpha[q])) || std::abs(pivot) <= kPivot) {
        if (!etas.empty()) {
          refactor();
          continue;
        }
      }
      ++iterations;

      double dq = d[q];
      if ((status[q] == kLower && dq < 0.0) || (status[q] == kUpper && dq > 0.0)) dq = 0.0;
      const double theta = dq / alpha[q];
      for (int j : touched)
        if (status[j] != kBasic) d[j] -= theta * alpha[j];
      d[q] = 0.0;
      d[p] = -theta;
      degenerate = std::abs(theta) <= 1e-12 ? degenerate + 1 : 0;

      const double delta = (x[p] - target) / pivot;
      Eta eta;
      eta.row = r;
      eta.pivot = pivot;
      for (int i = 0; i < m; ++i) {
        const double ci = col[i];
        if (std::abs(ci) <= kDrop) continue;
        x[head[i]] -= delta * ci;
        if (i != r) {
          eta.index.push_back(i);
          eta.value.push_back(ci);
        }
      }
      x[q] += delta;
      x[p] = target;
      status[p] = to_lower ? kLower : kUpper;
      pos[p] = -1;
      head[r] = q;
      pos[q] = r;
      status[q] = kBasic;
      etas.push_back(std::move(eta));
    }
  }
};

DualSimplex::DualSimplex(const LpProblem& lp, LpOptions options) : impl_(std::make_unique<Impl>(lp, options)) {}

DualSimplex::~DualSimplex() = default;

void DualSimplex::set_column_bounds(Eigen::Index j, double lower, double upper) {
  auto& s = *impl_;
  const int k = static_cast<int>(j);
  s.set_bounds(k, lower, upper);
  if (s.status[k] == kBasic) return;
  if (s.lo[k] == s.up[k])
    s.status[k] = kLower;
  else
    s.status[k] = s.d[k] >= 0.0 ? kLower : kUpper;
  const double v = s.status[k] == kLower ? s.lo[k] : s.up[k];
  if (v != s.x[k]) {
    s.x[k] = v;
    s.primal_dirty = true;
  }
}

double DualSimplex::column_lower(Eigen::Index j) const { return impl_->lo[static_cast<std::size_t>(j)]; }
double DualSimplex::column_upper(Eigen::Index j) const { return impl_->up[static_cast<std::size_t>(j)]; }

LpStatus DualSimplex::solve() { return impl_->run(); }

Eigen::VectorXd DualSimplex::primal() const {
  Eigen::VectorXd out(impl_->n);
  for (int j = 0; j < impl_->n; ++j) out[j] = impl_->x[static_cast<std::size_t>(j)];
  return out;
}

double DualSimplex::objective() const {
  double f = 0.0;
  for (int j = 0; j < impl_->n; ++j) f += impl_->true_cost[static_cast<std::size_t>(j)] * impl_->x[static_cast<std::size_t>(j)];
  return f;
}

long DualSimplex::iterations() const { return impl_->iterations; }

}  // namespace mesmix
