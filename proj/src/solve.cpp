#include "mesmix/solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <string>
#include <utility>

#include "mesmix/error.hpp"

namespace mesmix {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::IterationLimit: return "IterationLimit";
    case SolveStatus::NodeLimit: return "NodeLimit";
    case SolveStatus::TimeLimit: return "TimeLimit";
  }
  return "Optimal";
}

double Solution::value(const MipProgram& p, const std::string& name) const {
  const int i = p.find(name);
  if (i < 0 || static_cast<std::size_t>(i) >= values.size()) throw InvalidInstance("unknown variable " + name);
  return values[static_cast<std::size_t>(i)];
}

double evaluate(const LinearExpr& e, const std::vector<double>& values) {
  double s = e.constant;
  for (const auto& t : e.terms) s += t.coef * values[static_cast<std::size_t>(t.var)];
  return s;
}

namespace {

struct Cap {
  const LinearExpr* expr;
  double limit;
};

double lex_epsilon(const SolveConfig& c, double optimum) { return c.lex_relative * std::max(1.0, std::abs(optimum)); }

LpProblem to_lp(const MipProgram& p, int objective, const std::vector<Cap>& caps) {
  const auto n = static_cast<Eigen::Index>(p.variables.size());
  const auto m = static_cast<Eigen::Index>(p.constraints.size() + caps.size());
  LpProblem lp;
  lp.cost = Eigen::VectorXd::Zero(n);
  lp.col_lower.resize(n);
  lp.col_upper.resize(n);
  lp.row_lower.resize(m);
  lp.row_upper.resize(m);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& v = p.variables[static_cast<std::size_t>(j)];
    lp.col_lower[j] = v.lower;
    lp.col_upper[j] = v.upper;
  }
  for (const auto& t : p.objectives[static_cast<std::size_t>(objective - 1)].terms) lp.cost[t.var] += t.coef;

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::Index r = 0;
  for (const auto& c : p.constraints) {
    for (const auto& t : c.terms) trip.emplace_back(r, t.var, t.coef);
    lp.row_lower[r] = c.sense == Sense::le ? -kInf : c.rhs;
    lp.row_upper[r] = c.sense == Sense::ge ? kInf : c.rhs;
    ++r;
  }
  for (const auto& cap : caps) {
    for (const auto& t : cap.expr->terms) trip.emplace_back(r, t.var, t.coef);
    lp.row_lower[r] = -kInf;
    lp.row_upper[r] = cap.limit - cap.expr->constant;
    ++r;
  }
  lp.A.resize(m, n);
  lp.A.setFromTriplets(trip.begin(), trip.end());
  return lp;
}

LpOptions lp_options(const SolveConfig& c) {
  LpOptions o;
  o.primal_tolerance = c.lp_tolerance;
  o.dual_tolerance = c.lp_tolerance;
  o.iteration_limit = c.iteration_limit;
  return o;
}

SolveStatus from_lp(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return SolveStatus::Optimal;
    case LpStatus::infeasible: return SolveStatus::Infeasible;
    case LpStatus::unbounded: return SolveStatus::Unbounded;
    case LpStatus::iteration_limit: return SolveStatus::IterationLimit;
  }
  return SolveStatus::Infeasible;
}

std::vector<double> to_values(const Eigen::VectorXd& x) { return {x.data(), x.data() + x.size()}; }

void fill_evaluated(const MipProgram& p, Solution& s) {
  if (s.values.empty()) return;
  for (std::size_t k = 0; k < 3; ++k) s.evaluated[k] = evaluate(p.objectives[k], s.values);
}

std::vector<int> binaries_by_name(const MipProgram& p) {
  std::vector<int> out;
  for (std::size_t j = 0; j < p.variables.size(); ++j)
    if (p.variables[j].binary) out.push_back(static_cast<int>(j));
  std::sort(out.begin(), out.end(),
            [&](int a, int b) { return p.variables[static_cast<std::size_t>(a)].name < p.variables[static_cast<std::size_t>(b)].name; });
  return out;
}

using Clock = std::chrono::steady_clock;

struct Node {
  double bound;
  long seq;
  std::vector<std::pair<int, double>> fixes;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq < b.seq;  // equal bounds: newest first
  }
};

/// One objective, optional caps on earlier objectives.
Solution branch_and_bound(const MipProgram& p, const SolveConfig& config, int objective, const std::vector<Cap>& caps,
                          Clock::time_point start) {
  Solution out;
  const LpProblem lp = to_lp(p, objective, caps);
  DualSimplex simplex(lp, lp_options(config));
  const std::vector<int> binaries = binaries_by_name(p);
  const double constant = p.objectives[static_cast<std::size_t>(objective - 1)].constant;

  double incumbent = kInf;
  std::vector<double> best;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long seq = 0;
  std::vector<std::pair<int, double>> current;
  bool have_current = true;
  SolveStatus limit = SolveStatus::Optimal;

  auto apply = [&](const std::vector<std::pair<int, double>>& fixes) {
    for (int j : binaries) {
      const auto& v = p.variables[static_cast<std::size_t>(j)];
      simplex.set_column_bounds(j, v.lower, v.upper);
    }
    for (const auto& [j, value] : fixes) simplex.set_column_bounds(j, value, value);
  };
  auto prunable = [&](double bound) {
    return std::isfinite(incumbent) && bound >= incumbent - 1e-9 * std::max(1.0, std::abs(incumbent));
  };

  for (;;) {
    if (!have_current) {
      while (!open.empty() && prunable(open.top().bound)) open.pop();
      if (open.empty()) break;
      current = open.top().fixes;
      open.pop();
    }
    have_current = false;
    if (out.nodes >= config.node_limit) {
      limit = SolveStatus::NodeLimit;
      break;
    }
    if (std::chrono::duration<double>(Clock::now() - start).count() > config.time_limit) {
      limit = SolveStatus::TimeLimit;
      break;
    }
    ++out.nodes;
    apply(current);
    const LpStatus st = simplex.solve();
    if (st == LpStatus::infeasible) {
      continue;
    }
    if (st == LpStatus::unbounded) {
      if (out.nodes == 1) {
        out.status = SolveStatus::Unbounded;
        out.lp_iterations = simplex.iterations();
        return out;
      }
      continue;
    }
    if (st == LpStatus::iteration_limit) {
      limit = SolveStatus::IterationLimit;
      break;
    }
    const double bound = simplex.objective();
    if (prunable(bound)) continue;

    const Eigen::VectorXd x = simplex.primal();
    int branch = -1;
    double most = 0.0;
    for (int j : binaries) {
      const double frac = std::abs(x[j] - std::round(x[j]));
      if (frac > config.integrality_tolerance && frac > most + 1e-12) {
        most = frac;
        branch = j;
      }
    }
    if (branch < 0) {
      std::vector<std::pair<int, double>> fixes;
      fixes.reserve(binaries.size());
      for (int j : binaries) fixes.emplace_back(j, std::round(x[j]));
      apply(fixes);
      if (simplex.solve() != LpStatus::optimal) continue;
      const double value = simplex.objective();
      if (value < incumbent) {
        incumbent = value;
        best = to_values(simplex.primal());
      }
      continue;
    }
    auto down = current;
    down.emplace_back(branch, 0.0);
    open.push(Node{bound, seq++, std::move(down)});
    current.emplace_back(branch, 1.0);
    have_current = true;
  }

  out.lp_iterations = simplex.iterations();
  if (!best.empty()) {
    out.values = std::move(best);
    out.status = limit;
    fill_evaluated(p, out);
    out.objective_vector = out.evaluated;
    out.objective_vector[static_cast<std::size_t>(objective - 1)] = incumbent + constant;
  } else {
    out.status = limit == SolveStatus::Optimal ? SolveStatus::Infeasible : limit;
  }
  return out;
}

Clock::time_point now() { return Clock::now(); }

}  // namespace

Solution solve_lp(const MipProgram& program, const SolveConfig& config, int objective) {
  if (objective < 1 || objective > 3) throw InvalidInstance("objective index must be 1, 2 or 3");
  DualSimplex simplex(to_lp(program, objective, {}), lp_options(config));
  Solution out;
  out.status = from_lp(simplex.solve());
  out.nodes = 1;
  out.lp_iterations = simplex.iterations();
  if (out.status == SolveStatus::Optimal) {
    out.values = to_values(simplex.primal());
    fill_evaluated(program, out);
    out.objective_vector = out.evaluated;
  }
  return out;
}

Solution solve_mip(const MipProgram& program, const SolveConfig& config, int objective) {
  if (objective < 1 || objective > 3) throw InvalidInstance("objective index must be 1, 2 or 3");
  return branch_and_bound(program, config, objective, {}, now());
}

Solution solve_lexicographic(const MipProgram& program, const SolveConfig& config) {
  const auto start = now();
  Solution out;
  std::vector<Cap> caps;
  for (int k = 1; k <= 3; ++k) {
    Solution stage = branch_and_bound(program, config, k, caps, start);
    out.nodes += stage.nodes;
    out.lp_iterations += stage.lp_iterations;
    StageRecord record;
    record.objective = k;
    record.status = stage.status;
    record.nodes = stage.nodes;
    if (stage.status != SolveStatus::Optimal) {
      out.stages.push_back(record);
      out.status = stage.status;
      out.failed_stage = k;
      if (!stage.values.empty()) {
        out.values = std::move(stage.values);
        fill_evaluated(program, out);
      }
      return out;
    }
    const double optimum = stage.objective_vector[static_cast<std::size_t>(k - 1)];
    record.optimum = optimum;
    record.epsilon = lex_epsilon(config, optimum);
    out.stages.push_back(record);
    out.objective_vector[static_cast<std::size_t>(k - 1)] = optimum;
    caps.push_back(Cap{&program.objectives[static_cast<std::size_t>(k - 1)], optimum + record.epsilon});
    out.values = std::move(stage.values);
  }
  out.status = SolveStatus::Optimal;
  fill_evaluated(program, out);
  return out;
}

Solution brute_force(const MipProgram& program, const SolveConfig& config, int max_binaries) {
  const std::vector<int> binaries = binaries_by_name(program);
  if (static_cast<int>(binaries.size()) > max_binaries)
    throw TooManyBinaries(std::to_string(binaries.size()) + " binaries exceed the enumeration cap of " +
                          std::to_string(max_binaries));
  const std::uint64_t count = std::uint64_t{1} << binaries.size();
  Solution out;
  std::vector<Cap> caps;
  for (int k = 1; k <= 3; ++k) {
    DualSimplex simplex(to_lp(program, k, caps), lp_options(config));
    double best = kInf;
    std::vector<double> best_values;
    bool unbounded = false;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      for (std::size_t b = 0; b < binaries.size(); ++b) {
        const double v = (mask >> b) & 1U ? 1.0 : 0.0;
        simplex.set_column_bounds(binaries[b], v, v);
      }
      ++out.nodes;
      const LpStatus st = simplex.solve();
      if (st == LpStatus::unbounded) {
        unbounded = true;
        break;
      }
      if (st == LpStatus::iteration_limit) {
        out.status = SolveStatus::IterationLimit;
        out.failed_stage = k;
        return out;
      }
      if (st != LpStatus::optimal) continue;
      const double value = simplex.objective();
      if (value < best) {
        best = value;
        best_values = to_values(simplex.primal());
      }
    }
    out.lp_iterations += simplex.iterations();
    StageRecord record;
    record.objective = k;
    if (unbounded || best_values.empty()) {
      record.status = unbounded ? SolveStatus::Unbounded : SolveStatus::Infeasible;
      out.stages.push_back(record);
      out.status = record.status;
      out.failed_stage = k;
      return out;
    }
    const double optimum = best + program.objectives[static_cast<std::size_t>(k - 1)].constant;
    record.optimum = optimum;
    record.epsilon = lex_epsilon(config, optimum);
    out.stages.push_back(record);
    out.objective_vector[static_cast<std::size_t>(k - 1)] = optimum;
    caps.push_back(Cap{&program.objectives[static_cast<std::size_t>(k - 1)], optimum + record.epsilon});
    out.values = std::move(best_values);
  }
  out.status = SolveStatus::Optimal;
  fill_evaluated(program, out);
  return out;
}

std::vector<FeasibilityViolation> audit_solution(const MipProgram& program, const std::vector<double>& values,
                                                 double tolerance, double integrality) {
  std::vector<FeasibilityViolation> out;
  if (values.size() != program.variables.size()) {
    out.push_back({"value count " + std::to_string(values.size()) + " != " + std::to_string(program.variables.size()),
                   std::abs(static_cast<double>(values.size()) - static_cast<double>(program.variables.size()))});
    return out;
  }
  for (std::size_t j = 0; j < values.size(); ++j) {
    const auto& v = program.variables[j];
    const double x = values[j];
    if (!std::isfinite(x)) {
      out.push_back({v.name + " is not finite", kInf});
      continue;
    }
    if (x < v.lower - tolerance) out.push_back({v.name + " below lower bound", v.lower - x});
    if (x > v.upper + tolerance) out.push_back({v.name + " above upper bound", x - v.upper});
    if (v.binary) {
      const double frac = std::abs(x - std::round(x));
      if (frac > integrality) out.push_back({v.name + " not integral", frac});
    }
  }
  for (const auto& c : program.constraints) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * values[static_cast<std::size_t>(t.var)];
    double excess = 0.0;
    switch (c.sense) {
      case Sense::le: excess = lhs - c.rhs; break;
      case Sense::ge: excess = c.rhs - lhs; break;
      case Sense::eq: excess = std::abs(lhs - c.rhs); break;
    }
    if (excess > tolerance) out.push_back({c.name + " violated", excess});
  }
  return out;
}

}  // namespace mesmix
