#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "mesmix/lp.hpp"
#include "mesmix/mip.hpp"

namespace mesmix {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit, NodeLimit, TimeLimit };

const char* to_string(SolveStatus s);

struct SolveConfig {
  double lp_tolerance = 1e-9;
  double integrality_tolerance = 1e-6;
  double lex_relative = 1e-6;  // cap f_k <= f_k* + lex_relative * max(1, |f_k*|)
  long node_limit = 1'000'000;
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  long iteration_limit = 5'000'000;
};

struct StageRecord {
  int objective = 1;
  double optimum = 0.0;
  double epsilon = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  long nodes = 0;
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> values;  // indexed like MipProgram::variables
  // Lexicographic runs report the stage optima here; single solves report f(values).
  std::array<double, 3> objective_vector{0.0, 0.0, 0.0};
  std::array<double, 3> evaluated{0.0, 0.0, 0.0};
  std::vector<StageRecord> stages;
  long nodes = 0;
  long lp_iterations = 0;
  int failed_stage = 0;  // 1-based stage whose solve did not reach optimality

  double value(const MipProgram& p, const std::string& name) const;
};

double evaluate(const LinearExpr& e, const std::vector<double>& values);

/// Linear relaxation: binaries take any value in [0, 1].
Solution solve_lp(const MipProgram& program, const SolveConfig& config = {}, int objective = 1);

/// Branch and bound on the binaries for one objective.
Solution solve_mip(const MipProgram& program, const SolveConfig& config = {}, int objective = 1);

/// Minimises f1, then f2 with f1 capped, then f3 with both capped.
Solution solve_lexicographic(const MipProgram& program, const SolveConfig& config = {});

/// Lexicographic optimum by enumerating every binary assignment.
Solution brute_force(const MipProgram& program, const SolveConfig& config = {}, int max_binaries = 20);

struct FeasibilityViolation {
  std::string what;
  double amount = 0.0;
};

/// Checks bounds, integrality and every row by direct evaluation.
std::vector<FeasibilityViolation> audit_solution(const MipProgram& program, const std::vector<double>& values,
                                                 double tolerance = 1e-7, double integrality = 1e-6);

}  // namespace mesmix
