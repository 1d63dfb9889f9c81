#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mesmix/mip.hpp"
#include "mesmix/model_b.hpp"
#include "mesmix/solve.hpp"

namespace mesmix {

/// A pipeline failure tagged with the step that raised it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct CompareConfig {
  SolveConfig solve;
  CompileOptions compile;
  bool run_solver = true;
  bool concurrent = true;
  double agreement_tolerance = 1e-6;  // relative, per objective component
};

struct ComparisonReport {
  std::string instance;
  SizeReport size_a;
  SizeReport size_b;
  SizeIdentities identities;
  std::vector<CoverageGap> coverage_a;
  std::vector<CoverageGap> coverage_b;
  bool solved = false;
  Solution solution_a;
  Solution solution_b;
  std::array<double, 3> relative_difference{0.0, 0.0, 0.0};
  bool objectives_agree = false;

  /// Fraction removed from A to B: 1 - b/a.
  static double reduction(long a, long b) { return a == 0 ? 0.0 : 1.0 - static_cast<double>(b) / a; }
  /// Agreement of the objective vectors, or true when nothing was solved.
  bool equivalent() const { return !solved || objectives_agree; }
};

/// |a - b| / max(1, |a|, |b|).
double relative_difference(double a, double b);

/// Builds both forms, compiles, sizes, audits coverage and (optionally) solves
/// both lexicographically. Errors come back as StageError.
ComparisonReport run_compare(const NetworkGraph& instance, const CompareConfig& config = {});

nlohmann::json size_report_to_json(const SizeReport& r);
nlohmann::json size_identities_to_json(const SizeIdentities& s);
nlohmann::json coverage_to_json(const std::vector<CoverageGap>& gaps);
nlohmann::json contraction_log_to_json(const std::vector<ReductionStep>& log);

/// Objective vector, stage bounds, commitment schedules per group, storage
/// trajectories and every variable value by name.
nlohmann::json solution_to_json(const MipProgram& program, const Solution& s);

nlohmann::json comparison_to_json(const ComparisonReport& r);

}  // namespace mesmix
