#pragma once

#include "fxtflow/io.hpp"
#include "fxtflow/problems.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fxt {

/// Command-line overrides applied to every method of a case.
struct CaseOverrides {
  std::optional<double> dt;
  std::optional<double> t_max;
  std::optional<double> settle_tol;
};

void apply_overrides(CaseInstance& inst, const CaseOverrides& o);

struct RunRecord {
  std::string method;
  int run = 0;
  Trajectory trajectory;
  std::vector<double> errors;     // error_metric per recorded sample
  std::vector<double> settle;     // settle_metric per recorded sample
  std::optional<double> settling;  // first time after which settle <= tol
  std::optional<double> regret;

  double error_at(double t) const;  // sample nearest to t
  /// Min and max of the error over recorded samples with t in [a, b].
  std::pair<double, double> error_range(double a, double b) const;
};

struct CaseCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CaseResult {
  int id = 0;
  std::vector<RunRecord> runs;
  std::vector<CaseCheck> checks;

  bool passed() const;
  std::vector<const RunRecord*> runs_of(const std::string& method) const;
};

/// Runs every (method, initialization) pair concurrently and evaluates the
/// case acceptance thresholds.
CaseResult run_case(const CaseInstance& inst);

std::vector<CaseCheck> evaluate_case(const CaseInstance& inst, const CaseResult& result);

/// Least-squares fit of y = a + b t; returns (slope, r_squared).
std::pair<double, double> linear_fit(const std::vector<double>& t, const std::vector<double>& y);

/// Median of the error over the final `window` seconds of a run.
double tail_median(const RunRecord& run, double window);

/// Writes case<id>_<method>_run<k>.csv per run, case<id>_summary.txt and
/// case<id>_instance.json into out_dir. Returns the summary.
Summary write_case_outputs(const CaseInstance& inst, const CaseResult& result,
                           const std::string& out_dir);
Summary case_summary(const CaseInstance& inst, const CaseResult& result);

}  // namespace fxt
