#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rhdeform/collocation.hpp"
#include "rhdeform/deform.hpp"
#include "rhdeform/lensing.hpp"
#include "rhdeform/rhp.hpp"
#include "rhdeform/simplify.hpp"

namespace rhd {

struct PipelineConfig {
  int nx = 17, ny = 17;          // grid vertices per side
  double threshold = 1e-16;      // truncation threshold for unbounded arcs
  int lensing_steps = 2;
  double simplify_tau = 0.5;
  int n_per_arc = 20;
  bool do_simplify = true;
  bool compute_kappa = true;     // per-stage condition numbers in the summary
  std::string output_dir;        // when set, artifact files are written here

  void validate() const;
};

struct StageReport {
  std::string name;              // original | deformed | lensed-k | simplified
  RHProblem rhp;
  double weight = 0;             // two-point trapezoidal contour weight
  double kappa = 0;              // 0 when not computed; 1e300 on overflow
  bool kappa_overflow = false;
  nlohmann::json extra;
};

struct PipelineResult {
  std::vector<StageReport> stages;
  std::optional<SolverResult> solution;
  nlohmann::json trace;          // per-stage deformation traces
  nlohmann::json summary;        // machine-readable weights/kappas per stage

  const RHProblem& final_rhp() const { return stages.back().rhp; }
};

/// Drops contour parts whose jump is numerically the identity along the whole
/// arc; they carry no constraint and only cost collocation points.
RHProblem drop_identity_parts(const RHProblem& rhp, double tol = 1e-16,
                              int samples_per_segment = 16);

/// Chains truncation, simple deformation, lensing steps and simplification.
/// When `solve_final` is set, the last stage is solved at cfg.n_per_arc.
PipelineResult run_pipeline(const RHProblem& rhp, const PipelineConfig& cfg,
                            bool solve_final);

/// Pointwise Painleve II evaluation through the full pipeline; the error
/// estimate comes from doubling the node budget.
Complex painleve2_eval(double x, Complex s1, Complex s2, const PipelineConfig& cfg,
                       double* error_estimate = nullptr);

struct SweepRow {
  double x = 0;
  double kappa_original = 0;
  double kappa_deformed = 0;
  bool original_overflow = false;
};

/// Condition numbers of the original and the simply-deformed contour over a
/// range of x values (inclusive ends, positive step). Points run in parallel.
std::vector<SweepRow> run_sweep(double x_from, double x_to, double step, Complex s1,
                                Complex s2, const PipelineConfig& cfg);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

/// Writes contour.json, trace.json, figure.svg and summary.json to
/// cfg.output_dir (which must exist).
void write_artifacts(const PipelineResult& result, const PipelineConfig& cfg);

}  // namespace rhd
