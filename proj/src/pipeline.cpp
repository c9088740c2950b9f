#include "rhdeform/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "rhdeform/errors.hpp"
#include "rhdeform/svg.hpp"

namespace rhd {

void PipelineConfig::validate() const {
  if (nx < 2 || ny < 2) throw InvalidInput("grid must have at least 2x2 vertices");
  if (!(threshold > 0)) throw InvalidInput("threshold must be positive");
  if (lensing_steps < 0) throw InvalidInput("lensing steps must be >= 0");
  if (!(simplify_tau > 0)) throw InvalidInput("simplify tau must be positive");
  if (n_per_arc < 1) throw InvalidInput("n_per_arc must be positive");
}

RHProblem drop_identity_parts(const RHProblem& rhp, double tol,
                              int samples_per_segment) {
  LocalWeight w;
  RHProblem out;
  out.dimension = rhp.dimension;
  for (const auto& part : rhp.parts) {
    double strongest = 0.0;
    const auto& pts = part.arc.points;
    for (size_t i = 1; i < pts.size(); ++i)
      for (int k = 0; k < samples_per_segment; ++k) {
        double t = static_cast<double>(k) / (samples_per_segment - 1);
        strongest = std::max(strongest, w(part.jump(pts[i - 1] + t * (pts[i] - pts[i - 1]))));
      }
    if (strongest >= tol) out.parts.push_back(part);
  }
  if (out.parts.empty() && !rhp.parts.empty()) out.parts.push_back(rhp.parts.front());
  return out;
}

namespace {

// A jammed greedy shows up as a deformed weight far above the O(10) scale of
// a healthy preconditioning. The narrow low-weight corridors that cause the
// jam are a resolution artifact, so retry on finer grids and keep the
// lightest result.
DeformationResult deform_with_fallback(const RHProblem& finite, int nx, int ny) {
  auto best = simple_deformation(finite, nx, ny);
  if (best.output_weight <= 100.0) return best;
  for (int finer : {21, 25, 29, 33}) {
    if (finer <= std::max(nx, ny)) continue;
    DeformationResult alt;
    try {
      alt = simple_deformation(finite, finer, finer);
    } catch (const Error&) {
      continue;
    }
    if (alt.output_weight < best.output_weight) best = std::move(alt);
    if (best.output_weight <= 100.0) break;
  }
  return best;
}

double stage_kappa(const RHProblem& rhp, int n_per_arc, bool* overflow) {
  *overflow = false;
  try {
    return condition_number(assemble(rhp, n_per_arc));
  } catch (const SingularMatrix&) {
    *overflow = true;
    return 1e300;
  }
}

StageReport make_stage(const std::string& name, RHProblem rhp,
                       const PipelineConfig& cfg) {
  StageReport s;
  s.name = name;
  s.weight = contour_weight(rhp, LocalWeight{});
  if (cfg.compute_kappa)
    s.kappa = stage_kappa(rhp, cfg.n_per_arc, &s.kappa_overflow);
  s.rhp = std::move(rhp);
  return s;
}

}  // namespace

PipelineResult run_pipeline(const RHProblem& rhp, const PipelineConfig& cfg,
                            bool solve_final) {
  cfg.validate();
  PipelineResult result;
  result.trace = nlohmann::json::object();

  RHProblem finite = truncate_to_rectangle(rhp, LocalWeight{}, cfg.threshold);
  result.stages.push_back(make_stage("original", finite, cfg));

  auto deformed = deform_with_fallback(finite, cfg.nx, cfg.ny);
  result.trace["deformed"] = deformed.trace.to_json();
  result.stages.push_back(make_stage("deformed", drop_identity_parts(deformed.rhp), cfg));

  RHProblem current = result.stages.back().rhp;
  LensingOptions lens_opts;
  lens_opts.kappa_estimator = [&](const RHProblem& candidate) {
    return condition_number(assemble(candidate, std::min(cfg.n_per_arc, 12)));
  };
  for (int step = 0; step < cfg.lensing_steps; ++step) {
    auto lens = lensing_deformation(current, cfg.nx, cfg.ny, LocalWeight{}, lens_opts);
    std::string name = "lensed-" + std::to_string(step + 1);
    result.trace[name] = {{"variants", lens.variants},
                          {"dominant_part", lens.dominant_part},
                          {"chosen", lens.chosen_kind},
                          {"deformation", lens.deformation.trace.to_json()}};
    current = drop_identity_parts(lens.deformation.rhp);
    result.stages.push_back(make_stage(name, current, cfg));
  }

  if (cfg.do_simplify) {
    SimplifyStats stats;
    auto simplified = simplify_contour(current, cfg.simplify_tau, 1e-12, 64, &stats);
    StageReport s = make_stage("simplified", simplified, cfg);
    s.extra = {{"breakpoints_before", stats.breakpoints_before},
               {"breakpoints_after", stats.breakpoints_after}};
    result.stages.push_back(std::move(s));
  }

  if (solve_final) result.solution = solve(assemble(result.final_rhp(), cfg.n_per_arc));

  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : result.stages) {
    nlohmann::json j = {{"name", s.name},
                        {"weight", s.weight},
                        {"parts", s.rhp.parts.size()},
                        {"breakpoints", count_breakpoints(s.rhp)}};
    if (cfg.compute_kappa) {
      j["kappa"] = s.kappa;
      j["kappa_overflow"] = s.kappa_overflow;
    }
    if (!s.extra.is_null()) j["extra"] = s.extra;
    stages.push_back(j);
  }
  result.summary = {{"stages", stages}};
  if (result.solution) {
    result.summary["solution"] = {
        {"u", {result.solution->u.real(), result.solution->u.imag()}},
        {"kappa", result.solution->kappa},
        {"residual", result.solution->residual},
        {"dim", result.solution->dim}};
  }

  if (!cfg.output_dir.empty()) write_artifacts(result, cfg);
  return result;
}

Complex painleve2_eval(double x, Complex s1, Complex s2, const PipelineConfig& cfg,
                       double* error_estimate) {
  auto params = stokes_complete(s1, s2);
  params.x = x;
  auto result = run_pipeline(painleve2_rhp(params), cfg, false);
  auto coarse = solve(assemble(result.final_rhp(), cfg.n_per_arc));
  auto fine = solve(assemble(result.final_rhp(), 2 * cfg.n_per_arc));
  if (error_estimate) *error_estimate = std::abs(fine.u - coarse.u);
  return fine.u;
}

std::vector<SweepRow> run_sweep(double x_from, double x_to, double step, Complex s1,
                                Complex s2, const PipelineConfig& cfg) {
  cfg.validate();
  if (!(step > 0)) throw InvalidInput("sweep step must be positive");
  if (x_from < -40.0 || x_to > 10.0) throw InvalidInput("sweep range outside [-40, 10]");
  std::vector<double> xs;
  for (double x = x_from; x <= x_to + 1e-12; x += step) xs.push_back(x);
  std::vector<SweepRow> rows(xs.size());
  std::vector<std::string> errors(xs.size());

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
    try {
      auto params = stokes_complete(s1, s2);
      params.x = xs[i];
      RHProblem finite =
          truncate_to_rectangle(painleve2_rhp(params), LocalWeight{}, cfg.threshold);
      SweepRow row;
      row.x = xs[i];
      row.kappa_original = stage_kappa(finite, cfg.n_per_arc, &row.original_overflow);
      auto deformed = deform_with_fallback(finite, cfg.nx, cfg.ny);
      bool ignored = false;
      row.kappa_deformed =
          stage_kappa(drop_identity_parts(deformed.rhp), cfg.n_per_arc, &ignored);
      rows[i] = row;
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  }
  for (size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty())
      throw Error("sweep point x=" + std::to_string(xs[i]) + ": " + errors[i]);
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string csv = "x,kappa_original,kappa_deformed,original_overflow\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", r.x, r.kappa_original,
                  r.kappa_deformed, r.original_overflow ? 1 : 0);
    csv += buf;
  }
  return csv;
}

void write_artifacts(const PipelineResult& result, const PipelineConfig& cfg) {
  const std::string dir = cfg.output_dir;
  save_rhproblem(result.final_rhp(), dir + "/contour.json");
  write_text_file(dir + "/trace.json", result.trace.dump(2) + "\n");
  write_text_file(dir + "/summary.json", result.summary.dump(2) + "\n");

  Rectangle rect;
  bool first = true;
  for (const auto& part : result.stages.front().rhp.parts)
    for (Complex p : part.arc.points) {
      if (first) {
        rect.x_min = rect.x_max = p.real();
        rect.y_min = rect.y_max = p.imag();
        first = false;
      }
      rect.x_min = std::min(rect.x_min, p.real());
      rect.x_max = std::max(rect.x_max, p.real());
      rect.y_min = std::min(rect.y_min, p.imag());
      rect.y_max = std::max(rect.y_max, p.imag());
    }
  PlanarGraph grid;
  if (rect.width() > 0 && rect.height() > 0) grid = build_grid_graph(rect, cfg.nx, cfg.ny);
  std::vector<Panel> panels;
  for (const auto& s : result.stages)
    panels.push_back({&s.rhp, grid.num_vertices() ? &grid : nullptr, s.name});
  std::vector<Complex> markers{Complex(0, 0)};
  // Stationary-phase markers when the problem looks like Painleve II.
  for (const auto& part : result.stages.front().rhp.parts) {
    const auto& d = part.jump.descriptor();
    if (d.value("op", "") == "painleve2_ray") {
      for (Complex sp : theta_stationary_points(d.value("x", 0.0))) markers.push_back(sp);
      break;
    }
  }
  write_text_file(dir + "/figure.svg", render_svg(panels, markers));
}

}  // namespace rhd
