// Command-line driver: builds Riemann-Hilbert problems, preconditions them by
// graph-based contour deformation (with optional lensing and simplification),
// solves the collocation system and reports condition numbers.

#include <complex>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rhdeform/collocation.hpp"
#include "rhdeform/errors.hpp"
#include "rhdeform/pipeline.hpp"
#include "rhdeform/rhp.hpp"
#include "rhdeform/svg.hpp"

namespace {

using rhd::Complex;

// Accepts "1", "-2.5", "3i", "1+2i", "-1.5-0.3i".
Complex parse_complex(const std::string& text) {
  std::string s = text;
  if (s.empty()) throw rhd::InvalidInput("empty complex literal");
  bool has_i = s.back() == 'i' || s.back() == 'I';
  if (!has_i) return Complex(std::stod(s), 0.0);
  s.pop_back();
  if (s.empty() || s == "+" || s == "-") return Complex(0.0, s == "-" ? -1.0 : 1.0);
  // Split at the last +/- that is not an exponent sign or leading.
  for (size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      double re = std::stod(s.substr(0, k));
      std::string im = s.substr(k);
      if (im == "+" || im == "-") im += "1";
      return Complex(re, std::stod(im));
    }
  }
  return Complex(0.0, std::stod(s));
}

struct CommonFlags {
  int nx = 17, ny = 17;
  double threshold = 1e-16;
  int lensing_steps = 2;
  double tau = 0.5;
  int n_per_arc = 20;
  std::string out_dir = ".";

  void add_to(CLI::App* app) {
    app->add_option("--nx", nx, "grid vertices in x (default 17)");
    app->add_option("--ny", ny, "grid vertices in y (default 17)");
    app->add_option("--threshold", threshold, "truncation threshold (default 1e-16)");
    app->add_option("--lensing-steps", lensing_steps, "lensing steps (default 2)");
    app->add_option("--tau", tau, "simplification weight slack (default 0.5)");
    app->add_option("--n-per-arc", n_per_arc, "collocation nodes per arc (default 20)");
    app->add_option("--out", out_dir, "output directory (default .)");
  }

  rhd::PipelineConfig config() const {
    rhd::PipelineConfig cfg;
    cfg.nx = nx;
    cfg.ny = ny;
    cfg.threshold = threshold;
    cfg.lensing_steps = lensing_steps;
    cfg.simplify_tau = tau;
    cfg.n_per_arc = n_per_arc;
    cfg.output_dir = out_dir;
    return cfg;
  }
};

rhd::RHProblem load_problem(const std::string& problem_file, const std::string& s1,
                            const std::string& s2, double x, bool painleve) {
  if (painleve) {
    auto params = rhd::stokes_complete(parse_complex(s1), parse_complex(s2));
    params.x = x;
    return rhd::painleve2_rhp(params);
  }
  if (problem_file.empty())
    throw rhd::InvalidInput("either --problem or --painleve2 is required");
  return rhd::load_rhproblem(problem_file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automatic contour-deformation preconditioning for Riemann-Hilbert problems"};
  app.require_subcommand(1);

  // ---- painleve2: write the built-in problem to JSON ----
  auto* cmd_p2 = app.add_subcommand("painleve2", "emit the Painleve II problem as JSON");
  double p2_x = -10.0;
  std::string p2_s1 = "1", p2_s2 = "2", p2_out = "problem.json";
  cmd_p2->add_option("--x", p2_x, "real parameter x");
  cmd_p2->add_option("--s1", p2_s1, "Stokes multiplier s1 (complex literal)");
  cmd_p2->add_option("--s2", p2_s2, "Stokes multiplier s2");
  cmd_p2->add_option("--out", p2_out, "output file");

  // ---- deform: full preconditioning chain without simplification ----
  auto* cmd_deform = app.add_subcommand("deform", "deform a problem (greedy + lensing)");
  CommonFlags deform_flags;
  deform_flags.add_to(cmd_deform);
  std::string deform_problem, deform_s1 = "1", deform_s2 = "2";
  double deform_x = -10.0;
  bool deform_p2 = false;
  cmd_deform->add_option("--problem", deform_problem, "problem JSON file");
  cmd_deform->add_flag("--painleve2", deform_p2, "use the built-in Painleve II problem");
  cmd_deform->add_option("--x", deform_x, "Painleve II x");
  cmd_deform->add_option("--s1", deform_s1, "Painleve II s1");
  cmd_deform->add_option("--s2", deform_s2, "Painleve II s2");

  // ---- lense: one or more lensing steps on an existing contour ----
  auto* cmd_lense = app.add_subcommand("lense", "lensing steps on a deformed contour");
  CommonFlags lense_flags;
  lense_flags.lensing_steps = 1;
  lense_flags.add_to(cmd_lense);
  std::string lense_contour;
  cmd_lense->add_option("--contour", lense_contour, "contour JSON file")->required();

  // ---- simplify ----
  auto* cmd_simplify = app.add_subcommand("simplify", "coarsen a deformed contour");
  CommonFlags simplify_flags;
  simplify_flags.add_to(cmd_simplify);
  std::string simplify_contour_file;
  cmd_simplify->add_option("--contour", simplify_contour_file, "contour JSON file")
      ->required();

  // ---- solve ----
  auto* cmd_solve = app.add_subcommand("solve", "assemble and solve a contour");
  CommonFlags solve_flags;
  solve_flags.add_to(cmd_solve);
  std::string solve_contour, solve_matrix_out;
  cmd_solve->add_option("--contour", solve_contour, "contour JSON file")->required();
  cmd_solve->add_option("--export-matrix", solve_matrix_out,
                        "write the collocation matrix as JSON");

  // ---- sweep ----
  auto* cmd_sweep = app.add_subcommand("sweep", "condition numbers over an x range");
  CommonFlags sweep_flags;
  sweep_flags.add_to(cmd_sweep);
  double sweep_from = -30.0, sweep_to = -10.0, sweep_step = 2.0;
  std::string sweep_s1 = "1", sweep_s2 = "2";
  cmd_sweep->add_option("--x-from", sweep_from, "range start");
  cmd_sweep->add_option("--x-to", sweep_to, "range end");
  cmd_sweep->add_option("--step", sweep_step, "step (positive)");
  cmd_sweep->add_option("--s1", sweep_s1, "Stokes multiplier s1");
  cmd_sweep->add_option("--s2", sweep_s2, "Stokes multiplier s2");

  // ---- render ----
  auto* cmd_render = app.add_subcommand("render", "render a problem or contour as SVG");
  std::string render_file, render_out = "figure.svg";
  cmd_render->add_option("--contour", render_file, "problem/contour JSON file")
      ->required();
  cmd_render->add_option("--out", render_out, "output SVG file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_p2->parsed()) {
      auto params = rhd::stokes_complete(parse_complex(p2_s1), parse_complex(p2_s2));
      params.x = p2_x;
      rhd::save_rhproblem(rhd::painleve2_rhp(params), p2_out);
      std::printf("wrote %s\n", p2_out.c_str());
      return 0;
    }

    if (cmd_deform->parsed()) {
      auto rhp = load_problem(deform_problem, deform_s1, deform_s2, deform_x, deform_p2);
      auto cfg = deform_flags.config();
      cfg.do_simplify = false;
      auto result = rhd::run_pipeline(rhp, cfg, false);
      for (const auto& s : result.stages)
        std::printf("%-12s weight %.6g  kappa %.6g%s\n", s.name.c_str(), s.weight,
                    s.kappa, s.kappa_overflow ? " (overflow)" : "");
      return 0;
    }

    if (cmd_lense->parsed()) {
      auto rhp = rhd::load_rhproblem(lense_contour);
      auto cfg = lense_flags.config();
      cfg.do_simplify = false;
      cfg.compute_kappa = true;
      rhd::RHProblem current = rhd::truncate_to_rectangle(rhp, rhd::LocalWeight{},
                                                          cfg.threshold);
      nlohmann::json steps = nlohmann::json::array();
      for (int k = 0; k < cfg.lensing_steps; ++k) {
        auto lens = rhd::lensing_deformation(current, cfg.nx, cfg.ny);
        current = rhd::drop_identity_parts(lens.deformation.rhp);
        steps.push_back({{"chosen", lens.chosen_kind},
                         {"dominant_part", lens.dominant_part},
                         {"variants", lens.variants}});
      }
      rhd::save_rhproblem(current, cfg.output_dir + "/contour.json");
      rhd::write_text_file(cfg.output_dir + "/trace.json", steps.dump(2) + "\n");
      std::printf("weight %.6g after %d lensing step(s)\n",
                  rhd::contour_weight(current, rhd::LocalWeight{}), cfg.lensing_steps);
      return 0;
    }

    if (cmd_simplify->parsed()) {
      auto rhp = rhd::load_rhproblem(simplify_contour_file);
      rhd::SimplifyStats stats;
      auto out = rhd::simplify_contour(rhp, simplify_flags.tau, 1e-12, 64, &stats);
      rhd::save_rhproblem(out, simplify_flags.out_dir + "/contour.json");
      std::printf("breakpoints %d -> %d\n", stats.breakpoints_before,
                  stats.breakpoints_after);
      return 0;
    }

    if (cmd_solve->parsed()) {
      auto rhp = rhd::load_rhproblem(solve_contour);
      auto finite =
          rhd::truncate_to_rectangle(rhp, rhd::LocalWeight{}, solve_flags.threshold);
      auto sys = rhd::assemble(finite, solve_flags.n_per_arc);
      auto res = rhd::solve(sys);
      nlohmann::json diag = sys.diagnostics();
      diag["kappa"] = res.kappa;
      diag["residual"] = res.residual;
      diag["u"] = {res.u.real(), res.u.imag()};
      rhd::write_text_file(solve_flags.out_dir + "/solve.json", diag.dump(2) + "\n");
      if (!solve_matrix_out.empty()) {
        nlohmann::json m;
        m["dim"] = sys.dim();
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < sys.A.rows(); ++i) {
          nlohmann::json row = nlohmann::json::array();
          for (int j = 0; j < sys.A.cols(); ++j)
            row.push_back({sys.A(i, j).real(), sys.A(i, j).imag()});
          rows.push_back(row);
        }
        m["entries"] = rows;
        rhd::write_text_file(solve_matrix_out, m.dump() + "\n");
      }
      std::printf("dim %d  kappa %.6g  residual %.3g  u = %.12g%+.12gi\n", res.dim,
                  res.kappa, res.residual, res.u.real(), res.u.imag());
      return 0;
    }

    if (cmd_sweep->parsed()) {
      auto cfg = sweep_flags.config();
      auto rows = rhd::run_sweep(sweep_from, sweep_to, sweep_step,
                                 parse_complex(sweep_s1), parse_complex(sweep_s2), cfg);
      rhd::write_text_file(cfg.output_dir + "/sweep.csv", rhd::sweep_to_csv(rows));
      for (const auto& r : rows)
        std::printf("x=%7.3f  kappa_original %.6g%s  kappa_deformed %.6g\n", r.x,
                    r.kappa_original, r.original_overflow ? " (overflow)" : "",
                    r.kappa_deformed);
      return 0;
    }

    if (cmd_render->parsed()) {
      auto rhp = rhd::load_rhproblem(render_file);
      auto finite = rhd::truncate_to_rectangle(rhp, rhd::LocalWeight{}, 1e-16);
      rhd::Panel panel{&finite, nullptr, render_file};
      rhd::write_text_file(render_out, rhd::render_svg({panel}, {rhd::Complex(0, 0)}));
      std::printf("wrote %s\n", render_out.c_str());
      return 0;
    }
  } catch (const rhd::ConditionTwoViolated& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const rhd::IllConditioned& e) {
    std::fprintf(stderr, "error: %s (kappa %.3g)\n", e.what(), e.condition);
    return 4;
  } catch (const rhd::SingularMatrix& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const rhd::AssemblyFailure& e) {
    std::fprintf(stderr, "error: %s (piece %d)\n", e.what(), e.piece_id);
    return 4;
  } catch (const rhd::InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const rhd::SingularStokesData& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const rhd::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
