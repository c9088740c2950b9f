// Compares the OpenMP kernels against their serial reference implementations:
// edge weighting of the deformation graphs and collocation-matrix assembly.

#include <chrono>
#include <cstdio>
#include <cstring>

#include <omp.h>

#include <nlohmann/json.hpp>

#include "rhdeform/collocation.hpp"
#include "rhdeform/deform.hpp"
#include "rhdeform/planar_graph.hpp"
#include "rhdeform/rhp.hpp"
#include "rhdeform/weighted_graph.hpp"

using namespace rhd;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() /
         reps;
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  int grid = quick ? 17 : 65;
  int n_per_arc = quick ? 8 : 24;
  int reps = quick ? 1 : 3;

  auto params = stokes_complete(1.0, 2.0);
  params.x = -10.0;
  auto rhp = truncate_to_rectangle(painleve2_rhp(params), LocalWeight{}, 1e-16);

  std::printf("threads: %d\n", omp_get_max_threads());

  Rectangle rect{-2.6, 2.6, -1.6, 1.6};
  auto g = build_grid_graph(rect, grid, grid);
  auto jump = rhp.parts[0].jump;
  LocalWeight w;

  double t_serial = seconds([&] { weight_graph_serial(g, jump, w); }, reps);
  double t_parallel = seconds([&] { weight_graph(g, jump, w); }, reps);
  auto a = weight_graph_serial(g, jump, w);
  auto b = weight_graph(g, jump, w);
  bool same = a.weight == b.weight;
  std::printf("weight_graph   %dx%d grid (%d edges): serial %8.2f ms  parallel %8.2f ms  "
              "speedup %.2fx  identical %s\n",
              grid, grid, g.num_edges(), 1e3 * t_serial, 1e3 * t_parallel,
              t_serial / t_parallel, same ? "yes" : "NO");

  auto def = simple_deformation(rhp, 17, 17);
  double t_asm_serial = seconds([&] { assemble_serial(def.rhp, n_per_arc); }, reps);
  double t_asm_parallel = seconds([&] { assemble(def.rhp, n_per_arc); }, reps);
  auto sys_a = assemble_serial(def.rhp, n_per_arc);
  auto sys_b = assemble(def.rhp, n_per_arc);
  bool asm_same = (sys_a.A - sys_b.A).norm() == 0.0;
  std::printf("assemble       dim %4d:                serial %8.2f ms  parallel %8.2f ms  "
              "speedup %.2fx  identical %s\n",
              sys_a.dim(), 1e3 * t_asm_serial, 1e3 * t_asm_parallel,
              t_asm_serial / t_asm_parallel, asm_same ? "yes" : "NO");

  return (same && asm_same) ? 0 : 1;
}
