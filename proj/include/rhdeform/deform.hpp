#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "rhdeform/planar_graph.hpp"
#include "rhdeform/rhp.hpp"
#include "rhdeform/split.hpp"
#include "rhdeform/weighted_graph.hpp"

namespace rhd {

/// One contour part embedded in the deformation graph.
struct ArcOnGraph {
  JumpFunction jump;
  int v_start = -1, v_end = -1;        // snapped endpoint vertices
  GraphPath snapped;                   // the arc embedded edge-by-edge
  std::vector<Complex> original;       // arc geometry with snapped endpoints
  int family = -1;                     // lensing family id, -1 if unconstrained
  int family_pos = 0;                  // geometric order within the family, 0 = leftmost
};

struct ImproveRecord {
  int i1 = -1, i2 = -1;
  double weight_before = 0, weight_after = 0;
  int rounds = 0;
  bool skipped = false;
  std::string reason;
};

struct IterationRecord {
  std::vector<std::pair<int, double>> candidate_weights;  // (arc index, weight)
  int chosen = -1;
  double chosen_weight = 0;
  int splits_applied = 0;        // fixed paths the graphs were cut along
  int split_vertices = 0;        // duplicated vertices in the cut
  std::vector<ImproveRecord> improvements;
};

struct DeformationTrace {
  std::vector<double> snap_distances;     // per arc endpoint pair: max snap distance
  std::vector<IterationRecord> iterations;
  nlohmann::json to_json() const;
};

struct DeformationResult {
  RHProblem rhp;                       // mapped output problem
  std::vector<GraphPath> fixed;        // final paths, pristine vertex ids
  DeformationTrace trace;
  double input_weight = 0;             // snapped input contour weight
  double output_weight = 0;            // mapped output contour weight
};

struct DeformOptions {
  int improve_recursion_limit = 32;
  bool verify_condition_ii = true;
};

/// Index of the maximal-weight candidate; ties go to the lowest index.
int select_dominant(const std::vector<std::pair<int, double>>& candidates);

/// Two-point trapezoidal contour weight: the graph-side measure of relative
/// strength, summed over every polyline segment of every part.
double contour_weight(const RHProblem& rhp, const LocalWeight& w);

/// Embeds an arc polyline into the graph as the deviation-minimal path
/// between the snapped endpoints.
GraphPath embed_polyline(const PlanarGraph& g, const std::vector<Complex>& polyline);

/// Relative placement of two paths along a shared contiguous subpath.
/// +1: first path is left of the second, -1: right, 0: no geometric
/// divergence (identical paths).
int side_of_shared_subpath(const PlanarGraph& g, const GraphPath& a, const GraphPath& b);

/// Contiguous runs of edges shared by two paths, as index ranges into `a`
/// ([begin, end] vertex indices) with the matching range in `b`.
struct SharedComponent {
  int a_begin, a_end;
  int b_begin, b_end;
  bool same_direction;
};
std::vector<SharedComponent> shared_components(const PlanarGraph& g, const GraphPath& a,
                                               const GraphPath& b);

bool contains_circle(const GraphPath& p);
GraphPath drop_circle(const GraphPath& p);

/// Shared-subpath improvement: reroutes the subpath shared by fixed paths
/// i1 and i2 under the combined jump weight, drops circles, recomputes the
/// partner and recurses while the shared subpath keeps changing.
/// `fixed` is updated in place only on success (state transitions are
/// transactional); throws RecursionLimit beyond the configured depth.
void improve_shared_subpath(const PlanarGraph& g, const std::vector<ArcOnGraph>& arcs,
                            std::vector<GraphPath>& fixed, int i1, int i2,
                            const LocalWeight& w, const DeformOptions& opts,
                            ImproveRecord& record);

/// Condition (ii): the circle formed by the original arc and its deformation
/// must not enclose any other arc endpoint. Returns the first offending
/// endpoint, if any. Endpoints on the walk itself do not count as enclosed.
std::optional<Complex> check_condition_ii(const std::vector<Complex>& original,
                                          const std::vector<Complex>& deformed,
                                          const std::vector<Complex>& other_endpoints);

/// Inverse lensing: decomposes the union of the fixed paths into maximal
/// runs of equal coverage; a run covered by several paths carries the
/// left-to-right ordered product of their jumps.
RHProblem map_to_rhp(const PlanarGraph& g, const std::vector<ArcOnGraph>& arcs,
                     const std::vector<GraphPath>& fixed);

/// Greedy optimized deformation over a prepared graph: repeatedly fixes the
/// maximal-weight candidate path, improves shared subpaths, splits all
/// graphs along the fixed set and recomputes the remaining candidates.
DeformationResult simple_deformation_on_graph(const PlanarGraph& g,
                                              const std::vector<ArcOnGraph>& arcs,
                                              const LocalWeight& w,
                                              const DeformOptions& opts = {});

/// Snaps a finite RHP onto a fresh grid over its bounding box and runs the
/// greedy deformation. nx, ny are the lattice vertex counts.
DeformationResult simple_deformation(const RHProblem& rhp, int nx, int ny,
                                     const LocalWeight& w = {},
                                     const DeformOptions& opts = {});

/// Prepares arcs on an existing graph (snapping + embedding).
std::vector<ArcOnGraph> snap_arcs(const PlanarGraph& g, const RHProblem& rhp,
                                  std::vector<double>* snap_distances = nullptr);

}  // namespace rhd
