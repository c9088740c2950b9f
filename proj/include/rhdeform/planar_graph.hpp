#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "rhdeform/jump.hpp"
#include "rhdeform/rhp.hpp"

namespace rhd {

struct Rectangle {
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(Complex z) const {
    return z.real() >= x_min && z.real() <= x_max && z.imag() >= y_min &&
           z.imag() <= y_max;
  }
  bool contains(const Rectangle& r) const {
    return r.x_min >= x_min && r.x_max <= x_max && r.y_min >= y_min && r.y_max <= y_max;
  }
};

/// Straight-line embedded planar graph. Vertices carry true positions plus
/// slightly displaced positions used only for winding/planarity predicates:
/// vertex copies created by splitting coincide geometrically, and the offset
/// separates them into their angular sectors.
struct PlanarGraph {
  std::vector<Complex> pos;
  std::vector<Complex> offset_pos;              // == pos unless the vertex is a split copy
  std::vector<std::pair<int, int>> edges;       // u < v, sorted lexicographically
  std::vector<std::vector<std::pair<int, int>>> adj;  // per vertex: (neighbor, edge id),
                                                      // sorted by angle of (neighbor - vertex)

  int num_vertices() const { return static_cast<int>(pos.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  /// Rebuilds edge ids, adjacency and rotation order from `pos` and `edges`.
  void finalize();

  int edge_between(int u, int v) const;  // -1 if absent
  double edge_angle_at(int v, int neighbor) const;

  /// Removes all vertices for which `forbidden` is true (and their edges).
  /// Returns the old-id -> new-id map (-1 for removed vertices).
  std::vector<int> remove_if(const std::function<bool(Complex)>& forbidden);
};

/// Grid graph on `rect` with nx * ny lattice vertices plus one center vertex
/// per box connected to the four box corners.
PlanarGraph build_grid_graph(const Rectangle& rect, int nx, int ny);

/// Euclidean nearest vertex; ties broken by lowest vertex id.
int nearest_vertex(const PlanarGraph& g, Complex p);

/// Smallest axis-aligned rectangle containing all finite arc endpoints such
/// that along every unbounded arc the local weight of the jump falls (and
/// stays) below `threshold` outside. Throws NoDecay if an unbounded arc does
/// not decay below the threshold within `search_radius`.
Rectangle bounding_rectangle(const RHProblem& rhp, const LocalWeight& w,
                             double threshold, double search_radius = 1e4);

/// Replaces unbounded arcs by finite polylines truncated where the jump
/// weight has fallen below the threshold used for `rect`.
RHProblem truncate_to_rectangle(const RHProblem& rhp, const LocalWeight& w,
                                double threshold, double search_radius = 1e4);

/// Brute-force straight-line planarity check (no two edge segments intersect
/// except at shared endpoints), using offset positions. Quadratic; meant for
/// tests and small graphs.
bool is_planar_embedding(const PlanarGraph& g);

}  // namespace rhd
