#pragma once

#include <vector>

#include "rhdeform/jump.hpp"
#include "rhdeform/planar_graph.hpp"

namespace rhd {

/// Edge weights layered over a PlanarGraph, indexed by edge id.
struct WeightedPlanarGraph {
  const PlanarGraph* base = nullptr;
  std::vector<double> weight;

  double total_of(const std::vector<int>& vertex_path) const;
};

/// Two-point trapezoidal weight of the segment [a, b]:
/// 0.5 |b - a| (d(G(a)) + d(G(b))), clamped at the 1e300 sentinel.
double edge_weight(const JumpFunction& gj, const LocalWeight& w, Complex a, Complex b);

/// Applies edge_weight to every edge. OpenMP-parallel over edges.
WeightedPlanarGraph weight_graph(const PlanarGraph& g, const JumpFunction& gj,
                                 const LocalWeight& w);

/// Serial reference implementation; must produce bitwise-identical weights.
WeightedPlanarGraph weight_graph_serial(const PlanarGraph& g, const JumpFunction& gj,
                                        const LocalWeight& w);

/// Vertex path with derived weight and geometry.
struct GraphPath {
  std::vector<int> vertices;

  bool single_vertex() const { return vertices.size() == 1; }
  int front() const { return vertices.front(); }
  int back() const { return vertices.back(); }
  size_t num_edges() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  std::vector<Complex> polyline(const PlanarGraph& g) const;
  bool is_simple() const;
};

GraphPath reverse(const GraphPath& p);

/// Dijkstra with a binary heap. Tie-breaks are deterministic: the queue pops
/// by (distance, vertex id) and on exactly equal distance the smaller parent
/// id wins, so runs are reproducible across platforms.
GraphPath shortest_path(const WeightedPlanarGraph& g, int u, int v);

/// Distances and parents from a source (parent of unreachable/source is -1).
struct ShortestPathTree {
  std::vector<double> dist;
  std::vector<int> parent;
  GraphPath path_to(int v) const;     // from the tree root to v
  GraphPath path_from(int v) const;   // from v to the tree root
};
ShortestPathTree dijkstra_tree(const WeightedPlanarGraph& g, int source);

/// Weight-then-length variant: minimizes total weight and breaks exact weight
/// ties by Euclidean path length. Keeps candidates in zero-weight regions
/// from wandering or wrapping around cut endpoints.
GraphPath shortest_path_geo(const WeightedPlanarGraph& g, int u, int v);

}  // namespace rhd
