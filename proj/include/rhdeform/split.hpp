#pragma once

#include <utility>
#include <vector>

#include "rhdeform/planar_graph.hpp"
#include "rhdeform/weighted_graph.hpp"

namespace rhd {

/// Result of cutting a graph along one or more non-crossing paths.
///
/// Interior path vertices are duplicated, one copy per angular sector between
/// consecutive fixed edges in the rotation order; path endpoints (and any
/// extra pinch vertices) are never duplicated, so walks can still pass
/// through them. Copies keep the original position; offset_pos is displaced
/// into the sector so winding/planarity predicates see the cut open.
struct CutGraph {
  PlanarGraph graph;
  std::vector<int> ancestor;              // new vertex id -> source vertex id
  std::vector<int> edge_ancestor;         // new edge id -> source edge id
  std::vector<std::vector<int>> copies;   // source vertex id -> new ids, in sector order
  double offset_eps = 0;                  // displacement of copy offset positions

  /// Hugging copy sequences per input path: the copies adjacent to the path
  /// on its left / right side. For a single-path cut these are p- and p+.
  std::vector<GraphPath> left_of;
  std::vector<GraphPath> right_of;

  /// The copy of `source_v` whose sector contains the direction `angle`.
  /// Throws NotSplittable if the direction coincides with a cut edge.
  int copy_at(int source_v, double angle) const;

  /// Lifts a path of source-graph vertices into the cut graph by walking
  /// adjacency; returns false if some edge no longer exists on one side.
  bool lift_path(const GraphPath& src, GraphPath& out) const;

  std::vector<double> sector_angles_of(int source_v) const;

 private:
  friend CutGraph cut_along(const PlanarGraph&, const std::vector<GraphPath>&,
                            const std::vector<int>&);
  std::vector<std::vector<double>> sector_starts_;  // per source vertex
};

/// Cuts `g` along the union of the given simple paths. Path endpoints and
/// `extra_pinch` vertices are pinch points (kept single).
CutGraph cut_along(const PlanarGraph& g, const std::vector<GraphPath>& paths,
                   const std::vector<int>& extra_pinch = {});

/// Record of a single-path split, in the vocabulary of the deformation
/// algorithms: p- is the left copy, p+ the right copy.
struct SplitRecord {
  GraphPath original;                    // source ids
  GraphPath left;                        // p-, new ids
  GraphPath right;                       // p+, new ids
  std::vector<int> ancestor;             // new id -> source id
  std::vector<std::vector<int>> copies;  // source id -> new ids
};

/// Splits along one simple path whose endpoints act as pinch points.
std::pair<PlanarGraph, SplitRecord> split_graph(const PlanarGraph& g, const GraphPath& p);

/// Transfers edge weights through a cut: every cut edge inherits the weight
/// of its ancestor edge (copies share positions, so weights are unchanged).
std::vector<double> transfer_weights(const CutGraph& cut, const std::vector<double>& w);

/// Polyline hugging one side of a path, displaced by `delta` into the wedge
/// bisector at every interior vertex (endpoints stay put). side +1 = left of
/// travel, -1 = right. Used as the channel boundary for winding tests; with
/// delta larger than the cut offset, split copies land on their correct side.
std::vector<Complex> side_channel(const PlanarGraph& g, const GraphPath& path,
                                  int side, double delta);

}  // namespace rhd
