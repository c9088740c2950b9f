#pragma once

#include <complex>
#include <vector>

#include "rhdeform/planar_graph.hpp"
#include "rhdeform/weighted_graph.hpp"

namespace rhd {

/// Winding number of a closed polyline around c, by signed angle summation.
/// Throws OnWalk if c is within 1e-12 * diameter of the polyline.
int winding_number(const std::vector<Complex>& closed_polyline, Complex c);

struct ClosedWalk {
  std::vector<int> vertices;  // first == last
};

/// Winding of a closed walk in a graph around c, using offset positions so
/// that split copies count on their own side of the cut.
int winding_number(const ClosedWalk& walk, const PlanarGraph& g, Complex c);

/// All vertices with winding number +-1 with respect to the walk. Vertices on
/// the walk's polyline are not part of the interior.
std::vector<int> homological_interior(const ClosedWalk& walk, const PlanarGraph& g);

double point_segment_distance(Complex p, Complex a, Complex b);
double point_polyline_distance(Complex p, const std::vector<Complex>& poly);

}  // namespace rhd
