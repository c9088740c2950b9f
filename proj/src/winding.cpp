#include "rhdeform/winding.hpp"

#include <algorithm>
#include <cmath>

#include "rhdeform/errors.hpp"

namespace rhd {

double point_segment_distance(Complex p, Complex a, Complex b) {
  Complex ab = b - a;
  double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = std::clamp(((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / len2,
                        0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

double point_polyline_distance(Complex p, const std::vector<Complex>& poly) {
  double best = std::abs(p - poly.front());
  for (size_t i = 1; i < poly.size(); ++i)
    best = std::min(best, point_segment_distance(p, poly[i - 1], poly[i]));
  return best;
}

int winding_number(const std::vector<Complex>& poly, Complex c) {
  if (poly.size() < 2 || std::abs(poly.front() - poly.back()) != 0.0)
    throw InvalidInput("winding_number needs a closed polyline");
  double diam = 0.0;
  for (Complex p : poly) diam = std::max(diam, std::abs(p - poly.front()));
  diam = std::max(diam, 1e-300);
  if (point_polyline_distance(c, poly) < 1e-12 * diam)
    throw OnWalk("query point lies on the walk");
  double total = 0.0;
  for (size_t i = 1; i < poly.size(); ++i)
    total += std::arg((poly[i] - c) / (poly[i - 1] - c));
  const double two_pi = 2.0 * std::acos(-1.0);
  long n = std::lround(total / two_pi);
  return static_cast<int>(n);
}

int winding_number(const ClosedWalk& walk, const PlanarGraph& g, Complex c) {
  std::vector<Complex> poly;
  poly.reserve(walk.vertices.size());
  for (int v : walk.vertices) poly.push_back(g.offset_pos[v]);
  if (walk.vertices.front() != walk.vertices.back())
    throw InvalidInput("closed walk must end where it starts");
  return winding_number(poly, c);
}

std::vector<int> homological_interior(const ClosedWalk& walk, const PlanarGraph& g) {
  std::vector<int> interior;
  for (int v = 0; v < g.num_vertices(); ++v) {
    int w;
    try {
      w = winding_number(walk, g, g.offset_pos[v]);
    } catch (const OnWalk&) {
      continue;
    }
    if (w == 1 || w == -1) interior.push_back(v);
  }
  return interior;
}

}  // namespace rhd
