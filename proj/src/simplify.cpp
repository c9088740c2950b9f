#include "rhdeform/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rhdeform/errors.hpp"
#include "rhdeform/winding.hpp"

namespace rhd {

namespace {

double segment_weight(const JumpFunction& jump, const LocalWeight& w, Complex a,
                      Complex b, int quad_pts) {
  double len = std::abs(b - a);
  if (len == 0.0) return 0.0;
  double sum = 0.0;
  for (int k = 0; k < quad_pts; ++k) {
    double t = static_cast<double>(k) / (quad_pts - 1);
    double val = w(jump(a + t * (b - a)));
    sum += (k == 0 || k == quad_pts - 1) ? 0.5 * val : val;
  }
  return sum * len / (quad_pts - 1);
}

double polyline_weight(const JumpFunction& jump, const LocalWeight& w,
                       const std::vector<Complex>& pts, size_t lo, size_t hi,
                       int quad_pts) {
  double total = 0.0;
  for (size_t i = lo + 1; i <= hi; ++i)
    total += segment_weight(jump, w, pts[i - 1], pts[i], quad_pts);
  return total;
}

// Douglas-Peucker-style recursion with a weight acceptance test: take the
// chord when it keeps about the same weight, else split at the farthest
// breakpoint. `forced` breakpoints are never removed (crossing fallback).
void simplify_range(const JumpFunction& jump, const LocalWeight& w,
                    const std::vector<Complex>& pts, size_t lo, size_t hi, double tau,
                    double eps_range, int quad_pts, const std::set<size_t>& forced,
                    std::vector<size_t>& keep) {
  if (hi - lo <= 1) return;
  size_t cut = 0;
  for (size_t i = lo + 1; i < hi; ++i)
    if (forced.count(i)) {
      cut = i;
      break;
    }
  if (cut == 0) {
    double w_chord = segment_weight(jump, w, pts[lo], pts[hi], quad_pts);
    double w_poly = polyline_weight(jump, w, pts, lo, hi, quad_pts);
    if (w_chord <= (1.0 + tau) * w_poly + eps_range) return;  // accept the chord
    double far_d = -1.0;
    for (size_t i = lo + 1; i < hi; ++i) {
      double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
      if (d > far_d) {
        far_d = d;
        cut = i;
      }
    }
  }
  keep.push_back(cut);
  simplify_range(jump, w, pts, lo, cut, tau, eps_range * (cut - lo) / (hi - lo),
                 quad_pts, forced, keep);
  simplify_range(jump, w, pts, cut, hi, tau, eps_range * (hi - cut) / (hi - lo),
                 quad_pts, forced, keep);
}

std::vector<Complex> simplify_arc(const JumpFunction& jump, const LocalWeight& w,
                                  const std::vector<Complex>& pts, double tau,
                                  double eps_abs, int quad_pts,
                                  const std::set<size_t>& forced) {
  std::vector<size_t> keep{0, pts.size() - 1};
  simplify_range(jump, w, pts, 0, pts.size() - 1, tau, eps_abs, quad_pts, forced, keep);
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  std::vector<Complex> out;
  for (size_t i : keep) out.push_back(pts[i]);
  return out;
}

bool segments_properly_cross(Complex a, Complex b, Complex c, Complex d) {
  auto cross = [](Complex u, Complex v) {
    return u.real() * v.imag() - u.imag() * v.real();
  };
  double tol = 1e-12 * std::abs(b - a) * std::abs(d - c);
  double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
         ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
}

// Indices (arc, segment) of crossing segment pairs across two polylines.
bool polylines_cross(const std::vector<Complex>& a, const std::vector<Complex>& b,
                     size_t* a_seg) {
  for (size_t i = 1; i < a.size(); ++i)
    for (size_t j = 1; j < b.size(); ++j)
      if (segments_properly_cross(a[i - 1], a[i], b[j - 1], b[j])) {
        *a_seg = i;
        return true;
      }
  return false;
}

}  // namespace

int count_breakpoints(const RHProblem& rhp) {
  int total = 0;
  for (const auto& part : rhp.parts) total += static_cast<int>(part.arc.points.size());
  return total;
}

RHProblem simplify_contour(const RHProblem& rhp, double tau, double eps_abs,
                           int quad_pts, SimplifyStats* stats) {
  LocalWeight w;
  const size_t n = rhp.parts.size();
  std::vector<std::vector<Complex>> originals(n), simplified(n);
  std::vector<std::set<size_t>> forced(n);
  for (size_t i = 0; i < n; ++i) {
    if (rhp.parts[i].arc.unbounded())
      throw InvalidInput("simplification requires finite arcs");
    originals[i] = rhp.parts[i].arc.points;
  }

  for (size_t i = 0; i < n; ++i)
    simplified[i] = simplify_arc(rhp.parts[i].jump, w, originals[i], tau, eps_abs,
                                 quad_pts, forced[i]);

  // Chords may cut corners across other arcs; reject the offending chord by
  // forcing the farthest original breakpoint under it and re-simplifying.
  for (int round = 0; round < 64; ++round) {
    bool clean = true;
    for (size_t i = 0; i < n && clean; ++i)
      for (size_t j = 0; j < n && clean; ++j) {
        if (i == j) continue;
        size_t seg = 0;
        if (!polylines_cross(simplified[i], simplified[j], &seg)) continue;
        clean = false;
        // Split the chord at the original breakpoint farthest from it.
        Complex a = simplified[i][seg - 1], b = simplified[i][seg];
        size_t lo = 0, hi = 0, best = 0;
        double far_d = -1.0;
        for (size_t k = 0; k < originals[i].size(); ++k) {
          if (originals[i][k] == a) lo = k;
          if (originals[i][k] == b) hi = k;
        }
        if (hi <= lo + 1) throw CrossingPaths("cannot reconcile crossing chords");
        for (size_t k = lo + 1; k < hi; ++k) {
          double d = point_segment_distance(originals[i][k], a, b);
          if (d > far_d) {
            far_d = d;
            best = k;
          }
        }
        forced[i].insert(best);
        simplified[i] = simplify_arc(rhp.parts[i].jump, w, originals[i], tau, eps_abs,
                                     quad_pts, forced[i]);
      }
    if (clean) break;
  }

  RHProblem out;
  out.dimension = rhp.dimension;
  if (stats) {
    stats->breakpoints_before = count_breakpoints(rhp);
    stats->weight_before.clear();
    stats->weight_after.clear();
  }
  for (size_t i = 0; i < n; ++i) {
    RHPart part;
    part.jump = rhp.parts[i].jump;
    part.arc.points = simplified[i];
    out.parts.push_back(part);
    if (stats) {
      stats->arc_breakpoints_before.push_back(static_cast<int>(originals[i].size()));
      stats->arc_breakpoints_after.push_back(static_cast<int>(simplified[i].size()));
      stats->weight_before.push_back(polyline_weight(
          rhp.parts[i].jump, w, originals[i], 0, originals[i].size() - 1, quad_pts));
      stats->weight_after.push_back(polyline_weight(
          rhp.parts[i].jump, w, simplified[i], 0, simplified[i].size() - 1, quad_pts));
    }
  }
  if (stats) stats->breakpoints_after = count_breakpoints(out);
  return out;
}

}  // namespace rhd
