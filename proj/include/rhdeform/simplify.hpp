#pragma once

#include <vector>

#include "rhdeform/rhp.hpp"

namespace rhd {

struct SimplifyStats {
  int breakpoints_before = 0;
  int breakpoints_after = 0;
  std::vector<int> arc_breakpoints_before;
  std::vector<int> arc_breakpoints_after;
  std::vector<double> weight_before;  // per arc, finely quadratured
  std::vector<double> weight_after;
};

/// Coarse piecewise-linear re-approximation of each arc: a chord replaces a
/// subpolyline when its finely-quadratured weight stays within
/// (1 + tau) * weight + eps_abs, otherwise the polyline is split at the
/// breakpoint farthest from the chord and both halves recurse. A final pass
/// rejects chords that would cross another arc.
RHProblem simplify_contour(const RHProblem& rhp, double tau = 0.5,
                           double eps_abs = 1e-12, int quad_pts = 64,
                           SimplifyStats* stats = nullptr);

int count_breakpoints(const RHProblem& rhp);

}  // namespace rhd
