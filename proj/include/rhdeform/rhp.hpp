#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rhdeform/jump.hpp"

namespace rhd {

/// One oriented contour part. The geometry is a polyline; an arc may instead
/// extend to infinity from its last finite point along a fixed direction
/// (ray_angle), in which case it must be truncated before graph embedding.
struct Arc {
  std::vector<Complex> points;          // ordered breakpoints, start -> end
  std::optional<double> ray_angle;      // if set, the arc continues to infinity
                                        // from points.back() at this angle

  bool unbounded() const { return ray_angle.has_value(); }
  Complex start() const { return points.front(); }
  Complex end() const { return points.back(); }
  double length() const;
  /// Point at arclength s along the polyline (finite part only).
  Complex at_arclength(double s) const;
};

struct RHPart {
  Arc arc;
  JumpFunction jump;
};

/// A Riemann-Hilbert problem: oriented arcs paired with entire jump functions.
/// The positive side of each arc is to the left of its direction of travel.
struct RHProblem {
  std::vector<RHPart> parts;
  int dimension = 2;
};

/// Stokes data for the Painleve II problem. The six multipliers satisfy
/// s1 - s2 + s3 + s1*s2*s3 = 0, s4 = -s1, s5 = -s2, s6 = -s3.
struct Painleve2Params {
  double x = 0.0;
  std::array<Complex, 6> s{};

  double constraint_residual() const;
};

/// Completes (s1, s2) to the full six-tuple. Throws SingularStokesData when
/// |1 + s1*s2| < 1e-12 (the singular case s1 = s2 = +-i).
Painleve2Params stokes_complete(Complex s1, Complex s2);

/// Phase theta(z) = (8i/3) z^3 + 2 i x z and its derivative.
Complex theta(Complex z, double x);
Complex theta_prime(Complex z, double x);

/// Stationary points of the phase, +- sqrt(-x)/2 (real for x < 0).
std::array<Complex, 2> theta_stationary_points(double x);

/// The six-ray Painleve II problem. Ray j = 1..6 leaves the origin at angle
/// pi(2j-1)/6; even rays carry [[1, s_j e^{-theta}], [0, 1]], odd rays
/// [[1, 0], [s_j e^{+theta}, 1]].
RHProblem painleve2_rhp(const Painleve2Params& params);

JumpFunction painleve2_ray_jump(int j, Complex s_j, double x);

/// Drops interior breakpoints that do not turn the polyline.
std::vector<Complex> merge_collinear(const std::vector<Complex>& pts);

/// d(Gamma; G) = integral over Gamma of d(G(z)) d|z|, composite trapezoidal
/// rule with `quadrature_points_per_segment` points per maximal straight
/// piece. All arcs must be finite polylines.
double relative_strength(const RHProblem& rhp, const LocalWeight& w,
                         int quadrature_points_per_segment);

/// JSON serialization (17 significant digits; descriptors as tagged trees).
nlohmann::json to_json(const RHProblem& rhp);
RHProblem rhproblem_from_json(const nlohmann::json& j);
void save_rhproblem(const RHProblem& rhp, const std::string& path);
RHProblem load_rhproblem(const std::string& path);

}  // namespace rhd
