#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rhdeform/deform.hpp"
#include "rhdeform/planar_graph.hpp"
#include "rhdeform/split.hpp"
#include "rhdeform/weighted_graph.hpp"

namespace rhd {

/// A multiplicative decomposition of a jump matrix. Factors are stored in
/// composition order, G = factors[0] * factors[1] * ...; the geometric
/// left-to-right order of the lensed contour copies is the reverse (the last
/// factor of the product sits leftmost).
struct Factorization {
  std::string kind;  // "ldu", "ul", "baseline"
  std::vector<JumpFunction> factors;

  std::vector<JumpFunction> geometric_order() const {
    return {factors.rbegin(), factors.rend()};
  }
};

/// Pointwise LDU and UL factorizations of a 2x2 jump. A factorization is
/// omitted when its pivot entry (G11 for LDU, G22 for UL) gets smaller than
/// `pivot_floor` at some probe point, since its factors must stay evaluable.
std::vector<Factorization> factorizations_2x2(const JumpFunction& g,
                                              const std::vector<Complex>& probes,
                                              double pivot_floor = 1e-8);

/// Shortest enclosing walk: the minimal-weight walk from q.front
/// to q.back in g split along q whose closed join with the reversed split
/// side of q has winding number `sign` (+1 or -1) around c. The returned
/// walk lives in the split graph; `ancestor` maps its vertices back.
struct EnclosingWalk {
  GraphPath walk;                 // vertices in the split graph
  std::vector<int> ancestor;      // split id -> source id
  double weight = 0;
};
EnclosingWalk enclosing_shortest_walk(const WeightedPlanarGraph& g, const GraphPath& q,
                                      Complex c, int sign);

/// Internal form used by the deformation loop: everything already lives in a
/// cut graph. `channel` is the side-channel polyline of the fixed sibling
/// (left side for sign +1, right for -1; see side_channel), `c` the anchor
/// point in its split. Returns a simple path.
GraphPath constrained_enclosing_path(const PlanarGraph& cut_graph,
                                     const std::vector<double>& weights,
                                     const std::vector<Complex>& channel, Complex c,
                                     int sign, int src, int dst);

/// Case 3: shortest path restricted to the closed region between the left
/// sibling's right channel and the right sibling's left channel.
GraphPath path_between_siblings(const PlanarGraph& cut_graph,
                                const std::vector<double>& weights,
                                const std::vector<Complex>& left_channel,
                                const std::vector<Complex>& right_channel, int src,
                                int dst);

struct LensingOptions {
  DeformOptions deform;
  double pivot_floor = 1e-8;
  int grid_nx = 17, grid_ny = 17;
  /// Optional conditioning estimate per variant. When set, a variant that
  /// estimates worse than the undecomposed baseline is not selected even if
  /// it is lighter; lensing exists to improve conditioning.
  std::function<double(const RHProblem&)> kappa_estimator;
};

struct LensingResult {
  DeformationResult deformation;       // the winning variant
  std::string chosen_kind;             // factorization kind, "baseline" if none won
  int dominant_part = -1;
  nlohmann::json variants;             // weight (and optional kappa) per variant
};

/// One lensing step: factorizes the dominant contour part, replaces it by
/// coincident copies carrying the factors, deforms every variant with the
/// order constraint and keeps the lightest result (the undecomposed baseline
/// is always in the running).
LensingResult lensing_deformation(const RHProblem& rhp, int nx, int ny,
                                  const LocalWeight& w = {},
                                  const LensingOptions& opts = {});

}  // namespace rhd
