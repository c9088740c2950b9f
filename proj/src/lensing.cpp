#include "rhdeform/lensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "rhdeform/errors.hpp"
#include "rhdeform/winding.hpp"

namespace rhd {

std::vector<Factorization> factorizations_2x2(const JumpFunction& g,
                                              const std::vector<Complex>& probes,
                                              double pivot_floor) {
  if (g.dimension() != 2) throw InvalidInput("factorization menu is for m = 2");
  std::vector<Factorization> out;
  bool ldu_ok = true, ul_ok = true;
  for (Complex z : probes) {
    ComplexMat m = g(z);
    double scale = std::sqrt(std::norm(m(0, 0)) + std::norm(m(0, 1)) +
                             std::norm(m(1, 0)) + std::norm(m(1, 1)));
    if (!(scale > 0) || !std::isfinite(scale)) {
      ldu_ok = ul_ok = false;
      break;
    }
    if (std::abs(m(0, 0)) < pivot_floor) ldu_ok = false;
    if (std::abs(m(1, 1)) < pivot_floor) ul_ok = false;
  }
  if (ldu_ok) {
    Factorization f;
    f.kind = "ldu";
    f.factors = {make_factor(g, "ldu", "L"), make_factor(g, "ldu", "D"),
                 make_factor(g, "ldu", "U")};
    out.push_back(std::move(f));
  }
  if (ul_ok) {
    Factorization f;
    f.kind = "ul";
    f.factors = {make_factor(g, "ul", "U"), make_factor(g, "ul", "L")};
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

// Closed polyline of walk + reversed channel side, in offset positions.
int walk_winding(const PlanarGraph& g, const std::vector<int>& walk,
                 const std::vector<Complex>& channel_rev, Complex c) {
  std::vector<Complex> poly;
  poly.reserve(walk.size() + channel_rev.size());
  for (int v : walk) poly.push_back(g.offset_pos[v]);
  for (Complex p : channel_rev) poly.push_back(p);
  if (std::abs(poly.front() - poly.back()) != 0.0) poly.push_back(poly.front());
  return winding_number(poly, c);
}

// Reversed channel polyline with the first point dropped (it coincides with
// the walk's last vertex).
std::vector<Complex> reversed_drop_first(const std::vector<Complex>& channel) {
  std::vector<Complex> out(channel.rbegin(), channel.rend());
  out.erase(out.begin());
  return out;
}

struct WalkCandidate {
  double weight;
  int u, v;  // inserted edge, directed
};

int count_enclosed(const PlanarGraph& g, const std::vector<int>& walk,
                   const std::vector<Complex>& channel_rev) {
  std::vector<Complex> poly;
  for (int v : walk) poly.push_back(g.offset_pos[v]);
  for (Complex p : channel_rev) poly.push_back(p);
  if (std::abs(poly.front() - poly.back()) != 0.0) poly.push_back(poly.front());
  int count = 0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    try {
      int w = winding_number(poly, g.offset_pos[v]);
      if (w == 1 || w == -1) ++count;
    } catch (const OnWalk&) {
    }
  }
  return count;
}

// Scan of the two shortest-path trees plus one edge; the minimal-weight walk
// whose closed join with the reversed channel winds `sign` around c.
std::optional<std::pair<std::vector<int>, double>> scan_enclosing(
    const PlanarGraph& graph, const std::vector<double>& weights,
    const ShortestPathTree& from_src, const ShortestPathTree& to_dst,
    const std::vector<Complex>& channel_rev, Complex c, int sign) {
  std::vector<WalkCandidate> cands;
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    auto [u, v] = graph.edges[e];
    for (int dir = 0; dir < 2; ++dir) {
      int a = dir ? v : u, b = dir ? u : v;
      double wsum = from_src.dist[a] + weights[e] + to_dst.dist[b];
      if (std::isfinite(wsum)) cands.push_back({wsum, a, b});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const WalkCandidate& a, const WalkCandidate& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });

  auto build_walk = [&](const WalkCandidate& cand) {
    std::vector<int> walk = from_src.path_to(cand.u).vertices;
    auto tail = to_dst.path_from(cand.v).vertices;
    walk.insert(walk.end(), tail.begin(), tail.end());
    return walk;
  };

  std::optional<double> best_weight;
  std::vector<std::vector<int>> best_walks;
  for (const auto& cand : cands) {
    if (best_weight && cand.weight > *best_weight) break;
    auto walk = build_walk(cand);
    int wn;
    try {
      wn = walk_winding(graph, walk, channel_rev, c);
    } catch (const OnWalk&) {
      continue;
    }
    if (wn != sign) continue;
    if (!best_weight) best_weight = cand.weight;
    best_walks.push_back(std::move(walk));
  }
  if (!best_weight) return std::nullopt;
  // Tie-break: fewer enclosed vertices, then lexicographic vertex sequence.
  std::sort(best_walks.begin(), best_walks.end());
  best_walks.erase(std::unique(best_walks.begin(), best_walks.end()), best_walks.end());
  if (best_walks.size() > 1) {
    std::stable_sort(best_walks.begin(), best_walks.end(),
                     [&](const std::vector<int>& a, const std::vector<int>& b) {
                       return count_enclosed(graph, a, channel_rev) <
                              count_enclosed(graph, b, channel_rev);
                     });
  }
  return std::make_pair(best_walks.front(), *best_weight);
}

}  // namespace

EnclosingWalk enclosing_shortest_walk(const WeightedPlanarGraph& g, const GraphPath& q,
                                      Complex c, int sign) {
  if (q.vertices.size() < 2) throw InvalidInput("q needs at least one edge");
  if (q.front() == q.back()) throw InvalidInput("q endpoints must be distinct");
  if (sign != 1 && sign != -1) throw InvalidInput("sign must be +-1");

  CutGraph cut = cut_along(*g.base, {q}, {});
  std::vector<double> weights = transfer_weights(cut, g.weight);
  WeightedPlanarGraph cw;
  cw.base = &cut.graph;
  cw.weight = weights;

  int src = cut.copies[q.front()][0];
  int dst = cut.copies[q.back()][0];
  auto from_src = dijkstra_tree(cw, src);
  auto to_dst = dijkstra_tree(cw, dst);

  // ind(p join reverse(q-)) = +1 selects walks right of q; with q+ it is -1.
  auto channel = side_channel(*g.base, q, sign > 0 ? +1 : -1, 2.0 * cut.offset_eps);
  auto channel_rev = reversed_drop_first(channel);

  auto found = scan_enclosing(cut.graph, weights, from_src, to_dst, channel_rev, c, sign);
  if (!found)
    throw NoEnclosingWalk("no walk with the requested winding number exists");
  EnclosingWalk out;
  out.walk.vertices = found->first;
  out.weight = found->second;
  out.ancestor = cut.ancestor;
  return out;
}

GraphPath constrained_enclosing_path(const PlanarGraph& cut_graph,
                                     const std::vector<double>& weights,
                                     const std::vector<Complex>& channel, Complex c,
                                     int sign, int src, int dst) {
  WeightedPlanarGraph cw;
  cw.base = &cut_graph;
  cw.weight = weights;
  auto from_src = dijkstra_tree(cw, src);
  auto to_dst = dijkstra_tree(cw, dst);
  auto channel_rev = reversed_drop_first(channel);

  std::vector<WalkCandidate> cands;
  for (size_t e = 0; e < cut_graph.edges.size(); ++e) {
    auto [u, v] = cut_graph.edges[e];
    for (int dir = 0; dir < 2; ++dir) {
      int a = dir ? v : u, b = dir ? u : v;
      double wsum = from_src.dist[a] + weights[e] + to_dst.dist[b];
      if (std::isfinite(wsum)) cands.push_back({wsum, a, b});
    }
  }
  std::sort(cands.begin(), cands.end(),
            [](const WalkCandidate& a, const WalkCandidate& b) {
              if (a.weight != b.weight) return a.weight < b.weight;
              if (a.u != b.u) return a.u < b.u;
              return a.v < b.v;
            });

  // First candidate (by weight) whose circle-free version still winds right.
  for (const auto& cand : cands) {
    std::vector<int> walk = from_src.path_to(cand.u).vertices;
    auto tail = to_dst.path_from(cand.v).vertices;
    walk.insert(walk.end(), tail.begin(), tail.end());
    GraphPath p{std::move(walk)};
    while (contains_circle(p)) p = drop_circle(p);
    int wn;
    try {
      wn = walk_winding(cut_graph, p.vertices, channel_rev, c);
    } catch (const OnWalk&) {
      continue;
    }
    if (wn == sign) return p;
  }
  throw NoEnclosingWalk("no simple enclosing path found");
}

GraphPath path_between_siblings(const PlanarGraph& cut_graph,
                                const std::vector<double>& weights,
                                const std::vector<Complex>& left_channel,
                                const std::vector<Complex>& right_channel, int src,
                                int dst) {
  std::vector<Complex> poly = left_channel;
  for (auto it = right_channel.rbegin(); it != right_channel.rend(); ++it)
    poly.push_back(*it);
  if (std::abs(poly.front() - poly.back()) != 0.0) poly.push_back(poly.front());

  // Vertices strictly outside the region between the siblings are removed;
  // points on the boundary channel stay.
  std::vector<bool> keep(cut_graph.num_vertices(), false);
  keep[src] = keep[dst] = true;
  for (int v = 0; v < cut_graph.num_vertices(); ++v) {
    if (keep[v]) continue;
    try {
      int wn = winding_number(poly, cut_graph.offset_pos[v]);
      keep[v] = (wn == 1 || wn == -1);
    } catch (const OnWalk&) {
      keep[v] = true;
    }
  }
  WeightedPlanarGraph restricted;
  restricted.base = &cut_graph;
  restricted.weight = weights;
  const double inf = std::numeric_limits<double>::infinity();
  for (size_t e = 0; e < cut_graph.edges.size(); ++e) {
    auto [u, v] = cut_graph.edges[e];
    if (!keep[u] || !keep[v]) restricted.weight[e] = inf;
  }
  // An empty between-region (the order constraint is unsatisfiable for this
  // geometry) surfaces as Unreachable and fails the variant, which the
  // lensing driver records and skips.
  return shortest_path_geo(restricted, src, dst);
}

namespace {

Rectangle bbox_of(const RHProblem& rhp) {
  Rectangle rect;
  bool first = true;
  for (const auto& part : rhp.parts)
    for (Complex p : part.arc.points) {
      if (first) {
        rect.x_min = rect.x_max = p.real();
        rect.y_min = rect.y_max = p.imag();
        first = false;
      }
      rect.x_min = std::min(rect.x_min, p.real());
      rect.x_max = std::max(rect.x_max, p.real());
      rect.y_min = std::min(rect.y_min, p.imag());
      rect.y_max = std::max(rect.y_max, p.imag());
    }
  double pad = std::max({rect.width(), rect.height(), 1.0});
  if (rect.width() < 1e-9 * pad) {
    rect.x_min -= 0.5 * pad;
    rect.x_max += 0.5 * pad;
  }
  if (rect.height() < 1e-9 * pad) {
    rect.y_min -= 0.5 * pad;
    rect.y_max += 0.5 * pad;
  }
  return rect;
}

}  // namespace

LensingResult lensing_deformation(const RHProblem& rhp, int nx, int ny,
                                  const LocalWeight& w, const LensingOptions& opts) {
  if (rhp.parts.empty()) throw InvalidInput("empty problem");
  for (const auto& part : rhp.parts)
    if (part.arc.unbounded()) throw InvalidInput("lensing requires truncated arcs");

  // Dominant part: highest current relative strength of its own polyline.
  int dominant = 0;
  double best_w = -1.0;
  for (size_t i = 0; i < rhp.parts.size(); ++i) {
    RHProblem single;
    single.parts.push_back(rhp.parts[i]);
    double pw = contour_weight(single, w);
    if (pw > best_w) {
      best_w = pw;
      dominant = static_cast<int>(i);
    }
  }

  Rectangle rect = bbox_of(rhp);
  PlanarGraph g = build_grid_graph(rect, nx, ny);
  std::vector<Complex> probes = g.pos;

  auto run_variant = [&](const std::vector<JumpFunction>& factors) {
    std::vector<ArcOnGraph> arcs;
    std::vector<double> snaps;
    auto base_arcs = snap_arcs(g, rhp, &snaps);
    for (size_t i = 0; i < base_arcs.size(); ++i) {
      if (static_cast<int>(i) != dominant || factors.empty()) {
        arcs.push_back(base_arcs[i]);
        continue;
      }
      const int k = static_cast<int>(factors.size());
      for (int m = 0; m < k; ++m) {
        ArcOnGraph copy = base_arcs[i];
        copy.jump = factors[m];
        copy.family = 0;
        copy.family_pos = k - 1 - m;  // the last product factor sits leftmost
        arcs.push_back(copy);
      }
    }
    auto res = simple_deformation_on_graph(g, arcs, w, opts.deform);
    res.trace.snap_distances = snaps;
    return res;
  };

  LensingResult result;
  result.dominant_part = dominant;
  result.variants = nlohmann::json::array();

  auto kappa_of = [&](const DeformationResult& r) {
    if (!opts.kappa_estimator) return 0.0;
    try {
      return opts.kappa_estimator(r.rhp);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  auto baseline = run_variant({});
  double baseline_kappa = kappa_of(baseline);
  nlohmann::json bj = {{"kind", "baseline"}, {"weight", baseline.output_weight}};
  if (opts.kappa_estimator) bj["kappa_estimate"] = baseline_kappa;
  result.variants.push_back(bj);
  result.deformation = baseline;
  result.chosen_kind = "baseline";

  auto menu = factorizations_2x2(rhp.parts[dominant].jump, probes, opts.pivot_floor);
  for (const auto& f : menu) {
    DeformationResult res;
    try {
      res = run_variant(f.factors);
    } catch (const Error& e) {
      result.variants.push_back({{"kind", f.kind}, {"error", e.what()}});
      continue;
    }
    double kappa = kappa_of(res);
    nlohmann::json vj = {{"kind", f.kind}, {"weight", res.output_weight}};
    if (opts.kappa_estimator) vj["kappa_estimate"] = kappa;
    result.variants.push_back(vj);
    if (res.output_weight >= result.deformation.output_weight) continue;
    if (opts.kappa_estimator && kappa > baseline_kappa * 1.02) continue;
    result.deformation = res;
    result.chosen_kind = f.kind;
  }
  for (auto& v : result.variants)
    v["chosen"] = (v["kind"] == result.chosen_kind);
  return result;
}

}  // namespace rhd
