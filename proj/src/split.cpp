#include "rhdeform/split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "rhdeform/errors.hpp"

namespace rhd {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

double normalize_angle(double a) {
  while (a < 0) a += kTwoPi;
  while (a >= kTwoPi) a -= kTwoPi;
  return a;
}

// Index of the sector (between consecutive fixed angles, CCW) containing `a`.
// `starts` is sorted ascending in [0, 2pi); angles are compared exactly, so
// coincident directions (duplicate positions) are detected, never guessed.
int sector_index(const std::vector<double>& starts, double a) {
  a = normalize_angle(a);
  for (double s : starts)
    if (s == a) throw NotSplittable("edge direction coincides with a cut edge");
  auto it = std::upper_bound(starts.begin(), starts.end(), a);
  int j = static_cast<int>(it - starts.begin()) - 1;
  if (j < 0) j = static_cast<int>(starts.size()) - 1;  // wraps past 2pi
  return j;
}

// Sector whose lower boundary is exactly `a`.
int sector_starting_at(const std::vector<double>& starts, double a) {
  a = normalize_angle(a);
  for (size_t j = 0; j < starts.size(); ++j)
    if (starts[j] == a) return static_cast<int>(j);
  throw NotSplittable("cut edge angle not found at vertex");
}

// Sector whose upper boundary is exactly `a`.
int sector_ending_at(const std::vector<double>& starts, double a) {
  int j = sector_starting_at(starts, a);
  int k = static_cast<int>(starts.size());
  return (j - 1 + k) % k;
}

}  // namespace

int CutGraph::copy_at(int source_v, double angle) const {
  const auto& cs = copies[source_v];
  if (cs.size() == 1) return cs[0];
  return cs[sector_index(sector_starts_[source_v], angle)];
}

std::vector<double> CutGraph::sector_angles_of(int source_v) const {
  return sector_starts_[source_v];
}

bool CutGraph::lift_path(const GraphPath& src, GraphPath& out) const {
  out.vertices.clear();
  if (src.vertices.empty()) return false;
  if (copies[src.front()].size() != 1) return false;
  out.vertices.push_back(copies[src.front()][0]);
  for (size_t i = 1; i < src.vertices.size(); ++i) {
    int cur = out.vertices.back();
    int found = -1;
    for (int cand : copies[src.vertices[i]]) {
      if (graph.edge_between(cur, cand) >= 0) {
        if (found < 0 || cand < found) found = cand;
      }
    }
    if (found < 0) return false;
    out.vertices.push_back(found);
  }
  return true;
}

CutGraph cut_along(const PlanarGraph& g, const std::vector<GraphPath>& paths,
                   const std::vector<int>& extra_pinch) {
  for (const auto& p : paths) {
    if (!p.is_simple()) throw NotSplittable("cut path is not simple");
    for (size_t i = 1; i < p.vertices.size(); ++i)
      if (g.edge_between(p.vertices[i - 1], p.vertices[i]) < 0)
        throw InvalidInput("cut path uses a non-edge (" +
                           std::to_string(p.vertices[i - 1]) + "," +
                           std::to_string(p.vertices[i]) + ")");
  }

  std::set<int> pinch(extra_pinch.begin(), extra_pinch.end());
  for (const auto& p : paths) {
    if (p.vertices.empty()) continue;
    pinch.insert(p.front());
    pinch.insert(p.back());
  }

  // Fixed edges and, per vertex, the sorted angles of incident fixed edges.
  std::set<int> fixed_edges;
  std::vector<std::set<int>> fixed_nbrs(g.num_vertices());
  for (const auto& p : paths)
    for (size_t i = 1; i < p.vertices.size(); ++i) {
      int a = p.vertices[i - 1], b = p.vertices[i];
      fixed_edges.insert(g.edge_between(a, b));
      fixed_nbrs[a].insert(b);
      fixed_nbrs[b].insert(a);
    }

  CutGraph cut;
  cut.copies.assign(g.num_vertices(), {});
  cut.sector_starts_.assign(g.num_vertices(), {});

  double min_edge_len = std::numeric_limits<double>::infinity();
  for (auto [u, v] : g.edges) min_edge_len = std::min(min_edge_len, std::abs(g.pos[u] - g.pos[v]));
  const double eps = (std::isfinite(min_edge_len) ? min_edge_len : 1.0) * 1e-4;
  cut.offset_eps = eps;

  for (int v = 0; v < g.num_vertices(); ++v) {
    std::vector<double> angles;
    for (int w : fixed_nbrs[v]) angles.push_back(normalize_angle(g.edge_angle_at(v, w)));
    std::sort(angles.begin(), angles.end());
    bool duplicated = !pinch.count(v) && angles.size() >= 2;
    if (!duplicated) {
      int id = static_cast<int>(cut.graph.pos.size());
      cut.graph.pos.push_back(g.pos[v]);
      cut.graph.offset_pos.push_back(g.offset_pos.empty() ? g.pos[v] : g.offset_pos[v]);
      cut.ancestor.push_back(v);
      cut.copies[v] = {id};
      cut.sector_starts_[v] = {};
      continue;
    }
    cut.sector_starts_[v] = angles;
    int k = static_cast<int>(angles.size());
    for (int j = 0; j < k; ++j) {
      double lo = angles[j];
      double span = normalize_angle(angles[(j + 1) % k] - lo);
      if (span == 0.0) span = kTwoPi;
      double bisector = lo + 0.5 * span;
      int id = static_cast<int>(cut.graph.pos.size());
      cut.graph.pos.push_back(g.pos[v]);
      cut.graph.offset_pos.push_back(g.pos[v] + eps * std::polar(1.0, bisector));
      cut.ancestor.push_back(v);
      cut.copies[v].push_back(id);
    }
  }

  auto copy_for = [&](int v, double angle) -> int {
    if (cut.copies[v].size() == 1) return cut.copies[v][0];
    return cut.copies[v][sector_index(cut.sector_starts_[v], angle)];
  };
  auto copy_starting = [&](int v, double angle) -> int {
    if (cut.copies[v].size() == 1) return cut.copies[v][0];
    return cut.copies[v][sector_starting_at(cut.sector_starts_[v], angle)];
  };
  auto copy_ending = [&](int v, double angle) -> int {
    if (cut.copies[v].size() == 1) return cut.copies[v][0];
    return cut.copies[v][sector_ending_at(cut.sector_starts_[v], angle)];
  };

  // (edge, ancestor edge id) pairs; deduped below.
  std::vector<std::pair<std::pair<int, int>, int>> new_edges;
  for (int e = 0; e < g.num_edges(); ++e) {
    auto [u, w] = g.edges[e];
    double a_uw = g.edge_angle_at(u, w);
    double a_wu = g.edge_angle_at(w, u);
    if (!fixed_edges.count(e)) {
      new_edges.push_back({{copy_for(u, a_uw), copy_for(w, a_wu)}, e});
    } else {
      // Left of u->w: the sector CCW-after the edge at u, CW-before at w.
      int lu = copy_starting(u, a_uw), lw = copy_ending(w, a_wu);
      int ru = copy_ending(u, a_uw), rw = copy_starting(w, a_wu);
      new_edges.push_back({{lu, lw}, e});
      new_edges.push_back({{ru, rw}, e});
    }
  }
  for (auto& [edge, anc] : new_edges)
    if (edge.first > edge.second) std::swap(edge.first, edge.second);
  std::sort(new_edges.begin(), new_edges.end());
  new_edges.erase(std::unique(new_edges.begin(), new_edges.end(),
                              [](const auto& a, const auto& b) { return a.first == b.first; }),
                  new_edges.end());
  for (const auto& [edge, anc] : new_edges) {
    cut.graph.edges.push_back(edge);
    cut.edge_ancestor.push_back(anc);
  }
  cut.graph.finalize();

  // Hugging copy sequences per path (p- / p+ for single-path cuts).
  for (const auto& p : paths) {
    GraphPath left, right;
    for (size_t i = 0; i < p.vertices.size(); ++i) {
      int v = p.vertices[i];
      if (cut.copies[v].size() == 1) {
        left.vertices.push_back(cut.copies[v][0]);
        right.vertices.push_back(cut.copies[v][0]);
        continue;
      }
      // Interior vertex: classify by the outgoing edge direction; the last
      // vertex of a path is pinched, so i+1 is valid here.
      double out = normalize_angle(g.edge_angle_at(v, p.vertices[i + 1]));
      left.vertices.push_back(copy_starting(v, out));
      right.vertices.push_back(copy_ending(v, out));
    }
    cut.left_of.push_back(std::move(left));
    cut.right_of.push_back(std::move(right));
  }
  return cut;
}

std::pair<PlanarGraph, SplitRecord> split_graph(const PlanarGraph& g, const GraphPath& p) {
  CutGraph cut = cut_along(g, {p}, {});
  SplitRecord rec;
  rec.original = p;
  rec.left = cut.left_of[0];
  rec.right = cut.right_of[0];
  rec.ancestor = cut.ancestor;
  rec.copies = cut.copies;
  return {std::move(cut.graph), std::move(rec)};
}

std::vector<double> transfer_weights(const CutGraph& cut, const std::vector<double>& w) {
  std::vector<double> out(cut.edge_ancestor.size());
  for (size_t e = 0; e < out.size(); ++e) out[e] = w[cut.edge_ancestor[e]];
  return out;
}

std::vector<Complex> side_channel(const PlanarGraph& g, const GraphPath& path,
                                  int side, double delta) {
  const auto& vs = path.vertices;
  std::vector<Complex> out;
  out.reserve(vs.size());
  for (size_t i = 0; i < vs.size(); ++i) {
    if (i == 0 || i + 1 == vs.size()) {
      out.push_back(g.pos[vs[i]]);
      continue;
    }
    double alpha = normalize_angle(g.edge_angle_at(vs[i], vs[i - 1]));
    double beta = normalize_angle(g.edge_angle_at(vs[i], vs[i + 1]));
    // Right of travel is the CCW wedge from alpha to beta; left the other.
    double span, base;
    if (side < 0) {
      base = alpha;
      span = normalize_angle(beta - alpha);
    } else {
      base = beta;
      span = normalize_angle(alpha - beta);
    }
    if (span == 0.0) span = kTwoPi;
    out.push_back(g.pos[vs[i]] + delta * std::polar(1.0, base + 0.5 * span));
  }
  // A single-edge path has no interior vertex to displace: bow the midpoint
  // so winding around a point on the segment itself stays defined.
  if (vs.size() == 2) {
    Complex a = g.pos[vs[0]], b = g.pos[vs[1]];
    Complex n = (b - a) / std::abs(b - a) * Complex(0, 1);
    out.insert(out.begin() + 1,
               0.5 * (a + b) + static_cast<double>(side) * delta * n);
  }
  return out;
}

}  // namespace rhd
