#include "rhdeform/deform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "rhdeform/errors.hpp"
#include "rhdeform/lensing.hpp"
#include "rhdeform/winding.hpp"

namespace rhd {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

double norm_angle(double a) {
  while (a < 0) a += kTwoPi;
  while (a >= kTwoPi) a -= kTwoPi;
  return a;
}

}  // namespace

int select_dominant(const std::vector<std::pair<int, double>>& candidates) {
  if (candidates.empty()) throw InvalidInput("no candidates");
  int best = candidates[0].first;
  double best_w = candidates[0].second;
  for (const auto& [i, w] : candidates) {
    if (w > best_w || (w == best_w && i < best)) {
      best = i;
      best_w = w;
    }
  }
  return best;
}

double contour_weight(const RHProblem& rhp, const LocalWeight& w) {
  double total = 0.0;
  for (const auto& part : rhp.parts) {
    const auto& pts = part.arc.points;
    for (size_t i = 1; i < pts.size(); ++i)
      total += edge_weight(part.jump, w, pts[i - 1], pts[i]);
  }
  return total;
}

GraphPath embed_polyline(const PlanarGraph& g, const std::vector<Complex>& polyline) {
  WeightedPlanarGraph wg;
  wg.base = &g;
  wg.weight.resize(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    auto [u, v] = g.edges[e];
    double d = 0.5 * (point_polyline_distance(g.pos[u], polyline) +
                      point_polyline_distance(g.pos[v], polyline));
    wg.weight[e] = d * std::abs(g.pos[u] - g.pos[v]);
  }
  int s = nearest_vertex(g, polyline.front());
  int t = nearest_vertex(g, polyline.back());
  return shortest_path_geo(wg, s, t);
}

std::vector<SharedComponent> shared_components(const PlanarGraph& g, const GraphPath& a,
                                               const GraphPath& b) {
  (void)g;
  std::map<std::pair<int, int>, int> b_edge_at;  // unordered edge -> index in b
  for (size_t i = 1; i < b.vertices.size(); ++i) {
    int u = b.vertices[i - 1], v = b.vertices[i];
    b_edge_at[{std::min(u, v), std::max(u, v)}] = static_cast<int>(i - 1);
  }
  std::vector<SharedComponent> out;
  size_t i = 1;
  while (i < a.vertices.size()) {
    int u = a.vertices[i - 1], v = a.vertices[i];
    auto it = b_edge_at.find({std::min(u, v), std::max(u, v)});
    if (it == b_edge_at.end()) {
      ++i;
      continue;
    }
    SharedComponent c;
    c.a_begin = static_cast<int>(i - 1);
    c.same_direction = (b.vertices[it->second] == u);
    int b_first = it->second;
    int b_last = it->second;
    while (i < a.vertices.size()) {
      int x = a.vertices[i - 1], y = a.vertices[i];
      auto jt = b_edge_at.find({std::min(x, y), std::max(x, y)});
      if (jt == b_edge_at.end()) break;
      b_first = std::min(b_first, jt->second);
      b_last = std::max(b_last, jt->second);
      ++i;
    }
    c.a_end = static_cast<int>(i - 1);
    c.b_begin = b_first;
    c.b_end = b_last + 1;
    out.push_back(c);
  }
  return out;
}

namespace {

// Fan rule at the first divergence: walking along the shared run, sweep CCW
// from the outgoing run direction; the first back-edge encountered belongs to
// the left path. At the end divergence, sweep CW from the back direction.
int side_from_fans(const PlanarGraph& g, const GraphPath& a, const GraphPath& b,
                   const SharedComponent& c) {
  // b's indices aligned to a's direction.
  auto b_at = [&](int k_from_start) {
    return c.same_direction ? c.b_begin + k_from_start : c.b_end - k_from_start;
  };
  int len = c.a_end - c.a_begin;
  int v0 = a.vertices[c.a_begin];
  int vE = a.vertices[c.a_end];

  bool a_has_prev = c.a_begin > 0;
  bool b_has_prev = c.same_direction ? c.b_begin > 0
                                     : c.b_end < static_cast<int>(b.vertices.size()) - 1;
  if (a_has_prev && b_has_prev) {
    double u = norm_angle(g.edge_angle_at(v0, a.vertices[c.a_begin + 1]));
    double da = norm_angle(g.edge_angle_at(v0, a.vertices[c.a_begin - 1]));
    int b_prev = c.same_direction ? b.vertices[c.b_begin - 1] : b.vertices[c.b_end + 1];
    double db = norm_angle(g.edge_angle_at(v0, b_prev));
    double ra = norm_angle(da - u), rb = norm_angle(db - u);
    if (ra == rb) return 0;
    return ra < rb ? +1 : -1;
  }

  bool a_has_next = c.a_end < static_cast<int>(a.vertices.size()) - 1;
  bool b_has_next = c.same_direction ? c.b_end < static_cast<int>(b.vertices.size()) - 1
                                     : c.b_begin > 0;
  if (a_has_next && b_has_next) {
    (void)len;
    (void)b_at;
    double back = norm_angle(g.edge_angle_at(vE, a.vertices[c.a_end - 1]));
    double ea = norm_angle(g.edge_angle_at(vE, a.vertices[c.a_end + 1]));
    int b_next = c.same_direction ? b.vertices[c.b_end + 1] : b.vertices[c.b_begin - 1];
    double eb = norm_angle(g.edge_angle_at(vE, b_next));
    double ra = norm_angle(back - ea), rb = norm_angle(back - eb);
    if (ra == rb) return 0;
    return ra < rb ? +1 : -1;
  }
  return 0;
}

}  // namespace

int side_of_shared_subpath(const PlanarGraph& g, const GraphPath& a, const GraphPath& b) {
  auto comps = shared_components(g, a, b);
  if (comps.empty()) throw InvalidInput("paths share no edge");
  return side_from_fans(g, a, b, comps.front());
}

bool contains_circle(const GraphPath& p) {
  std::set<int> seen;
  for (int v : p.vertices)
    if (!seen.insert(v).second) return true;
  return false;
}

GraphPath drop_circle(const GraphPath& p) {
  std::map<int, int> first_at;
  for (size_t j = 0; j < p.vertices.size(); ++j) {
    auto it = first_at.find(p.vertices[j]);
    if (it != first_at.end()) {
      GraphPath out;
      out.vertices.assign(p.vertices.begin(), p.vertices.begin() + it->second + 1);
      out.vertices.insert(out.vertices.end(), p.vertices.begin() + j + 1,
                          p.vertices.end());
      return out;
    }
    first_at[p.vertices[j]] = static_cast<int>(j);
  }
  return p;
}

std::optional<Complex> check_condition_ii(const std::vector<Complex>& original,
                                          const std::vector<Complex>& deformed,
                                          const std::vector<Complex>& other_endpoints) {
  std::vector<Complex> walk = original;
  for (auto it = deformed.rbegin(); it != deformed.rend(); ++it) walk.push_back(*it);
  if (walk.size() < 3) return std::nullopt;
  if (std::abs(walk.front() - walk.back()) > 0) walk.push_back(walk.front());

  double diam = 0.0;
  for (Complex p : walk) diam = std::max(diam, std::abs(p - walk.front()));
  for (Complex e : other_endpoints) {
    if (point_polyline_distance(e, walk) < 1e-9 * std::max(diam, 1.0)) continue;
    if (winding_number(walk, e) != 0) return e;
  }
  return std::nullopt;
}

namespace {

std::vector<int> to_pristine(const GraphPath& p, const std::vector<int>& ancestor) {
  std::vector<int> out;
  out.reserve(p.vertices.size());
  for (int v : p.vertices) out.push_back(ancestor[v]);
  return out;
}

GraphPath concat_paths(const std::vector<int>& a, const std::vector<int>& b) {
  GraphPath out;
  out.vertices = a;
  size_t k = (!a.empty() && !b.empty() && a.back() == b.front()) ? 1 : 0;
  out.vertices.insert(out.vertices.end(), b.begin() + k, b.end());
  return out;
}

std::vector<int> all_arc_endpoints(const std::vector<ArcOnGraph>& arcs) {
  std::vector<int> pinch;
  for (const auto& a : arcs) {
    pinch.push_back(a.v_start);
    pinch.push_back(a.v_end);
  }
  std::sort(pinch.begin(), pinch.end());
  pinch.erase(std::unique(pinch.begin(), pinch.end()), pinch.end());
  return pinch;
}

double path_weight_under(const PlanarGraph& g, const std::vector<double>& edge_w,
                         const GraphPath& p) {
  double total = 0.0;
  for (size_t i = 1; i < p.vertices.size(); ++i) {
    int e = g.edge_between(p.vertices[i - 1], p.vertices[i]);
    if (e < 0) throw InvalidInput("path uses a non-edge");
    total += edge_w[e];
  }
  return total;
}

void improve_once(const PlanarGraph& g, const std::vector<ArcOnGraph>& arcs,
                  std::vector<GraphPath>& fixed, int i1, int i2, const LocalWeight& w,
                  const DeformOptions& opts, ImproveRecord& record, int depth,
                  std::set<size_t>& seen);

size_t pair_state_hash(const GraphPath& a, const GraphPath& b) {
  size_t h = 1469598103934665603ull;
  auto mix = [&h](int v) {
    h ^= static_cast<size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  for (int v : a.vertices) mix(v);
  mix(-1);
  for (int v : b.vertices) mix(v);
  return h;
}

// Improvement body for one contiguous shared component.
void improve_component(const PlanarGraph& g, const std::vector<ArcOnGraph>& arcs,
                       std::vector<GraphPath>& fixed, int i1, int i2,
                       const SharedComponent& comp, const LocalWeight& w,
                       const DeformOptions& opts, ImproveRecord& record, int depth,
                       std::set<size_t>& seen) {
  const GraphPath& p1 = fixed[i1];
  const GraphPath& p2 = fixed[i2];

  int side = side_from_fans(g, p1, p2, comp);
  if (side == 0) {
    record.skipped = true;
    record.reason = "no geometric divergence";
    return;
  }
  // Combined jump of the inverse lensing: right factor times left factor.
  JumpFunction combined =
      side > 0 ? JumpFunction::product({arcs[i2].jump, arcs[i1].jump})
               : JumpFunction::product({arcs[i1].jump, arcs[i2].jump});
  auto combined_w = weight_graph(g, combined, w);

  std::vector<int> s(p1.vertices.begin() + comp.a_begin,
                     p1.vertices.begin() + comp.a_end + 1);
  std::vector<int> p1l(p1.vertices.begin(), p1.vertices.begin() + comp.a_begin + 1);
  std::vector<int> p1r(p1.vertices.begin() + comp.a_end, p1.vertices.end());
  std::vector<int> p2l(p2.vertices.begin(), p2.vertices.begin() + comp.b_begin + 1);
  std::vector<int> p2r(p2.vertices.begin() + comp.b_end, p2.vertices.end());

  // Split along all other fixed paths plus the two joined flank paths.
  std::vector<GraphPath> cut_paths;
  for (size_t k = 0; k < fixed.size(); ++k)
    if (static_cast<int>(k) != i1 && static_cast<int>(k) != i2 &&
        fixed[k].vertices.size() > 1)
      cut_paths.push_back(fixed[k]);
  // Joined flanks run through the shared endpoints: start1 -> s0 -> start2
  // and end1 -> sE -> end2.
  GraphPath flank_l = concat_paths(p1l, {p2l.rbegin(), p2l.rend()});
  GraphPath flank_r = concat_paths({p1r.rbegin(), p1r.rend()}, p2r);
  for (const GraphPath* f : {&flank_l, &flank_r}) {
    if (f->vertices.size() < 2) continue;
    if (!f->is_simple()) {
      record.skipped = true;
      record.reason = "flank path not simple";
      return;
    }
    cut_paths.push_back(*f);
  }

  CutGraph cut = cut_along(g, cut_paths, all_arc_endpoints(arcs));
  WeightedPlanarGraph cw;
  cw.base = &cut.graph;
  cw.weight = transfer_weights(cut, combined_w.weight);

  // Start/end copies on the side the shared run leaves through. When the
  // run's own first edge is part of the cut (paths overlapping after earlier
  // surgery), fall back to adjacency.
  auto pick_copy = [&](int v, int toward) {
    if (cut.copies[v].size() == 1) return cut.copies[v][0];
    try {
      return cut.copy_at(v, std::arg(g.pos[toward] - g.pos[v]));
    } catch (const NotSplittable&) {
      int best = -1;
      for (int c : cut.copies[v])
        for (int t : cut.copies[toward])
          if (cut.graph.edge_between(c, t) >= 0 && (best < 0 || c < best)) best = c;
      if (best < 0) throw;
      return best;
    }
  };
  int s0 = s.front(), sE = s.back();
  int src = pick_copy(s0, s[1]);
  int dst = pick_copy(sE, s[s.size() - 2]);

  if (record.rounds == 0)
    record.weight_before = path_weight_under(g, combined_w.weight, GraphPath{s});
  GraphPath star_cut;
  try {
    star_cut = shortest_path_geo(cw, src, dst);
  } catch (const Unreachable&) {
    record.skipped = true;
    record.reason = "no replacement subpath";
    return;
  }
  GraphPath star_path{to_pristine(star_cut, cut.ancestor)};
  while (contains_circle(star_path)) star_path = drop_circle(star_path);
  const std::vector<int>& star = star_path.vertices;
  record.weight_after = path_weight_under(g, combined_w.weight, GraphPath{star});

  GraphPath new_p1 = concat_paths(concat_paths(p1l, star).vertices, p1r);
  GraphPath new_p2 = concat_paths(concat_paths(p2l, star).vertices, p2r);
  fixed[i1] = new_p1;
  fixed[i2] = new_p2;
  ++record.rounds;

  auto edges_of = [](const GraphPath& p) {
    std::set<std::pair<int, int>> e;
    for (size_t i = 1; i < p.vertices.size(); ++i)
      e.insert({std::min(p.vertices[i - 1], p.vertices[i]),
                std::max(p.vertices[i - 1], p.vertices[i])});
    return e;
  };
  std::set<std::pair<int, int>> s_edges;
  for (size_t i = 1; i < s.size(); ++i)
    s_edges.insert({std::min(s[i - 1], s[i]), std::max(s[i - 1], s[i])});

  for (int which : {i1, i2}) {
    if (!contains_circle(fixed[which])) continue;
    while (contains_circle(fixed[which])) fixed[which] = drop_circle(fixed[which]);
    int other = (which == i1) ? i2 : i1;
    // Recompute the partner in its own weights, split along everything else.
    std::vector<GraphPath> others;
    for (size_t k = 0; k < fixed.size(); ++k)
      if (static_cast<int>(k) != other && fixed[k].vertices.size() > 1)
        others.push_back(fixed[k]);
    CutGraph cut2 = cut_along(g, others, all_arc_endpoints(arcs));
    auto own_w = weight_graph(g, arcs[other].jump, w);
    WeightedPlanarGraph cw2;
    cw2.base = &cut2.graph;
    cw2.weight = transfer_weights(cut2, own_w.weight);
    int src2 = cut2.copies[arcs[other].v_start][0];
    int dst2 = cut2.copies[arcs[other].v_end][0];
    GraphPath part2 = shortest_path_geo(cw2, src2, dst2);
    GraphPath part2_pristine{to_pristine(part2, cut2.ancestor)};
    while (contains_circle(part2_pristine)) part2_pristine = drop_circle(part2_pristine);
    fixed[other] = part2_pristine;

    auto comps_now = shared_components(g, fixed[i1], fixed[i2]);
    std::set<std::pair<int, int>> shared_now;
    for (const auto& cmp : comps_now) {
      const auto e1 = edges_of(GraphPath{std::vector<int>(
          fixed[i1].vertices.begin() + cmp.a_begin,
          fixed[i1].vertices.begin() + cmp.a_end + 1)});
      shared_now.insert(e1.begin(), e1.end());
    }
    if (shared_now != s_edges && !comps_now.empty())
      improve_once(g, arcs, fixed, i1, i2, w, opts, record, depth + 1, seen);
    break;
  }
}

void improve_once(const PlanarGraph& g, const std::vector<ArcOnGraph>& arcs,
                  std::vector<GraphPath>& fixed, int i1, int i2, const LocalWeight& w,
                  const DeformOptions& opts, ImproveRecord& record, int depth,
                  std::set<size_t>& seen) {
  if (depth > opts.improve_recursion_limit)
    throw RecursionLimit("shared-subpath improvement depth " + std::to_string(depth) +
                         " exceeded for arcs " + std::to_string(i1) + "," +
                         std::to_string(i2));
  // The mutual recursion has no termination proof; a revisited state means a
  // cycle, which ends the improvement at the current (valid) paths.
  if (!seen.insert(pair_state_hash(fixed[i1], fixed[i2])).second) {
    record.reason = "improvement cycle detected";
    return;
  }
  auto comps = shared_components(g, fixed[i1], fixed[i2]);
  if (comps.empty()) return;
  for (const auto& comp : comps) {
    if (!comp.same_direction) continue;
    improve_component(g, arcs, fixed, i1, i2, comp, w, opts, record, depth, seen);
    // Paths changed; re-detect instead of trusting stale component indices.
    return;
  }
  // Every shared run is traversed in opposite directions. Reversing one
  // contour (which carries the inverse jump -- an equivalent problem) makes
  // the run orientations agree, and the standard surgery applies.
  std::vector<ArcOnGraph> arcs_rev = arcs;
  arcs_rev[i2].jump = JumpFunction::inverse(arcs[i2].jump);
  std::swap(arcs_rev[i2].v_start, arcs_rev[i2].v_end);
  std::reverse(arcs_rev[i2].original.begin(), arcs_rev[i2].original.end());
  fixed[i2] = reverse(fixed[i2]);
  auto comps_rev = shared_components(g, fixed[i1], fixed[i2]);
  bool processed = false;
  for (const auto& comp : comps_rev) {
    if (!comp.same_direction) continue;
    improve_component(g, arcs_rev, fixed, i1, i2, comp, w, opts, record, depth, seen);
    processed = true;
    break;
  }
  fixed[i2] = reverse(fixed[i2]);
  if (!processed) {
    record.skipped = true;
    record.reason = "shared subpath orientations cannot be aligned";
  }
}

}  // namespace

void improve_shared_subpath(const PlanarGraph& g, const std::vector<ArcOnGraph>& arcs,
                            std::vector<GraphPath>& fixed, int i1, int i2,
                            const LocalWeight& w, const DeformOptions& opts,
                            ImproveRecord& record) {
  record.i1 = i1;
  record.i2 = i2;
  std::vector<GraphPath> work = fixed;

  // Weight of the pair as it would be mapped (shared runs under the product
  // jump); used to pick the best state the improvement rounds pass through,
  // since the mutual recursion may cycle rather than settle.
  auto pair_weight = [&](const std::vector<GraphPath>& fx) {
    std::vector<ArcOnGraph> pair_arcs{arcs[i1], arcs[i2]};
    std::vector<GraphPath> pair_fixed{fx[i1], fx[i2]};
    try {
      return contour_weight(map_to_rhp(g, pair_arcs, pair_fixed), w);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  std::vector<GraphPath> best = work;
  double best_w = pair_weight(work);

  // Components are re-detected after each pass; a pass that changes nothing
  // any more terminates the loop. The cycle guard is per pass, so a completed
  // pass's end state does not block the next pass.
  for (int round = 0; round < opts.improve_recursion_limit; ++round) {
    std::vector<GraphPath> before = work;
    std::set<size_t> seen;
    improve_once(g, arcs, work, i1, i2, w, opts, record, 0, seen);
    double wk = pair_weight(work);
    if (wk < best_w) {
      best_w = wk;
      best = work;
    }
    bool changed = before[i1].vertices != work[i1].vertices ||
                   before[i2].vertices != work[i2].vertices;
    if (!changed) break;
  }
  fixed = std::move(best);  // transactional: nothing was published on throw
}

RHProblem map_to_rhp(const PlanarGraph& g, const std::vector<ArcOnGraph>& arcs,
                     const std::vector<GraphPath>& fixed) {
  struct Cover {
    int arc;
    bool forward;  // traverses the edge in (min, max) id order
  };
  std::map<int, std::vector<Cover>> cover;  // edge id -> covering arcs
  std::vector<int> covered_degree(g.num_vertices(), 0);
  for (size_t i = 0; i < fixed.size(); ++i) {
    for (size_t k = 1; k < fixed[i].vertices.size(); ++k) {
      int u = fixed[i].vertices[k - 1], v = fixed[i].vertices[k];
      int e = g.edge_between(u, v);
      if (e < 0) throw InvalidInput("fixed path uses a non-edge");
      cover[e].push_back({static_cast<int>(i), u < v});
    }
  }
  for (const auto& [e, cs] : cover) {
    covered_degree[g.edges[e].first]++;
    covered_degree[g.edges[e].second]++;
  }
  std::set<int> endpoint_marks;
  for (const auto& a : arcs) {
    endpoint_marks.insert(a.v_start);
    endpoint_marks.insert(a.v_end);
  }

  auto cover_key = [&](int e, bool rel_to_forward) {
    std::vector<std::pair<int, bool>> key;
    for (const Cover& c : cover[e]) key.push_back({c.arc, c.forward == rel_to_forward});
    std::sort(key.begin(), key.end());
    return key;
  };

  // Non-crossing sanity: at any vertex passed through by two distinct paths
  // that share no edge there, their edge fans must not interleave.
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (covered_degree[v] < 4) continue;
    std::map<int, std::vector<double>> fan;  // arc -> angles of its edges at v
    for (size_t i = 0; i < fixed.size(); ++i) {
      const auto& vs = fixed[i].vertices;
      for (size_t k = 0; k < vs.size(); ++k) {
        if (vs[k] != v) continue;
        if (k > 0) fan[i].push_back(norm_angle(g.edge_angle_at(v, vs[k - 1])));
        if (k + 1 < vs.size()) fan[i].push_back(norm_angle(g.edge_angle_at(v, vs[k + 1])));
      }
    }
    for (auto it1 = fan.begin(); it1 != fan.end(); ++it1)
      for (auto it2 = std::next(it1); it2 != fan.end(); ++it2) {
        if (it1->second.size() != 2 || it2->second.size() != 2) continue;
        double a1 = it1->second[0], a2 = it1->second[1];
        bool shared = false;
        for (double x : it2->second)
          if (x == a1 || x == a2) shared = true;
        if (shared) continue;
        int inside = 0;
        for (double x : it2->second)
          if (norm_angle(x - a1) < norm_angle(a2 - a1)) ++inside;
        if (inside == 1)
          throw CrossingPaths("fixed paths cross transversally at a vertex");
      }
  }

  RHProblem out;
  out.dimension = arcs.empty() ? 2 : arcs[0].jump.dimension();
  std::set<int> assigned;

  for (size_t i = 0; i < fixed.size(); ++i) {
    const auto& vs = fixed[i].vertices;
    size_t k = 1;
    while (k < vs.size()) {
      int e = g.edge_between(vs[k - 1], vs[k]);
      if (assigned.count(e)) {
        ++k;
        continue;
      }
      // Grow a run along path i starting at edge index k-1.
      bool fwd0 = vs[k - 1] < vs[k];
      auto key0 = cover_key(e, fwd0);
      size_t run_begin = k - 1;
      size_t run_end = k;
      assigned.insert(e);
      while (run_end + 1 < vs.size()) {
        int v_mid = vs[run_end];
        if (covered_degree[v_mid] != 2 || endpoint_marks.count(v_mid)) break;
        int e2 = g.edge_between(vs[run_end], vs[run_end + 1]);
        if (assigned.count(e2)) break;
        bool fwd2 = vs[run_end] < vs[run_end + 1];
        if (cover_key(e2, fwd2) != key0) break;
        assigned.insert(e2);
        ++run_end;
      }

      // Covering arcs sorted left -> right across the run.
      std::vector<int> order;
      for (const auto& [arc_idx, rel] : key0) order.push_back(arc_idx);
      GraphPath run{std::vector<int>(vs.begin() + run_begin, vs.begin() + run_end + 1)};
      auto oriented = [&](int arc_idx) {
        for (const auto& [aidx, rel] : key0)
          if (aidx == arc_idx)
            return rel ? fixed[arc_idx] : reverse(fixed[arc_idx]);
        throw InvalidInput("arc not covering run");
      };
      std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        auto cs = shared_components(g, oriented(x), oriented(y));
        if (!cs.empty()) {
          int side = side_from_fans(g, oriented(x), oriented(y), cs.front());
          if (side != 0) return side > 0;
        }
        if (arcs[x].family >= 0 && arcs[x].family == arcs[y].family)
          return arcs[x].family_pos < arcs[y].family_pos;
        return x < y;
      });

      // Product from the rightmost to the leftmost factor.
      std::vector<JumpFunction> js;
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        bool rel = true;
        for (const auto& [aidx, r] : key0)
          if (aidx == *it) rel = r;
        js.push_back(rel ? arcs[*it].jump : JumpFunction::inverse(arcs[*it].jump));
      }
      RHPart part;
      part.jump = js.size() == 1 ? js[0] : JumpFunction::product(js);
      for (int v : run.vertices) part.arc.points.push_back(g.pos[v]);
      out.parts.push_back(std::move(part));
      k = run_end + 1;
    }
  }
  return out;
}

nlohmann::json DeformationTrace::to_json() const {
  nlohmann::json its = nlohmann::json::array();
  for (const auto& it : iterations) {
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& [i, w] : it.candidate_weights) cands.push_back({{"arc", i}, {"weight", w}});
    nlohmann::json imps = nlohmann::json::array();
    for (const auto& im : it.improvements)
      imps.push_back({{"i1", im.i1},
                      {"i2", im.i2},
                      {"weight_before", im.weight_before},
                      {"weight_after", im.weight_after},
                      {"rounds", im.rounds},
                      {"skipped", im.skipped},
                      {"reason", im.reason}});
    its.push_back({{"candidates", cands},
                   {"chosen", it.chosen},
                   {"chosen_weight", it.chosen_weight},
                   {"splits_applied", it.splits_applied},
                   {"split_vertices", it.split_vertices},
                   {"improvements", imps}});
  }
  return {{"snap_distances", snap_distances}, {"iterations", its}};
}

std::vector<ArcOnGraph> snap_arcs(const PlanarGraph& g, const RHProblem& rhp,
                                  std::vector<double>* snap_distances) {
  std::vector<ArcOnGraph> arcs;
  for (const auto& part : rhp.parts) {
    if (part.arc.unbounded())
      throw InvalidInput("deformation requires truncated (finite) arcs");
    ArcOnGraph a;
    a.jump = part.jump;
    a.v_start = nearest_vertex(g, part.arc.start());
    a.v_end = nearest_vertex(g, part.arc.end());
    a.original = part.arc.points;
    double snap = std::max(std::abs(g.pos[a.v_start] - part.arc.start()),
                           std::abs(g.pos[a.v_end] - part.arc.end()));
    a.original.front() = g.pos[a.v_start];
    a.original.back() = g.pos[a.v_end];
    a.snapped = embed_polyline(g, a.original);
    if (snap_distances) snap_distances->push_back(snap);
    arcs.push_back(std::move(a));
  }
  return arcs;
}

namespace {

// Candidate path for arc i in a graph cut along the current fixed set (which
// must not include arc i itself). Family members with fixed siblings get the
// order-constrained variants.
GraphPath arc_candidate(const PlanarGraph& g, const std::vector<ArcOnGraph>& arcs,
                        const std::vector<GraphPath>& fixed, const CutGraph& cut,
                        const WeightedPlanarGraph& cw, int i) {
  const int n = static_cast<int>(arcs.size());
  int src = cut.copies[arcs[i].v_start][0];
  int dst = cut.copies[arcs[i].v_end][0];
  if (arcs[i].family < 0) return shortest_path_geo(cw, src, dst);

  // Nearest fixed siblings on each side, in geometric order.
  int left_sib = -1, right_sib = -1;
  for (int j = 0; j < n; ++j) {
    if (j == i || arcs[j].family != arcs[i].family) continue;
    if (fixed[j].vertices.empty()) continue;
    if (arcs[j].family_pos < arcs[i].family_pos &&
        (left_sib < 0 || arcs[j].family_pos > arcs[left_sib].family_pos))
      left_sib = j;
    if (arcs[j].family_pos > arcs[i].family_pos &&
        (right_sib < 0 || arcs[j].family_pos < arcs[right_sib].family_pos))
      right_sib = j;
  }
  const double delta = 2.0 * cut.offset_eps;
  auto anchor_of = [&](int sib) {
    const auto& vs = fixed[sib].vertices;
    if (vs.size() == 2) return 0.5 * (g.pos[vs[0]] + g.pos[vs[1]]);
    return g.pos[vs[vs.size() / 2]];
  };
  if (left_sib < 0 && right_sib < 0) return shortest_path_geo(cw, src, dst);
  if (left_sib >= 0 && right_sib >= 0)
    return path_between_siblings(cut.graph, cw.weight,
                                 side_channel(g, fixed[left_sib], -1, delta),
                                 side_channel(g, fixed[right_sib], +1, delta), src,
                                 dst);
  int sib = left_sib >= 0 ? left_sib : right_sib;
  int sign = left_sib >= 0 ? +1 : -1;
  return constrained_enclosing_path(cut.graph, cw.weight,
                                    side_channel(g, fixed[sib], sign, delta),
                                    anchor_of(sib), sign, src, dst);
}

}  // namespace

namespace {

DeformationResult simple_deformation_single(const PlanarGraph& g,
                                            const std::vector<ArcOnGraph>& arcs,
                                            const LocalWeight& w,
                                            const DeformOptions& opts,
                                            bool lightest_first) {
  const int n = static_cast<int>(arcs.size());
  DeformationResult result;

  std::vector<std::vector<double>> pristine_w(n);
  for (int i = 0; i < n; ++i) pristine_w[i] = weight_graph(g, arcs[i].jump, w).weight;

  result.input_weight = 0.0;
  for (int i = 0; i < n; ++i)
    result.input_weight += path_weight_under(g, pristine_w[i], arcs[i].snapped);

  std::vector<GraphPath> fixed(n);
  std::vector<int> fixed_order;
  std::vector<int> queue(n);
  for (int i = 0; i < n; ++i) queue[i] = i;
  const std::vector<int> pinch = all_arc_endpoints(arcs);

  while (!queue.empty()) {
    IterationRecord iter;
    std::vector<GraphPath> cut_paths;
    for (int i : fixed_order)
      if (fixed[i].vertices.size() > 1) cut_paths.push_back(fixed[i]);
    CutGraph cut = cut_along(g, cut_paths, pinch);
    iter.splits_applied = static_cast<int>(cut_paths.size());
    iter.split_vertices = cut.graph.num_vertices() - g.num_vertices();

    const int q = static_cast<int>(queue.size());
    std::vector<GraphPath> cand(q);
    std::vector<double> cand_w(q);
    std::vector<std::string> errors(q);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < q; ++k) {
      int i = queue[k];
      try {
        WeightedPlanarGraph cw;
        cw.base = &cut.graph;
        cw.weight = transfer_weights(cut, pristine_w[i]);
        GraphPath p = arc_candidate(g, arcs, fixed, cut, cw, i);
        cand[k] = p;
        cand_w[k] = 0.0;
        for (size_t e = 1; e < p.vertices.size(); ++e)
          cand_w[k] += cw.weight[cut.graph.edge_between(p.vertices[e - 1], p.vertices[e])];
        // Store in pristine ids right away.
        cand[k].vertices = to_pristine(cand[k], cut.ancestor);
      } catch (const Error& err) {
        errors[k] = "candidate for arc " + std::to_string(i) + ": " + err.what();
      }
    }
    for (int k = 0; k < q; ++k)
      if (!errors[k].empty()) throw Unreachable(errors[k]);

    std::vector<std::pair<int, double>> candidates;
    for (int k = 0; k < q; ++k) candidates.push_back({queue[k], cand_w[k]});
    iter.candidate_weights = candidates;
    int i_star;
    if (!lightest_first) {
      i_star = select_dominant(candidates);
    } else {
      i_star = candidates[0].first;
      double best_w = candidates[0].second;
      for (const auto& [i, cw_] : candidates)
        if (cw_ < best_w || (cw_ == best_w && i < i_star)) {
          i_star = i;
          best_w = cw_;
        }
    }
    int k_star = 0;
    while (queue[k_star] != i_star) ++k_star;

    GraphPath chosen = cand[k_star];
    if (!chosen.is_simple()) {
      while (contains_circle(chosen)) chosen = drop_circle(chosen);
    }
    fixed[i_star] = chosen;
    iter.chosen = i_star;
    iter.chosen_weight = cand_w[k_star];
    queue.erase(queue.begin() + k_star);

    for (int i : fixed_order) {
      if (shared_components(g, fixed[i], fixed[i_star]).empty()) continue;
      ImproveRecord rec;
      improve_shared_subpath(g, arcs, fixed, i, i_star, w, opts, rec);
      iter.improvements.push_back(rec);
    }
    fixed_order.push_back(i_star);

    if (opts.verify_condition_ii) {
      for (int i : fixed_order) {
        std::vector<Complex> others;
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          others.push_back(g.pos[arcs[j].v_start]);
          others.push_back(g.pos[arcs[j].v_end]);
        }
        auto bad = check_condition_ii(arcs[i].original,
                                      GraphPath{fixed[i]}.polyline(g), others);
        if (bad)
          throw ConditionTwoViolated("deformation of arc " + std::to_string(i) +
                                         " encloses another arc endpoint",
                                     *bad);
      }
    }
    result.trace.iterations.push_back(std::move(iter));
  }

  // Stabilization sweeps. The greedy fixes paths against incomplete
  // information, and at strongly oscillatory data a pair of paths can jam:
  // each is optimal given the other's split, yet the joint configuration is
  // terrible. Re-fix single paths and jammed pairs (trying both fixing
  // orders), and re-apply the pairwise improvement; accept any change only
  // when the mapped system weight strictly decreases.
  auto system_weight = [&](const std::vector<GraphPath>& fx) {
    return contour_weight(map_to_rhp(g, arcs, fx), w);
  };
  auto candidate_for = [&](const std::vector<GraphPath>& fx, int i,
                           GraphPath* out) -> bool {
    std::vector<GraphPath> other_paths;
    for (int j = 0; j < n; ++j)
      if (j != i && fx[j].vertices.size() > 1) other_paths.push_back(fx[j]);
    try {
      CutGraph cut_i = cut_along(g, other_paths, pinch);
      WeightedPlanarGraph cw;
      cw.base = &cut_i.graph;
      cw.weight = transfer_weights(cut_i, pristine_w[i]);
      GraphPath p = arc_candidate(g, arcs, fx, cut_i, cw, i);
      GraphPath pristine{to_pristine(p, cut_i.ancestor)};
      while (contains_circle(pristine)) pristine = drop_circle(pristine);
      *out = pristine;
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  double current_weight = system_weight(fixed);
  for (int round = 0; round < 2 * n + 2; ++round) {
    bool changed = false;
    IterationRecord iter;

    auto accept = [&](std::vector<GraphPath>& trial, int i1, int i2,
                      const std::string& reason) {
      double trial_weight;
      try {
        trial_weight = system_weight(trial);
      } catch (const Error&) {
        return false;
      }
      if (!(trial_weight < current_weight * (1.0 - 1e-12))) return false;
      ImproveRecord rec;
      rec.i1 = i1;
      rec.i2 = i2;
      rec.weight_before = current_weight;
      rec.weight_after = trial_weight;
      rec.reason = reason;
      iter.improvements.push_back(rec);
      fixed = std::move(trial);
      current_weight = trial_weight;
      changed = true;
      return true;
    };

    // (a) single-path refix
    for (int i = 0; i < n; ++i) {
      std::vector<GraphPath> trial = fixed;
      if (!candidate_for(fixed, i, &trial[i])) continue;
      if (trial[i].vertices == fixed[i].vertices) continue;
      accept(trial, i, i, "refixed");
    }

    // (b) jammed-pair refix, both fixing orders
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (arcs[i].family >= 0 || arcs[j].family >= 0) continue;
        if (shared_components(g, fixed[i], fixed[j]).empty()) continue;
        for (auto [first, second] : {std::pair{i, j}, std::pair{j, i}}) {
          std::vector<GraphPath> trial = fixed;
          trial[first].vertices.clear();
          trial[second].vertices.clear();
          if (!candidate_for(trial, first, &trial[first])) continue;
          if (!candidate_for(trial, second, &trial[second])) continue;
          if (!shared_components(g, trial[i], trial[j]).empty()) {
            ImproveRecord rec;
            try {
              improve_shared_subpath(g, arcs, trial, i, j, w, opts, rec);
            } catch (const Error&) {
              continue;
            }
          }
          accept(trial, i, j, "pair refixed");
        }
      }

    // (c) pairwise shared-subpath improvements
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (shared_components(g, fixed[i], fixed[j]).empty()) continue;
        std::vector<GraphPath> trial = fixed;
        ImproveRecord rec;
        try {
          improve_shared_subpath(g, arcs, trial, i, j, w, opts, rec);
        } catch (const Error&) {
          continue;
        }
        if (trial[i].vertices == fixed[i].vertices &&
            trial[j].vertices == fixed[j].vertices)
          continue;
        accept(trial, i, j, "improved");
      }

    if (!iter.improvements.empty()) result.trace.iterations.push_back(std::move(iter));
    if (!changed) break;
  }
  if (opts.verify_condition_ii) {
    for (int i = 0; i < n; ++i) {
      std::vector<Complex> others;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        others.push_back(g.pos[arcs[j].v_start]);
        others.push_back(g.pos[arcs[j].v_end]);
      }
      auto bad =
          check_condition_ii(arcs[i].original, GraphPath{fixed[i]}.polyline(g), others);
      if (bad)
        throw ConditionTwoViolated(
            "deformation of arc " + std::to_string(i) + " encloses another arc endpoint",
            *bad);
    }
  }

  result.rhp = map_to_rhp(g, arcs, fixed);
  result.fixed = fixed;
  result.output_weight = contour_weight(result.rhp, w);
  return result;
}

}  // namespace

DeformationResult simple_deformation_on_graph(const PlanarGraph& g,
                                              const std::vector<ArcOnGraph>& arcs,
                                              const LocalWeight& w,
                                              const DeformOptions& opts) {
  const int n = static_cast<int>(arcs.size());
  // One run of the greedy, with the arc array rotated by `rot`. Indices in
  // the result are mapped back to the caller's ordering.
  auto run_rotated = [&](int rot, bool lightest_first) {
    std::vector<ArcOnGraph> perm_arcs;
    std::vector<int> orig_of(n);
    perm_arcs.reserve(n);
    for (int k = 0; k < n; ++k) {
      int o = (k + rot) % n;
      perm_arcs.push_back(arcs[o]);
      orig_of[k] = o;
    }
    DeformationResult r = simple_deformation_single(g, perm_arcs, w, opts, lightest_first);
    if (rot == 0) return r;
    DeformationResult out;
    out.input_weight = r.input_weight;
    out.trace = std::move(r.trace);
    for (auto& it : out.trace.iterations) {
      if (it.chosen >= 0) it.chosen = orig_of[it.chosen];
      for (auto& c : it.candidate_weights) c.first = orig_of[c.first];
      for (auto& im : it.improvements) {
        if (im.i1 >= 0) im.i1 = orig_of[im.i1];
        if (im.i2 >= 0) im.i2 = orig_of[im.i2];
      }
    }
    out.fixed.resize(n);
    for (int k = 0; k < n; ++k) out.fixed[orig_of[k]] = r.fixed[k];
    out.rhp = map_to_rhp(g, arcs, out.fixed);
    out.output_weight = contour_weight(out.rhp, w);
    return out;
  };

  // The greedy fixing order occasionally jams on strongly oscillatory data
  // (two arcs each optimal against the other's split, jointly terrible).
  // Deterministic restarts over rotated arc orderings are cheap; the
  // lightest mapped system wins, with the plain order winning ties.
  DeformationResult best = run_rotated(0, false);
  if (!(best.output_weight <= 100.0)) {
    for (int pass = 0; pass < 2 && !(best.output_weight <= 100.0); ++pass) {
      bool lightest_first = pass == 1;
      for (int rot = (pass == 0 ? 1 : 0); rot < n; ++rot) {
        DeformationResult alt;
        try {
          alt = run_rotated(rot, lightest_first);
        } catch (const Error&) {
          continue;
        }
        if (alt.output_weight < best.output_weight) best = std::move(alt);
      }
    }
  }
  return best;
}

DeformationResult simple_deformation(const RHProblem& rhp, int nx, int ny,
                                     const LocalWeight& w, const DeformOptions& opts) {
  Rectangle rect;
  bool first = true;
  for (const auto& part : rhp.parts) {
    if (part.arc.unbounded())
      throw InvalidInput("simple_deformation requires truncated arcs");
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
  PlanarGraph g = build_grid_graph(rect, nx, ny);
  DeformationTrace trace;
  auto arcs = snap_arcs(g, rhp, &trace.snap_distances);
  auto result = simple_deformation_on_graph(g, arcs, w, opts);
  result.trace.snap_distances = trace.snap_distances;
  return result;
}

}  // namespace rhd
