#include "rhdeform/weighted_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "rhdeform/errors.hpp"

namespace rhd {

double WeightedPlanarGraph::total_of(const std::vector<int>& vertex_path) const {
  double total = 0.0;
  for (size_t i = 1; i < vertex_path.size(); ++i) {
    int id = base->edge_between(vertex_path[i - 1], vertex_path[i]);
    if (id < 0) throw InvalidInput("path uses a non-edge");
    total += weight[id];
  }
  return total;
}

double edge_weight(const JumpFunction& gj, const LocalWeight& w, Complex a, Complex b) {
  double val = 0.5 * std::abs(b - a) * (w(gj(a)) + w(gj(b)));
  if (!std::isfinite(val) || val > kWeightSentinel) return kWeightSentinel;
  return val;
}

WeightedPlanarGraph weight_graph_serial(const PlanarGraph& g, const JumpFunction& gj,
                                        const LocalWeight& w) {
  WeightedPlanarGraph wg;
  wg.base = &g;
  wg.weight.resize(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    auto [u, v] = g.edges[e];
    wg.weight[e] = edge_weight(gj, w, g.pos[u], g.pos[v]);
  }
  return wg;
}

WeightedPlanarGraph weight_graph(const PlanarGraph& g, const JumpFunction& gj,
                                 const LocalWeight& w) {
  WeightedPlanarGraph wg;
  wg.base = &g;
  wg.weight.resize(g.num_edges());
#pragma omp parallel for schedule(static)
  for (int e = 0; e < g.num_edges(); ++e) {
    auto [u, v] = g.edges[e];
    wg.weight[e] = edge_weight(gj, w, g.pos[u], g.pos[v]);
  }
  return wg;
}

std::vector<Complex> GraphPath::polyline(const PlanarGraph& g) const {
  std::vector<Complex> out;
  out.reserve(vertices.size());
  for (int v : vertices) out.push_back(g.pos[v]);
  return out;
}

bool GraphPath::is_simple() const {
  std::vector<int> s = vertices;
  std::sort(s.begin(), s.end());
  return std::adjacent_find(s.begin(), s.end()) == s.end();
}

GraphPath reverse(const GraphPath& p) {
  GraphPath r = p;
  std::reverse(r.vertices.begin(), r.vertices.end());
  return r;
}

ShortestPathTree dijkstra_tree(const WeightedPlanarGraph& g, int source) {
  const PlanarGraph& base = *g.base;
  const double inf = std::numeric_limits<double>::infinity();
  ShortestPathTree t;
  t.dist.assign(base.num_vertices(), inf);
  t.parent.assign(base.num_vertices(), -1);
  std::vector<bool> done(base.num_vertices(), false);

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  t.dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = true;
    for (const auto& [v, eid] : base.adj[u]) {
      if (done[v]) continue;
      double alt = d + g.weight[eid];
      if (alt < t.dist[v]) {
        t.dist[v] = alt;
        t.parent[v] = u;
        heap.push({alt, v});
      } else if (alt == t.dist[v] && t.parent[v] >= 0 && u < t.parent[v]) {
        t.parent[v] = u;
        heap.push({alt, v});
      }
    }
  }
  return t;
}

GraphPath ShortestPathTree::path_from(int v) const {
  GraphPath p;
  for (int c = v; c >= 0; c = parent[c]) p.vertices.push_back(c);
  return p;
}

GraphPath ShortestPathTree::path_to(int v) const {
  GraphPath p = path_from(v);
  std::reverse(p.vertices.begin(), p.vertices.end());
  return p;
}

GraphPath shortest_path(const WeightedPlanarGraph& g, int u, int v) {
  if (u == v) return GraphPath{{u}};
  ShortestPathTree t = dijkstra_tree(g, u);
  if (!std::isfinite(t.dist[v]))
    throw Unreachable("no path between the requested vertices");
  return t.path_to(v);
}

GraphPath shortest_path_geo(const WeightedPlanarGraph& g, int source, int target) {
  if (source == target) return GraphPath{{source}};
  const PlanarGraph& base = *g.base;
  const double inf = std::numeric_limits<double>::infinity();
  using Key = std::pair<double, double>;  // (weight, length)
  std::vector<Key> dist(base.num_vertices(), {inf, inf});
  std::vector<int> parent(base.num_vertices(), -1);
  std::vector<bool> done(base.num_vertices(), false);

  using Item = std::pair<Key, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[source] = {0.0, 0.0};
  heap.push({dist[source], source});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = true;
    if (u == target) break;
    for (const auto& [v, eid] : base.adj[u]) {
      if (done[v]) continue;
      Key alt{d.first + g.weight[eid],
              d.second + std::abs(base.pos[u] - base.pos[v])};
      if (alt < dist[v]) {
        dist[v] = alt;
        parent[v] = u;
        heap.push({alt, v});
      } else if (alt == dist[v] && parent[v] >= 0 && u < parent[v]) {
        parent[v] = u;
        heap.push({alt, v});
      }
    }
  }
  if (!std::isfinite(dist[target].first))
    throw Unreachable("no path between the requested vertices");
  GraphPath p;
  for (int c = target; c >= 0; c = parent[c]) p.vertices.push_back(c);
  std::reverse(p.vertices.begin(), p.vertices.end());
  return p;
}

}  // namespace rhd
