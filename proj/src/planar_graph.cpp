#include "rhdeform/planar_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "rhdeform/errors.hpp"

namespace rhd {

void PlanarGraph::finalize() {
  if (offset_pos.size() != pos.size()) offset_pos = pos;
  for (auto& e : edges)
    if (e.first > e.second) std::swap(e.first, e.second);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  adj.assign(pos.size(), {});
  for (int id = 0; id < num_edges(); ++id) {
    auto [u, v] = edges[id];
    adj[u].push_back({v, id});
    adj[v].push_back({u, id});
  }
  for (int v = 0; v < num_vertices(); ++v) {
    std::sort(adj[v].begin(), adj[v].end(), [&](const auto& a, const auto& b) {
      double aa = std::arg(pos[a.first] - pos[v]);
      double ab = std::arg(pos[b.first] - pos[v]);
      if (aa != ab) return aa < ab;
      return a.first < b.first;
    });
  }
}

int PlanarGraph::edge_between(int u, int v) const {
  for (const auto& [w, id] : adj[u])
    if (w == v) return id;
  return -1;
}

double PlanarGraph::edge_angle_at(int v, int neighbor) const {
  return std::arg(pos[neighbor] - pos[v]);
}

std::vector<int> PlanarGraph::remove_if(const std::function<bool(Complex)>& forbidden) {
  std::vector<int> remap(pos.size(), -1);
  PlanarGraph out;
  for (int v = 0; v < num_vertices(); ++v) {
    if (forbidden(pos[v])) continue;
    remap[v] = static_cast<int>(out.pos.size());
    out.pos.push_back(pos[v]);
    out.offset_pos.push_back(offset_pos.empty() ? pos[v] : offset_pos[v]);
  }
  for (auto [u, v] : edges)
    if (remap[u] >= 0 && remap[v] >= 0) out.edges.push_back({remap[u], remap[v]});
  out.finalize();
  *this = std::move(out);
  return remap;
}

PlanarGraph build_grid_graph(const Rectangle& rect, int nx, int ny) {
  if (nx < 2 || ny < 2) throw InvalidInput("grid needs nx, ny >= 2");
  if (!(rect.width() > 0) || !(rect.height() > 0))
    throw InvalidInput("grid rectangle is degenerate");
  PlanarGraph g;
  auto lattice = [&](int ix, int iy) { return iy * nx + ix; };
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      g.pos.emplace_back(rect.x_min + rect.width() * ix / (nx - 1),
                         rect.y_min + rect.height() * iy / (ny - 1));
  int center0 = nx * ny;
  auto center = [&](int ix, int iy) { return center0 + iy * (nx - 1) + ix; };
  for (int iy = 0; iy + 1 < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix)
      g.pos.emplace_back(rect.x_min + rect.width() * (ix + 0.5) / (nx - 1),
                         rect.y_min + rect.height() * (iy + 0.5) / (ny - 1));
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      if (ix + 1 < nx) g.edges.push_back({lattice(ix, iy), lattice(ix + 1, iy)});
      if (iy + 1 < ny) g.edges.push_back({lattice(ix, iy), lattice(ix, iy + 1)});
    }
  for (int iy = 0; iy + 1 < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix) {
      int c = center(ix, iy);
      g.edges.push_back({lattice(ix, iy), c});
      g.edges.push_back({lattice(ix + 1, iy), c});
      g.edges.push_back({lattice(ix, iy + 1), c});
      g.edges.push_back({lattice(ix + 1, iy + 1), c});
    }
  g.finalize();
  return g;
}

int nearest_vertex(const PlanarGraph& g, Complex p) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int v = 0; v < g.num_vertices(); ++v) {
    double d = std::abs(g.pos[v] - p);
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  return best;
}

namespace {

// For an unbounded arc: arclength along the ray at which the weight has
// decayed below `threshold` for good (verified by sampling ahead).
double decay_radius(const RHPart& part, const LocalWeight& w, double threshold,
                    double search_radius) {
  Complex anchor = part.arc.points.back();
  Complex dir = std::polar(1.0, *part.arc.ray_angle);
  auto weight_at = [&](double r) { return w(part.jump(anchor + r * dir)); };

  double r = 1e-3;
  while (r <= search_radius) {
    if (weight_at(r) < threshold) {
      bool decays = true;
      double prev = weight_at(r);
      for (int k = 1; k <= 8; ++k) {
        double cur = weight_at(r * (1.0 + 0.5 * k));
        if (cur > threshold || cur > prev * 10.0) {
          decays = false;
          break;
        }
        prev = cur;
      }
      if (decays) return r;
    }
    r *= 1.05;
  }
  throw NoDecay("jump weight on an unbounded arc does not fall below threshold");
}

}  // namespace

Rectangle bounding_rectangle(const RHProblem& rhp, const LocalWeight& w,
                             double threshold, double search_radius) {
  std::vector<Complex> pts;
  for (const auto& part : rhp.parts) {
    for (Complex p : part.arc.points) pts.push_back(p);
    if (part.arc.unbounded()) {
      double r = decay_radius(part, w, threshold, search_radius);
      pts.push_back(part.arc.points.back() + r * std::polar(1.0, *part.arc.ray_angle));
    }
  }
  if (pts.empty()) throw InvalidInput("empty problem");
  Rectangle rect;
  rect.x_min = rect.x_max = pts[0].real();
  rect.y_min = rect.y_max = pts[0].imag();
  for (Complex p : pts) {
    rect.x_min = std::min(rect.x_min, p.real());
    rect.x_max = std::max(rect.x_max, p.real());
    rect.y_min = std::min(rect.y_min, p.imag());
    rect.y_max = std::max(rect.y_max, p.imag());
  }
  // Degenerate extents (e.g. all jumps identically I) get one unit cell.
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

RHProblem truncate_to_rectangle(const RHProblem& rhp, const LocalWeight& w,
                                double threshold, double search_radius) {
  RHProblem out;
  out.dimension = rhp.dimension;
  for (const auto& part : rhp.parts) {
    RHPart p = part;
    if (p.arc.unbounded()) {
      double r = decay_radius(part, w, threshold, search_radius);
      p.arc.points.push_back(p.arc.points.back() + r * std::polar(1.0, *p.arc.ray_angle));
      p.arc.ray_angle.reset();
    }
    out.parts.push_back(std::move(p));
  }
  return out;
}

namespace {

int sign_with_tol(double x, double tol) { return x > tol ? 1 : (x < -tol ? -1 : 0); }

// Proper-intersection test that is robust against the epsilon offsets of
// split copies: near-collinear but separated segments do not count, truly
// overlapping collinear interiors do.
bool segments_cross(Complex a, Complex b, Complex c, Complex d) {
  auto cross = [](Complex u, Complex v) {
    return u.real() * v.imag() - u.imag() * v.real();
  };
  double lab = std::abs(b - a), lcd = std::abs(d - c);
  if (lab == 0.0 || lcd == 0.0) return false;
  double tol_ab = 1e-9 * lab * std::max(std::abs(c - a), std::abs(d - a));
  double tol_cd = 1e-9 * lcd * std::max(std::abs(a - c), std::abs(b - c));
  int s1 = sign_with_tol(cross(b - a, c - a), tol_ab);
  int s2 = sign_with_tol(cross(b - a, d - a), tol_ab);
  int s3 = sign_with_tol(cross(d - c, a - c), tol_cd);
  int s4 = sign_with_tol(cross(d - c, b - c), tol_cd);
  if (s1 != 0 && s2 != 0 && s3 != 0 && s4 != 0) return (s1 != s2) && (s3 != s4);
  // Some endpoint is (almost) on the other segment's line: report a crossing
  // only for genuine interior overlap along the common direction.
  Complex u = (b - a) / lab;
  auto proj = [&](Complex p) {
    return (p - a).real() * u.real() + (p - a).imag() * u.imag();
  };
  if (s1 != 0 || s2 != 0) return false;  // collinear only if both are on the line
  double tc = proj(c), td = proj(d);
  double lo = std::max(std::min(tc, td), 0.0);
  double hi = std::min(std::max(tc, td), lab);
  return hi - lo > 1e-9 * lab;
}

}  // namespace

bool is_planar_embedding(const PlanarGraph& g) {
  for (int e1 = 0; e1 < g.num_edges(); ++e1)
    for (int e2 = e1 + 1; e2 < g.num_edges(); ++e2) {
      auto [a, b] = g.edges[e1];
      auto [c, d] = g.edges[e2];
      if (a == c || a == d || b == c || b == d) continue;
      if (segments_cross(g.offset_pos[a], g.offset_pos[b], g.offset_pos[c],
                         g.offset_pos[d]))
        return false;
    }
  return true;
}

}  // namespace rhd
