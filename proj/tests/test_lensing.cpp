#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "rhdeform/deform.hpp"
#include "rhdeform/errors.hpp"
#include "rhdeform/lensing.hpp"
#include "rhdeform/planar_graph.hpp"
#include "rhdeform/rhp.hpp"
#include "rhdeform/split.hpp"
#include "rhdeform/winding.hpp"

using namespace rhd;

namespace {

JumpFunction nilpotent_jump(std::function<double(Complex)> f) {
  return JumpFunction(
      [f](Complex z) {
        ComplexMat g = identity_mat(2);
        g(0, 1) = f(z);
        return g;
      },
      nlohmann::json{{"op", "opaque"}}, 2);
}

// Exhaustive walk enumeration (bounded length, weight-pruned): the oracle for
// the enclosing-walk construction. Walks from src to dst in the split graph
// whose closed join with the reversed channel winds `sign` around c.
struct EnclosingOracle {
  const PlanarGraph& g;
  const std::vector<double>& w;
  const std::vector<Complex>& channel_rev;
  Complex c;
  int sign;
  int dst;
  int max_edges;
  double best = std::numeric_limits<double>::infinity();

  void dfs(std::vector<int>& walk, double weight) {
    if (weight >= best) return;  // weights are nonnegative
    if (walk.back() == dst) {
      std::vector<Complex> poly;
      for (int v : walk) poly.push_back(g.offset_pos[v]);
      for (Complex p : channel_rev) poly.push_back(p);
      if (std::abs(poly.front() - poly.back()) != 0.0) poly.push_back(poly.front());
      try {
        if (winding_number(poly, c) == sign) best = weight;
      } catch (const OnWalk&) {
      }
      // dst may be an interior stop of a longer enclosing walk: keep going.
    }
    if (static_cast<int>(walk.size()) - 1 >= max_edges) return;
    for (const auto& [v, e] : g.adj[walk.back()]) {
      walk.push_back(v);
      dfs(walk, weight + w[e]);
      walk.pop_back();
    }
  }
};

double brute_force_enclosing(const PlanarGraph& split, const std::vector<double>& w,
                             int src, int dst, const std::vector<Complex>& channel_rev,
                             Complex c, int sign, int max_edges) {
  EnclosingOracle oracle{split, w, channel_rev, c, sign, dst, max_edges};
  std::vector<int> walk{src};
  oracle.dfs(walk, 0.0);
  return oracle.best;
}

}  // namespace

TEST_SUITE("lensing") {

TEST_CASE("factorizations of triangular jumps degenerate to identity factors") {
  // Upper unitriangular: LDU = (I, I, G).
  ComplexMat g = identity_mat(2);
  g(0, 1) = Complex(0.7, -0.2);
  auto menu = factorizations_2x2(JumpFunction::constant(g), {Complex(0, 0), Complex(1, 1)});
  REQUIRE(menu.size() == 2);
  CHECK(menu[0].kind == "ldu");
  Complex z(0.3, 0.4);
  CHECK(frobenius_distance_to_identity(menu[0].factors[0](z)) == 0.0);  // L = I
  CHECK(frobenius_distance_to_identity(menu[0].factors[1](z)) == 0.0);  // D = I
  CHECK((menu[0].factors[2](z) - g).norm() < 1e-15);                    // U = G

  // Lower unitriangular: LDU = (G, I, I).
  ComplexMat h = identity_mat(2);
  h(1, 0) = Complex(-1.5, 0.3);
  auto menu2 = factorizations_2x2(JumpFunction::constant(h), {Complex(0, 0)});
  CHECK((menu2[0].factors[0](z) - h).norm() < 1e-15);
  CHECK(frobenius_distance_to_identity(menu2[0].factors[1](z)) < 1e-14);
  CHECK(frobenius_distance_to_identity(menu2[0].factors[2](z)) < 1e-14);
}

TEST_CASE("factor products reconstruct the jump to 1e-12 at 50 sample points") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // A full 2x2 entire jump with pivots bounded away from zero.
  auto jump = JumpFunction(
      [](Complex z) {
        ComplexMat g(2, 2);
        g(0, 0) = 2.0 + 0.3 * std::sin(z);
        g(0, 1) = 0.5 * z;
        g(1, 0) = Complex(0, 1) * std::cos(z);
        g(1, 1) = 3.0 + 0.25 * z * z;
        return g;
      },
      nlohmann::json{{"op", "opaque"}}, 2);
  std::vector<Complex> probes;
  for (int k = 0; k < 30; ++k) probes.emplace_back(u(rng), u(rng));
  auto menu = factorizations_2x2(jump, probes);
  REQUIRE(menu.size() == 2);
  for (const auto& f : menu) {
    for (int k = 0; k < 50; ++k) {
      Complex z(u(rng), u(rng));
      ComplexMat prod = f.factors[0](z);
      for (size_t i = 1; i < f.factors.size(); ++i) prod = prod * f.factors[i](z);
      ComplexMat expect = jump(z);
      CHECK((prod - expect).norm() / expect.norm() < 1e-12);
    }
    // Geometric order is the reverse of the product order.
    auto geo = f.geometric_order();
    CHECK(geo.size() == f.factors.size());
    Complex z0(0.1, 0.2);
    CHECK((geo.front()(z0) - f.factors.back()(z0)).norm() == 0.0);
  }
}

TEST_CASE("vanishing pivots drop a factorization from the menu") {
  // G11(z) = z vanishes at the origin probe: no LDU.
  auto jump = JumpFunction(
      [](Complex z) {
        ComplexMat g(2, 2);
        g(0, 0) = z;
        g(0, 1) = 1.0;
        g(1, 0) = -1.0;
        g(1, 1) = 1.0;
        return g;
      },
      nlohmann::json{{"op", "opaque"}}, 2);
  auto menu = factorizations_2x2(jump, {Complex(0, 0), Complex(1, 0)});
  REQUIRE(menu.size() == 1);
  CHECK(menu[0].kind == "ul");
}

TEST_CASE("enclosing walk around one box under uniform weights") {
  Rectangle r{0, 2, 0, 2};
  auto g = build_grid_graph(r, 3, 3);
  WeightedPlanarGraph wg;
  wg.base = &g;
  wg.weight.assign(g.num_edges(), 1.0);
  // q = the bottom side of the lower-left box; c = that box's center.
  int v00 = nearest_vertex(g, Complex(0, 0));
  int v10 = nearest_vertex(g, Complex(1, 0));
  GraphPath q{{v00, v10}};
  Complex c(0.5, 0.5);
  auto walk = enclosing_shortest_walk(wg, q, c, -1);
  // Minimal enclosure of the box center left of q: up, over, down (2 lattice
  // edges + ... ) -- weight 4 via the two diagonals or 3 lattice edges? The
  // diagonals pass through the center vertex which costs 2 edges; the lattice
  // detour (0,0)-(0,1)-(1,1)-(1,0) costs 3.
  CHECK(walk.weight == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("enclosing walk equals the exhaustive oracle on random instances") {
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  int trials_done = 0;
  for (int trial = 0; trials_done < 40; ++trial) {
    bool wide = trial % 2 == 0;
    Rectangle r{0, wide ? 3.0 : 2.0, 0, 2};
    auto g = build_grid_graph(r, wide ? 4 : 3, 3);
    WeightedPlanarGraph wg;
    wg.base = &g;
    wg.weight.resize(g.num_edges());
    for (auto& x : wg.weight) x = u(rng);

    // q: a two-edge path through the middle of the grid.
    int a = nearest_vertex(g, Complex(0, 1));
    int b = nearest_vertex(g, Complex(1, 1));
    int c2 = nearest_vertex(g, Complex(2, 1));
    GraphPath q{{a, b, c2}};
    Complex c = g.pos[b];
    int sign = (trial % 4 < 2) ? +1 : -1;

    EnclosingWalk walk;
    try {
      walk = enclosing_shortest_walk(wg, q, c, sign);
    } catch (const NoEnclosingWalk&) {
      continue;
    }
    if (walk.walk.vertices.size() > 13) continue;  // keep the oracle exhaustive

    // Rebuild the split graph exactly as the implementation does, then
    // enumerate all walks of up to 12 edges.
    CutGraph cut = cut_along(g, {q}, {});
    auto weights = transfer_weights(cut, wg.weight);
    auto channel = side_channel(g, q, sign > 0 ? +1 : -1, 2.0 * cut.offset_eps);
    std::vector<Complex> channel_rev(channel.rbegin(), channel.rend());
    channel_rev.erase(channel_rev.begin());
    double oracle =
        brute_force_enclosing(cut.graph, weights, cut.copies[q.front()][0],
                              cut.copies[q.back()][0], channel_rev, c, sign, 12);

    // Same arithmetic on both sides: recompute the walk's weight as a plain
    // left fold over its edges.
    double walk_weight = 0.0;
    for (size_t i = 1; i < walk.walk.vertices.size(); ++i)
      walk_weight +=
          weights[cut.graph.edge_between(walk.walk.vertices[i - 1], walk.walk.vertices[i])];
    CHECK(walk_weight == oracle);
    ++trials_done;
  }
  CHECK(trials_done == 40);
}

TEST_CASE("sign flip equals the reversed-orientation case") {
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Rectangle r{0, 2, 0, 2};
  auto g = build_grid_graph(r, 3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    WeightedPlanarGraph wg;
    wg.base = &g;
    wg.weight.resize(g.num_edges());
    for (auto& x : wg.weight) x = u(rng);
    int a = nearest_vertex(g, Complex(0, 1));
    int b = nearest_vertex(g, Complex(1, 1));
    int c2 = nearest_vertex(g, Complex(2, 1));
    GraphPath q{{a, b, c2}};
    Complex c = g.pos[b];
    auto left = enclosing_shortest_walk(wg, q, c, -1);
    auto flipped = enclosing_shortest_walk(wg, reverse(q), c, +1);
    CHECK(left.weight == doctest::Approx(flipped.weight).epsilon(1e-14));
  }
}

TEST_CASE("all-degenerate factorizations reduce lensing to the baseline") {
  // Two arcs with triangular jumps whose factorizations are (I, I, G)-like.
  RHProblem rhp;
  Arc a0;
  a0.points = {Complex(0, 0), Complex(2, 0.5)};
  rhp.parts.push_back(
      {a0, nilpotent_jump([](Complex z) { return 0.4 + 0.1 * z.real(); })});
  Arc a1;
  a1.points = {Complex(0, 1.5), Complex(2, 1.0)};
  rhp.parts.push_back(
      {a1, nilpotent_jump([](Complex z) { return 0.1 * std::abs(z); })});

  auto baseline = simple_deformation(rhp, 7, 7);
  auto lensed = lensing_deformation(rhp, 7, 7);
  CHECK(lensed.deformation.output_weight <=
        baseline.output_weight * (1 + 1e-12));
}

TEST_CASE("lensing never increases the contour weight on random toy problems") {
  std::mt19937 rng(59);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    RHProblem rhp;
    double s = u(rng);
    Arc a0;
    a0.points = {Complex(0, 0), Complex(2, u(rng) - 0.75)};
    // Full 2x2 jump: nontrivial factorizations.
    double amp = u(rng);
    rhp.parts.push_back({a0, JumpFunction(
                                 [s, amp](Complex z) {
                                   ComplexMat g(2, 2);
                                   g(0, 0) = 1.0 + s;
                                   g(0, 1) = amp * std::exp(-z * z);
                                   g(1, 0) = amp * std::exp(z * z * 0.5);
                                   g(1, 1) = (1.0 + g(0, 1) * g(1, 0)) / g(0, 0);
                                   return g;
                                 },
                                 nlohmann::json{{"op", "opaque"}}, 2)});
    Arc a1;
    a1.points = {Complex(0, 1.5), Complex(2, 1.2)};
    rhp.parts.push_back(
        {a1, nilpotent_jump([amp](Complex z) { return amp * 0.3 * std::abs(z - 1.0); })});

    auto before = simple_deformation(rhp, 7, 7);
    auto lensed = lensing_deformation(before.rhp, 7, 7);
    CHECK(lensed.deformation.output_weight <= before.output_weight * (1 + 1e-12));
  }
}

TEST_CASE("factor order is preserved across the lensed family") {
  // After lensing Painleve II, every shared-normal station along the middle
  // of each family must see the factor polylines in their geometric order.
  auto params = stokes_complete(1.0, 2.0);
  params.x = -10.0;
  auto rhp = truncate_to_rectangle(painleve2_rhp(params), LocalWeight{}, 1e-16);
  auto def = simple_deformation(rhp, 17, 17);
  auto lens = lensing_deformation(def.rhp, 17, 17);
  CHECK(lens.deformation.output_weight <= def.output_weight * (1 + 1e-12));
  // The winning variant's jump reconstructs the dominant part's jump.
  if (lens.chosen_kind != "baseline") {
    auto menu = factorizations_2x2(def.rhp.parts[lens.dominant_part].jump,
                                   {Complex(0.2, 0.1), Complex(-0.4, 0.3)});
    bool found = false;
    for (const auto& f : menu) {
      if (f.kind != lens.chosen_kind) continue;
      found = true;
      std::mt19937 rng(61);
      std::uniform_real_distribution<double> u(-0.5, 0.5);
      for (int k = 0; k < 50; ++k) {
        Complex z(u(rng), u(rng));
        ComplexMat prod = f.factors[0](z);
        for (size_t i = 1; i < f.factors.size(); ++i) prod = prod * f.factors[i](z);
        ComplexMat expect = def.rhp.parts[lens.dominant_part].jump(z);
        CHECK((prod - expect).norm() / std::max(1.0, expect.norm()) < 1e-12);
      }
    }
    CHECK(found);
  }
}

}  // TEST_SUITE

TEST_SUITE("lensing") {

TEST_CASE("case-2 constrained path encloses the anchor on the requested side") {
  // Fixed sibling q straight through the middle; the constrained path for a
  // family member right of it must pass c on the right.
  Rectangle r{0, 4, 0, 2};
  auto g = build_grid_graph(r, 5, 3);
  int a = nearest_vertex(g, Complex(0, 1));
  int m1 = nearest_vertex(g, Complex(1, 1));
  int m2 = nearest_vertex(g, Complex(2, 1));
  int m3 = nearest_vertex(g, Complex(3, 1));
  int b = nearest_vertex(g, Complex(4, 1));
  GraphPath q{{a, m1, m2, m3, b}};

  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  WeightedPlanarGraph wg;
  wg.base = &g;
  wg.weight.resize(g.num_edges());
  for (auto& x : wg.weight) x = u(rng);

  CutGraph cut = cut_along(g, {q}, {});
  auto weights = transfer_weights(cut, wg.weight);
  Complex c = g.pos[m2];
  for (int sign : {+1, -1}) {
    auto channel = side_channel(g, q, sign, 2.0 * cut.offset_eps);
    auto p = constrained_enclosing_path(cut.graph, weights, channel, c, sign,
                                        cut.copies[a][0], cut.copies[b][0]);
    CHECK(p.is_simple());
    // The path's true-position polyline stays on the requested side of q:
    // right of the eastward q means below the line y = 1.
    bool has_off_axis = false;
    for (int v : p.vertices) {
      double y = cut.graph.pos[v].imag();
      if (std::abs(y - 1.0) > 1e-9) {
        has_off_axis = true;
        CHECK((sign > 0 ? y < 1.0 : y > 1.0));
      }
    }
    CHECK(has_off_axis);
  }
}

TEST_CASE("case-3 path stays inside the region between the siblings") {
  Rectangle r{0, 4, 0, 4};
  auto g = build_grid_graph(r, 5, 5);
  int a = nearest_vertex(g, Complex(0, 2));
  int b = nearest_vertex(g, Complex(4, 2));
  // Left sibling arcs above, right sibling below.
  GraphPath upper{{a, nearest_vertex(g, Complex(0.5, 2.5)), nearest_vertex(g, Complex(1, 3)),
                   nearest_vertex(g, Complex(2, 3)), nearest_vertex(g, Complex(3, 3)),
                   nearest_vertex(g, Complex(3.5, 2.5)), b}};
  GraphPath lower{{a, nearest_vertex(g, Complex(0.5, 1.5)), nearest_vertex(g, Complex(1, 1)),
                   nearest_vertex(g, Complex(2, 1)), nearest_vertex(g, Complex(3, 1)),
                   nearest_vertex(g, Complex(3.5, 1.5)), b}};
  for (size_t i = 1; i < upper.vertices.size(); ++i) {
    REQUIRE(g.edge_between(upper.vertices[i - 1], upper.vertices[i]) >= 0);
    REQUIRE(g.edge_between(lower.vertices[i - 1], lower.vertices[i]) >= 0);
  }
  std::mt19937 rng(79);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  WeightedPlanarGraph wg;
  wg.base = &g;
  wg.weight.resize(g.num_edges());
  for (auto& x : wg.weight) x = u(rng);

  CutGraph cut = cut_along(g, {upper, lower}, {});
  auto weights = transfer_weights(cut, wg.weight);
  double delta = 2.0 * cut.offset_eps;
  auto p = path_between_siblings(cut.graph, weights, side_channel(g, upper, -1, delta),
                                 side_channel(g, lower, +1, delta), cut.copies[a][0],
                                 cut.copies[b][0]);
  CHECK(p.is_simple());
  for (int v : p.vertices) {
    double y = cut.graph.pos[v].imag();
    CHECK(y >= 1.0 - 1e-9);
    CHECK(y <= 3.0 + 1e-9);
  }
}

}  // TEST_SUITE
