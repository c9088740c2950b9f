#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include <nlohmann/json.hpp>

#include "rhdeform/errors.hpp"
#include "rhdeform/rhp.hpp"

using namespace rhd;

TEST_SUITE("rhp") {

TEST_CASE("stokes_complete fills the six-tuple from (s1, s2)") {
  auto p = stokes_complete(1.0, 2.0);
  CHECK(std::abs(p.s[2] - Complex(1.0 / 3.0)) < 1e-15);
  CHECK(std::abs(p.s[3] - Complex(-1.0)) < 1e-15);
  CHECK(std::abs(p.s[4] - Complex(-2.0)) < 1e-15);
  CHECK(std::abs(p.s[5] - Complex(-1.0 / 3.0)) < 1e-15);
  CHECK(p.constraint_residual() < 1e-14);
}

TEST_CASE("stokes_complete zero data") {
  auto p = stokes_complete(0.0, 0.0);
  for (auto s : p.s) CHECK(std::abs(s) == 0.0);
}

TEST_CASE("stokes_complete rejects the singular case s1 = s2 = i") {
  Complex i(0, 1);
  CHECK_THROWS_AS(stokes_complete(i, i), SingularStokesData);
  CHECK_THROWS_AS(stokes_complete(-i, -i), SingularStokesData);
}

TEST_CASE("stokes constraint residual below 1e-14 for random regular data") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int built = 0;
  while (built < 50) {
    Complex s1(u(rng), u(rng)), s2(u(rng), u(rng));
    if (std::abs(1.0 + s1 * s2) < 1e-2) continue;
    auto p = stokes_complete(s1, s2);
    CHECK(p.constraint_residual() < 1e-14 * std::max(1.0, std::abs(s1 * s2)));
    ++built;
  }
}

TEST_CASE("theta at the origin and its stationary points") {
  CHECK(std::abs(theta(0.0, -10.0)) == 0.0);
  CHECK(std::abs(theta(0.0, 3.5)) == 0.0);

  auto sp = theta_stationary_points(-10.0);
  CHECK(std::abs(sp[0] - Complex(std::sqrt(10.0) / 2.0)) < 1e-14);
  CHECK(std::abs(theta_prime(sp[0], -10.0)) < 1e-13);
  CHECK(std::abs(theta_prime(sp[1], -10.0)) < 1e-13);

  // theta(sqrt(10)/2; x=-10) = -(20 sqrt(10) / 3) i
  Complex expected(0.0, -20.0 * std::sqrt(10.0) / 3.0);
  CHECK(std::abs(theta(sp[0], -10.0) - expected) < 1e-12);
}

TEST_CASE("painleve2_rhp ray directions and parity") {
  auto rhp = painleve2_rhp(stokes_complete(1.0, 2.0));
  REQUIRE(rhp.parts.size() == 6);
  const double pi = std::acos(-1.0);
  // j = 2 is the positive imaginary axis.
  CHECK(*rhp.parts[1].arc.ray_angle == doctest::Approx(pi / 2).epsilon(1e-15));
  for (int j = 1; j <= 6; ++j) {
    CHECK(*rhp.parts[j - 1].arc.ray_angle ==
          doctest::Approx(pi * (2.0 * j - 1.0) / 6.0).epsilon(1e-15));
    // Triangular with unit diagonal.
    ComplexMat g = rhp.parts[j - 1].jump(Complex(0.4, -0.2));
    CHECK(std::abs(g(0, 0) - 1.0) == 0.0);
    CHECK(std::abs(g(1, 1) - 1.0) == 0.0);
    if (j % 2 == 0)
      CHECK(std::abs(g(1, 0)) == 0.0);
    else
      CHECK(std::abs(g(0, 1)) == 0.0);
  }
}

TEST_CASE("painleve2_rhp with zero Stokes data has identity jumps") {
  auto rhp = painleve2_rhp(stokes_complete(0.0, 0.0));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    Complex z(u(rng), u(rng));
    for (const auto& part : rhp.parts)
      CHECK(frobenius_distance_to_identity(part.jump(z)) == 0.0);
  }
}

TEST_CASE("painleve2 jumps have unit determinant on a random cloud") {
  auto rhp = painleve2_rhp(stokes_complete(1.0, 2.0));
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 100; ++k) {
    Complex z(u(rng), u(rng));
    for (const auto& part : rhp.parts) {
      Complex det = part.jump(z).determinant();
      CHECK(std::abs(det - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("painleve2 cyclic product of the six jumps is the identity") {
  auto rhp = painleve2_rhp(stokes_complete(1.0, 2.0));
  Complex z(0.3, 0.1);
  ComplexMat prod = identity_mat(2);
  for (const auto& part : rhp.parts) prod = prod * part.jump(z);
  CHECK(frobenius_distance_to_identity(prod) < 1e-12);
}

TEST_CASE("relative_strength of identity jumps is zero") {
  RHProblem rhp;
  Arc arc;
  arc.points = {Complex(0, 0), Complex(1, 1)};
  rhp.parts.push_back({arc, JumpFunction::identity(2)});
  CHECK(relative_strength(rhp, LocalWeight{}, 16) == 0.0);
}

TEST_CASE("relative_strength of a constant jump is strength times length") {
  ComplexMat g = identity_mat(2);
  g(0, 1) = 3.0;  // ||G - I||_F = 3
  RHProblem rhp;
  Arc arc;
  arc.points = {Complex(0, 0), Complex(2, 0)};
  rhp.parts.push_back({arc, JumpFunction::constant(g)});
  CHECK(relative_strength(rhp, LocalWeight{}, 8) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("relative_strength is invariant under collinear reparametrization") {
  auto params = stokes_complete(1.0, 2.0);
  params.x = -10.0;
  auto jump = painleve2_ray_jump(1, params.s[0], params.x);

  RHProblem a, b;
  Arc arc1;
  arc1.points = {Complex(0, 0), std::polar(2.0, std::acos(-1.0) / 6.0)};
  a.parts.push_back({arc1, jump});
  Arc arc2;
  arc2.points = {arc1.points[0], 0.25 * arc1.points[1], 0.7 * arc1.points[1],
                 arc1.points[1]};
  b.parts.push_back({arc2, jump});

  double wa = relative_strength(a, LocalWeight{}, 64);
  double wb = relative_strength(b, LocalWeight{}, 64);
  CHECK(std::abs(wa - wb) < 1e-12 * std::max(1.0, std::abs(wa)));
}

TEST_CASE("relative_strength self-convergence on the truncated Painleve II contour") {
  auto params = stokes_complete(1.0, 2.0);
  params.x = -10.0;
  auto rhp = painleve2_rhp(params);

  // Truncate rays by hand at radius 3 (beyond the decay radius for x = -10).
  RHProblem finite;
  for (const auto& part : rhp.parts) {
    RHPart p = part;
    p.arc.points.push_back(std::polar(3.0, *p.arc.ray_angle));
    p.arc.ray_angle.reset();
    finite.parts.push_back(p);
  }
  double coarse = relative_strength(finite, LocalWeight{}, 64);
  double fine = relative_strength(finite, LocalWeight{}, 640);
  CHECK(std::abs(coarse - fine) / fine < 1e-3);
}

TEST_CASE("local weight default vanishes at I and is transpose-invariant") {
  LocalWeight w;
  CHECK(w(identity_mat(2)) == 0.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 20; ++k) {
    ComplexMat g(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g(i, j) = Complex(u(rng), u(rng));
    CHECK(w(g) == doctest::Approx(w(g.transpose().eval())).epsilon(1e-14));
    CHECK(w(g) >= 0.0);
  }
}

TEST_CASE("rhproblem json round-trip preserves geometry and jump values") {
  auto params = stokes_complete(1.0, 2.0);
  params.x = -10.0;
  auto rhp = painleve2_rhp(params);
  RHProblem finite;
  for (const auto& part : rhp.parts) {
    RHPart p = part;
    p.arc.points.push_back(std::polar(2.5, *p.arc.ray_angle));
    p.arc.ray_angle.reset();
    finite.parts.push_back(p);
  }
  finite.parts[0].jump = JumpFunction::product(
      {finite.parts[0].jump, finite.parts[1].jump});  // derived jump survives

  auto j = to_json(finite);
  auto back = rhproblem_from_json(j);
  REQUIRE(back.parts.size() == finite.parts.size());
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (size_t i = 0; i < back.parts.size(); ++i) {
    CHECK(back.parts[i].arc.points == finite.parts[i].arc.points);
    for (int k = 0; k < 5; ++k) {
      Complex z(u(rng), u(rng));
      ComplexMat d = back.parts[i].jump(z) - finite.parts[i].jump(z);
      CHECK(d.norm() < 1e-14);
    }
  }
}

}  // TEST_SUITE
