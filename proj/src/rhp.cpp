#include "rhdeform/rhp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rhdeform/errors.hpp"

namespace rhd {

double Arc::length() const {
  double len = 0.0;
  for (size_t i = 1; i < points.size(); ++i) len += std::abs(points[i] - points[i - 1]);
  return len;
}

Complex Arc::at_arclength(double s) const {
  for (size_t i = 1; i < points.size(); ++i) {
    double seg = std::abs(points[i] - points[i - 1]);
    if (s <= seg || i + 1 == points.size()) {
      if (seg == 0.0) return points[i];
      double t = std::clamp(s / seg, 0.0, 1.0);
      return points[i - 1] + t * (points[i] - points[i - 1]);
    }
    s -= seg;
  }
  return points.back();
}

double Painleve2Params::constraint_residual() const {
  Complex c = s[0] - s[1] + s[2] + s[0] * s[1] * s[2];
  double r = std::abs(c);
  r = std::max(r, std::abs(s[3] + s[0]));
  r = std::max(r, std::abs(s[4] + s[1]));
  r = std::max(r, std::abs(s[5] + s[2]));
  return r;
}

Painleve2Params stokes_complete(Complex s1, Complex s2) {
  Complex denom = 1.0 + s1 * s2;
  if (std::abs(denom) < 1e-12)
    throw SingularStokesData("singular Stokes data: |1 + s1*s2| < 1e-12");
  Complex s3 = (s2 - s1) / denom;
  Painleve2Params p;
  p.s = {s1, s2, s3, -s1, -s2, -s3};
  if (p.constraint_residual() > 1e-14 * std::max(1.0, std::abs(s1) * std::abs(s2)))
    throw SingularStokesData("Stokes constraint residual too large");
  return p;
}

Complex theta(Complex z, double x) {
  const Complex i(0.0, 1.0);
  return (8.0 * i / 3.0) * z * z * z + 2.0 * i * x * z;
}

Complex theta_prime(Complex z, double x) {
  const Complex i(0.0, 1.0);
  return 8.0 * i * z * z + 2.0 * i * x;
}

std::array<Complex, 2> theta_stationary_points(double x) {
  Complex r = std::sqrt(Complex(-x, 0.0)) / 2.0;
  return {r, -r};
}

JumpFunction painleve2_ray_jump(int j, Complex s_j, double x) {
  if (j < 1 || j > 6) throw InvalidInput("Painleve II ray index must be 1..6");
  bool even = (j % 2 == 0);
  auto eval = [even, s_j, x](Complex z) {
    ComplexMat g = identity_mat(2);
    if (even)
      g(0, 1) = s_j * std::exp(-theta(z, x));
    else
      g(1, 0) = s_j * std::exp(theta(z, x));
    return g;
  };
  nlohmann::json d = {{"op", "painleve2_ray"},
                      {"j", j},
                      {"s", {s_j.real(), s_j.imag()}},
                      {"x", x}};
  return JumpFunction(eval, std::move(d), 2);
}

RHProblem painleve2_rhp(const Painleve2Params& params) {
  if (params.constraint_residual() > 1e-12)
    throw InvalidInput("invalid Stokes data for Painleve II");
  RHProblem rhp;
  rhp.dimension = 2;
  const double pi = std::acos(-1.0);
  for (int j = 1; j <= 6; ++j) {
    Arc arc;
    arc.points = {Complex(0.0, 0.0)};
    arc.ray_angle = pi * (2.0 * j - 1.0) / 6.0;
    rhp.parts.push_back({arc, painleve2_ray_jump(j, params.s[j - 1], params.x)});
  }
  return rhp;
}

std::vector<Complex> merge_collinear(const std::vector<Complex>& pts) {
  std::vector<Complex> out;
  for (Complex p : pts) {
    while (out.size() >= 2) {
      Complex u = out.back() - out[out.size() - 2];
      Complex v = p - out.back();
      double cross = u.real() * v.imag() - u.imag() * v.real();
      double dot = u.real() * v.real() + u.imag() * v.imag();
      if (std::abs(cross) <= 1e-14 * std::abs(u) * std::abs(v) && dot > 0.0)
        out.pop_back();
      else
        break;
    }
    if (out.empty() || p != out.back()) out.push_back(p);
  }
  return out;
}

double relative_strength(const RHProblem& rhp, const LocalWeight& w,
                         int quadrature_points_per_segment) {
  if (quadrature_points_per_segment < 2)
    throw InvalidInput("need at least 2 quadrature points per segment");
  double total = 0.0;
  for (const auto& part : rhp.parts) {
    if (part.arc.unbounded())
      throw InvalidInput("relative_strength requires truncated (finite) arcs");
    // The quadrature grid is determined by the geometry alone: collinear
    // breakpoints are merged first, so reparametrizing a polyline does not
    // change the value.
    const std::vector<Complex> pts = merge_collinear(part.arc.points);
    for (size_t i = 1; i < pts.size(); ++i) {
      Complex a = pts[i - 1], b = pts[i];
      double len = std::abs(b - a);
      if (len == 0.0) continue;
      int n = quadrature_points_per_segment;
      double sum = 0.0;
      for (int k = 0; k < n; ++k) {
        double t = static_cast<double>(k) / (n - 1);
        double val = w(part.jump(a + t * (b - a)));
        sum += (k == 0 || k == n - 1) ? 0.5 * val : val;
      }
      total += sum * len / (n - 1);
    }
  }
  return total;
}

nlohmann::json to_json(const RHProblem& rhp) {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& part : rhp.parts) {
    nlohmann::json pts = nlohmann::json::array();
    for (Complex p : part.arc.points)
      pts.push_back(nlohmann::json::array({p.real(), p.imag()}));
    nlohmann::json arc = {{"points", pts}};
    if (part.arc.ray_angle) arc["ray_angle"] = *part.arc.ray_angle;
    parts.push_back({{"arc", arc}, {"jump", part.jump.descriptor()}});
  }
  return {{"dimension", rhp.dimension}, {"parts", parts}};
}

RHProblem rhproblem_from_json(const nlohmann::json& j) {
  RHProblem rhp;
  rhp.dimension = j.at("dimension").get<int>();
  for (const auto& pj : j.at("parts")) {
    RHPart part;
    for (const auto& pt : pj.at("arc").at("points"))
      part.arc.points.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
    if (pj.at("arc").contains("ray_angle"))
      part.arc.ray_angle = pj.at("arc").at("ray_angle").get<double>();
    part.jump = JumpFunction::from_descriptor(pj.at("jump"));
    rhp.parts.push_back(std::move(part));
  }
  return rhp;
}

void save_rhproblem(const RHProblem& rhp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  out << to_json(rhp).dump(2) << "\n";
}

RHProblem load_rhproblem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return rhproblem_from_json(j);
}

}  // namespace rhd
