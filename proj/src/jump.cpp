#include "rhdeform/jump.hpp"

#include <cmath>
#include <utility>

#include <nlohmann/json.hpp>

#include "rhdeform/errors.hpp"
#include "rhdeform/rhp.hpp"

namespace rhd {

ComplexMat identity_mat(int m) { return ComplexMat::Identity(m, m); }

double frobenius_distance_to_identity(const ComplexMat& g) {
  double sum = 0.0;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      Complex e = g(i, j);
      if (i == j) e -= 1.0;
      double a = std::norm(e);
      if (!std::isfinite(a)) return kWeightSentinel;
      sum += a;
    }
  double r = std::sqrt(sum);
  if (!std::isfinite(r)) return kWeightSentinel;
  return r;
}

JumpFunction::JumpFunction(Eval eval, nlohmann::json descriptor, int dim)
    : eval_(std::move(eval)),
      descriptor_(std::make_shared<nlohmann::json>(std::move(descriptor))),
      dim_(dim) {}

const nlohmann::json& JumpFunction::descriptor() const {
  static const nlohmann::json empty = nlohmann::json::object();
  return descriptor_ ? *descriptor_ : empty;
}

bool JumpFunction::is_identity_descriptor() const {
  return descriptor_ && descriptor_->value("op", "") == "identity";
}

JumpFunction JumpFunction::identity(int m) {
  return JumpFunction([m](Complex) { return identity_mat(m); },
                      {{"op", "identity"}, {"m", m}}, m);
}

static nlohmann::json complex_to_json(Complex z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

static Complex complex_from_json(const nlohmann::json& j) {
  return Complex(j.at(0).get<double>(), j.at(1).get<double>());
}

JumpFunction JumpFunction::constant(const ComplexMat& g) {
  nlohmann::json entries = nlohmann::json::array();
  for (int i = 0; i < g.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < g.cols(); ++j) row.push_back(complex_to_json(g(i, j)));
    entries.push_back(row);
  }
  ComplexMat copy = g;
  return JumpFunction([copy](Complex) { return copy; },
                      {{"op", "constant"}, {"entries", entries}},
                      static_cast<int>(g.rows()));
}

JumpFunction JumpFunction::product(std::vector<JumpFunction> factors) {
  if (factors.empty()) throw InvalidInput("product of zero jump functions");
  if (factors.size() == 1) return factors.front();
  nlohmann::json ds = nlohmann::json::array();
  for (const auto& f : factors) ds.push_back(f.descriptor());
  int m = factors.front().dimension();
  auto fs = std::make_shared<std::vector<JumpFunction>>(std::move(factors));
  return JumpFunction(
      [fs](Complex z) {
        ComplexMat g = (*fs)[0](z);
        for (size_t k = 1; k < fs->size(); ++k) g = g * (*fs)[k](z);
        return g;
      },
      {{"op", "product"}, {"factors", ds}}, m);
}

JumpFunction JumpFunction::inverse(JumpFunction base) {
  nlohmann::json d = {{"op", "inverse"}, {"base", base.descriptor()}};
  int m = base.dimension();
  auto b = std::make_shared<JumpFunction>(std::move(base));
  return JumpFunction([b](Complex z) { return ComplexMat((*b)(z).inverse()); },
                      std::move(d), m);
}

JumpFunction JumpFunction::from_descriptor(const nlohmann::json& d) {
  const std::string op = d.at("op").get<std::string>();
  if (op == "identity") return identity(d.value("m", 2));
  if (op == "constant") {
    const auto& entries = d.at("entries");
    int m = static_cast<int>(entries.size());
    ComplexMat g(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) g(i, j) = complex_from_json(entries.at(i).at(j));
    return constant(g);
  }
  if (op == "product") {
    std::vector<JumpFunction> fs;
    for (const auto& fd : d.at("factors")) fs.push_back(from_descriptor(fd));
    return product(std::move(fs));
  }
  if (op == "inverse") return inverse(from_descriptor(d.at("base")));
  if (op == "painleve2_ray") {
    return painleve2_ray_jump(d.at("j").get<int>(), complex_from_json(d.at("s")),
                              d.at("x").get<double>());
  }
  if (op == "factor")
    return make_factor(from_descriptor(d.at("base")), d.at("kind").get<std::string>(),
                       d.at("which").get<std::string>());
  throw InvalidInput("unknown jump descriptor op: " + op);
}

// Pointwise 2x2 factor of a decomposition of `base`. For G = [[a, b], [c, d]]:
//   ldu:  L = [[1, 0], [c/a, 1]],  D = diag(a, det/a),  U = [[1, b/a], [0, 1]]
//   ul:   U = [[1, b/d], [0, 1]],  L = [[det/d, 0], [c, d]]
// The pivot (a or d) must not vanish where the factor is evaluated; the
// factorization menu omits decompositions whose pivot gets small on the grid.
JumpFunction make_factor(JumpFunction base, const std::string& kind,
                         const std::string& which) {
  if (base.dimension() != 2)
    throw InvalidInput("pointwise factorizations are implemented for m = 2");
  nlohmann::json d = {
      {"op", "factor"}, {"kind", kind}, {"which", which}, {"base", base.descriptor()}};
  auto b = std::make_shared<JumpFunction>(std::move(base));
  JumpFunction::Eval eval;
  if (kind == "ldu") {
    if (which == "L")
      eval = [b](Complex z) {
        ComplexMat g = (*b)(z), f = identity_mat(2);
        f(1, 0) = g(1, 0) / g(0, 0);
        return f;
      };
    else if (which == "D")
      eval = [b](Complex z) {
        ComplexMat g = (*b)(z), f = identity_mat(2);
        f(0, 0) = g(0, 0);
        f(1, 1) = g.determinant() / g(0, 0);
        return f;
      };
    else if (which == "U")
      eval = [b](Complex z) {
        ComplexMat g = (*b)(z), f = identity_mat(2);
        f(0, 1) = g(0, 1) / g(0, 0);
        return f;
      };
  } else if (kind == "ul") {
    if (which == "U")
      eval = [b](Complex z) {
        ComplexMat g = (*b)(z), f = identity_mat(2);
        f(0, 1) = g(0, 1) / g(1, 1);
        return f;
      };
    else if (which == "L")
      eval = [b](Complex z) {
        ComplexMat g = (*b)(z), f = identity_mat(2);
        f(0, 0) = g.determinant() / g(1, 1);
        f(1, 0) = g(1, 0);
        f(1, 1) = g(1, 1);
        return f;
      };
  }
  if (!eval) throw InvalidInput("unknown factor kind/which: " + kind + "/" + which);
  return JumpFunction(std::move(eval), std::move(d), 2);
}

}  // namespace rhd
