#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace rhd {

using Complex = std::complex<double>;
using ComplexMat = Eigen::MatrixXcd;

ComplexMat identity_mat(int m);

/// Frobenius norm of G - I, clamped to the overflow sentinel 1e300 when the
/// evaluation is not finite (the growth of e^theta can exceed double range).
double frobenius_distance_to_identity(const ComplexMat& g);

constexpr double kWeightSentinel = 1e300;

/// Local weight d: GL(m,C) -> [0, inf). The default is d(G) = ||G - I||_F.
struct LocalWeight {
  std::function<double(const ComplexMat&)> d = frobenius_distance_to_identity;
  double operator()(const ComplexMat& g) const { return d(g); }
};

/// A jump function: an entire matrix-valued map z -> G(z) together with a
/// symbolic descriptor so that products and factorizations formed during
/// deformation stay serializable.
class JumpFunction {
 public:
  using Eval = std::function<ComplexMat(Complex)>;

  JumpFunction() = default;
  JumpFunction(Eval eval, nlohmann::json descriptor, int dim);

  ComplexMat operator()(Complex z) const { return eval_(z); }
  int dimension() const { return dim_; }
  const nlohmann::json& descriptor() const;

  static JumpFunction identity(int m);
  static JumpFunction constant(const ComplexMat& g);
  /// Product in composition order: result(z) = factors[0](z) * factors[1](z) * ...
  static JumpFunction product(std::vector<JumpFunction> factors);
  static JumpFunction inverse(JumpFunction base);

  bool is_identity_descriptor() const;

  /// Rebuild the eval closure from a descriptor (inverse of descriptor()).
  static JumpFunction from_descriptor(const nlohmann::json& d);

 private:
  Eval eval_;
  std::shared_ptr<nlohmann::json> descriptor_;
  int dim_ = 2;
};

/// Pointwise factor of a 2x2 decomposition of `base` (kind "ldu" or "ul",
/// which in {"L", "D", "U"}). The factor's pivot entry must stay away from
/// zero where it is evaluated.
JumpFunction make_factor(JumpFunction base, const std::string& kind,
                         const std::string& which);

}  // namespace rhd
