#include "rhdeform/collocation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "rhdeform/errors.hpp"

namespace rhd {

namespace {

constexpr double kTwoPiI_den = 2.0 * 3.141592653589793238463;

struct PiecePlan {
  std::vector<ContourPiece> pieces;
  std::vector<int> piece_arc;
};

// Every linear piece of every arc polyline gets its own set of n_per_arc
// mapped Chebyshev nodes. Fragmentation of the contour costs collocation
// points, which is what the simplification stage removes.
PiecePlan plan_pieces(const RHProblem& rhp, int n_per_arc) {
  if (n_per_arc < 1) throw InvalidInput("n_per_arc must be positive");
  PiecePlan plan;
  for (size_t i = 0; i < rhp.parts.size(); ++i) {
    const auto& part = rhp.parts[i];
    if (part.arc.unbounded()) throw InvalidInput("assembly requires finite arcs");
    const auto& pts = part.arc.points;
    for (size_t k = 1; k < pts.size(); ++k) {
      if (std::abs(pts[k] - pts[k - 1]) == 0.0) continue;
      plan.pieces.push_back(make_piece(pts[k - 1], pts[k], n_per_arc));
      plan.piece_arc.push_back(static_cast<int>(i));
    }
  }
  return plan;
}

// Interpolation self-check: reconstructing a random sample vector through the
// Legendre coefficient map must reproduce it at the nodes.
void verify_piece(const ContourPiece& piece, int piece_id) {
  const Eigen::MatrixXd& L = legendre_from_values(piece.n);
  std::mt19937 rng(1234 + piece_id);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd sample(piece.n);
  for (int j = 0; j < piece.n; ++j) sample[j] = u(rng);
  Eigen::VectorXd coeff = L * sample;
  for (int j = 0; j < piece.n; ++j) {
    double p0 = 1.0, p1 = piece.t[j], acc = 0.0;
    for (int k = 0; k < piece.n; ++k) {
      double pk = (k == 0) ? p0 : (k == 1 ? p1 : 0.0);
      if (k >= 2) {
        pk = ((2.0 * k - 1.0) * piece.t[j] * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      acc += coeff[k] * pk;
    }
    if (!(std::abs(acc - sample[j]) < 1e-8 * std::max(1.0, sample.cwiseAbs().maxCoeff())))
      throw AssemblyFailure("near-field interpolation self-check failed", piece_id);
  }
}

template <bool Parallel>
CollocationSystem assemble_impl(const RHProblem& rhp, int n_per_arc) {
  CollocationSystem sys;
  sys.m = rhp.dimension;
  auto plan = plan_pieces(rhp, n_per_arc);
  sys.pieces = std::move(plan.pieces);
  sys.piece_arc = std::move(plan.piece_arc);
  for (const auto& part : rhp.parts) sys.jumps.push_back(part.jump);

  sys.node_offset.resize(sys.pieces.size());
  int nodes = 0;
  for (size_t p = 0; p < sys.pieces.size(); ++p) {
    sys.node_offset[p] = nodes;
    nodes += sys.pieces[p].n;
    verify_piece(sys.pieces[p], static_cast<int>(p));
  }
  sys.total_nodes = nodes;
  const int m = sys.m;
  const int dim = nodes * m;
  sys.A = Eigen::MatrixXcd::Zero(dim, dim);
  sys.rhs = Eigen::MatrixXcd::Zero(dim, m);

  const int n_pieces = static_cast<int>(sys.pieces.size());

  // Rows are independent across target nodes: parallel over target pieces.
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (int tp = 0; tp < n_pieces; ++tp) {
    std::vector<Complex> row;
    for (int ti = 0; ti < sys.pieces[tp].n; ++ti) {
      const int i = sys.node_offset[tp] + ti;
      const Complex z = sys.pieces[tp].nodes[ti];
      ComplexMat gmi = sys.jumps[sys.piece_arc[tp]](z) - identity_mat(m);

      for (int r = 0; r < m; ++r)
        for (int k = 0; k < m; ++k) sys.rhs(i * m + k, r) = gmi(r, k);
      for (int k = 0; k < m; ++k) sys.A(i * m + k, i * m + k) = 1.0;

      for (int sp = 0; sp < n_pieces; ++sp) {
        cauchy_row(sys.pieces[sp], z, sp == tp, row);
        for (int sj = 0; sj < sys.pieces[sp].n; ++sj) {
          const int j = sys.node_offset[sp] + sj;
          const Complex c = row[sj];
          if (c == Complex(0, 0)) continue;
          for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) sys.A(i * m + k, j * m + l) -= c * gmi(l, k);
        }
      }
    }
  }
  return sys;
}

}  // namespace

CollocationSystem assemble(const RHProblem& rhp, int n_per_arc) {
  return assemble_impl<true>(rhp, n_per_arc);
}

CollocationSystem assemble_serial(const RHProblem& rhp, int n_per_arc) {
  return assemble_impl<false>(rhp, n_per_arc);
}

nlohmann::json CollocationSystem::diagnostics() const {
  nlohmann::json pieces_json = nlohmann::json::array();
  for (size_t p = 0; p < pieces.size(); ++p)
    pieces_json.push_back({{"arc", piece_arc[p]},
                           {"n", pieces[p].n},
                           {"a", {pieces[p].a.real(), pieces[p].a.imag()}},
                           {"b", {pieces[p].b.real(), pieces[p].b.imag()}}});
  return {{"dimension", dim()}, {"total_nodes", total_nodes}, {"pieces", pieces_json}};
}

double condition_number_svd(const Eigen::MatrixXcd& a) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > 0)) throw SingularMatrix("matrix is numerically singular");
  return smax / smin;
}

double condition_number_estimate(const Eigen::MatrixXcd& a, double tol, int max_iter) {
  const int n = static_cast<int>(a.rows());
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n).normalized();
  double smax = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXcd w = a.adjoint() * (a * v);
    double lam = w.norm();
    v = w / lam;
    double s = std::sqrt(lam);
    if (std::abs(s - smax) <= tol * s) {
      smax = s;
      break;
    }
    smax = s;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  Eigen::VectorXcd u = Eigen::VectorXcd::Ones(n).normalized();
  double smin = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXcd w = lu.solve(lu.adjoint().solve(u));
    double lam = w.norm();
    if (!(lam > 0) || !std::isfinite(lam))
      throw SingularMatrix("inverse iteration diverged");
    u = w / lam;
    double s = 1.0 / std::sqrt(lam);
    if (smin > 0 && std::abs(s - smin) <= tol * s) {
      smin = s;
      break;
    }
    smin = s;
  }
  return smax / smin;
}

double condition_number(const CollocationSystem& sys) {
  if (sys.dim() <= 800) return condition_number_svd(sys.A);
  return condition_number_estimate(sys.A);
}

SolverResult solve(const CollocationSystem& sys) {
  SolverResult out;
  out.dim = sys.dim();
  out.kappa = condition_number(sys);
  if (!(out.kappa < 1e15))
    throw IllConditioned("collocation matrix too ill-conditioned to solve", out.kappa);

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.A);
  Eigen::MatrixXcd x = lu.solve(sys.rhs);
  double bnorm = sys.rhs.norm();
  for (int refine = 0; refine < 3; ++refine) {
    Eigen::MatrixXcd r = sys.rhs - sys.A * x;
    out.residual = bnorm > 0 ? r.norm() / bnorm : 0.0;
    if (out.residual < 1e-13) break;
    x += lu.solve(r);
  }
  {
    Eigen::MatrixXcd r = sys.rhs - sys.A * x;
    out.residual = bnorm > 0 ? r.norm() / bnorm : 0.0;
  }
  out.samples = x;

  const int m = sys.m;
  out.residue = ComplexMat::Zero(m, m);
  std::vector<Complex> intw;
  for (size_t p = 0; p < sys.pieces.size(); ++p) {
    integral_row(sys.pieces[p], intw);
    for (int j = 0; j < sys.pieces[p].n; ++j) {
      int node = sys.node_offset[p] + j;
      for (int r = 0; r < m; ++r)
        for (int l = 0; l < m; ++l)
          out.residue(r, l) += intw[j] * x(node * m + l, r);
    }
  }
  out.residue /= Complex(0.0, kTwoPiI_den);
  out.u = (m == 2) ? Complex(-2.0 * out.residue(0, 1)) : Complex(0, 0);
  return out;
}

ComplexMat evaluate_phi(const CollocationSystem& sys, const SolverResult& res,
                        Complex z) {
  const int m = sys.m;
  ComplexMat phi = identity_mat(m);
  std::vector<Complex> row;
  for (size_t p = 0; p < sys.pieces.size(); ++p) {
    cauchy_row(sys.pieces[p], z, false, row);
    for (int j = 0; j < sys.pieces[p].n; ++j) {
      int node = sys.node_offset[p] + j;
      for (int r = 0; r < m; ++r)
        for (int l = 0; l < m; ++l) phi(r, l) += row[j] * res.samples(node * m + l, r);
    }
  }
  return phi;
}

}  // namespace rhd
