#pragma once

#include <Eigen/Dense>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rhdeform/cauchy.hpp"
#include "rhdeform/rhp.hpp"

namespace rhd {

/// Discretization of the singular integral equation
///   U(z) - C^- U(z) (G(z) - I) = G(z) - I
/// at Chebyshev-type nodes per straight contour piece. Unknowns are the m
/// components of one row of U per node; the same matrix serves all m rows.
struct CollocationSystem {
  Eigen::MatrixXcd A;              // (N m) x (N m)
  Eigen::MatrixXcd rhs;            // (N m) x m, column r = row r of G - I
  std::vector<ContourPiece> pieces;
  std::vector<int> piece_arc;      // piece index -> arc index
  std::vector<int> node_offset;    // piece index -> first global node
  std::vector<JumpFunction> jumps; // per arc
  int m = 2;
  int total_nodes = 0;

  int dim() const { return total_nodes * m; }
  nlohmann::json diagnostics() const;
};

/// Node budget `n_per_arc` is distributed over an arc's straight pieces in
/// proportion to length, with a minimum per piece.
CollocationSystem assemble(const RHProblem& rhp, int n_per_arc);
CollocationSystem assemble_serial(const RHProblem& rhp, int n_per_arc);

/// Spectral-norm condition number via singular values (SVD for moderate
/// dimensions, power/inverse iteration beyond). Throws SingularMatrix.
double condition_number(const CollocationSystem& sys);
double condition_number_svd(const Eigen::MatrixXcd& a);
double condition_number_estimate(const Eigen::MatrixXcd& a, double tol = 1e-4,
                                 int max_iter = 500);

struct SolverResult {
  Eigen::MatrixXcd samples;   // (N m) x m: samples(j*m + l, r) = U_{r,l}(z_j)
  double kappa = 0;
  double residual = 0;        // ||A X - b|| / ||b||
  ComplexMat residue;         // (1/2 pi i) * contour integral of U
  Complex u;                  // -2 * residue(0, 1)
  int dim = 0;
};

/// Dense solve with iterative refinement; requires kappa < 1e15.
SolverResult solve(const CollocationSystem& sys);

/// Boundary values of Phi = I + C U reconstructed off the contour: evaluates
/// Phi at z from the solved samples (z must not lie on the contour).
ComplexMat evaluate_phi(const CollocationSystem& sys, const SolverResult& res,
                        Complex z);

}  // namespace rhd
