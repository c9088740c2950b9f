#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "rhdeform/jump.hpp"

namespace rhd {

/// One straight piece of the contour with its collocation nodes: Chebyshev
/// points of the first kind (all interior), mapped onto the segment [a, b].
struct ContourPiece {
  Complex a, b;
  int n = 0;                      // number of nodes
  std::vector<Complex> nodes;     // mapped node positions
  std::vector<double> t;          // nodes in [-1, 1]

  Complex to_local(Complex z) const { return (2.0 * z - (a + b)) / (b - a); }
  Complex from_local(Complex s) const { return 0.5 * ((b - a) * s + a + b); }
};

ContourPiece make_piece(Complex a, Complex b, int n);

/// Values-at-nodes -> Legendre coefficients matrix for n Chebyshev nodes
/// (cached per n). Real n x n matrix.
const Eigen::MatrixXd& legendre_from_values(int n);

/// Legendre functions of the second kind Q_0..Q_{n-1} at s (off the cut
/// [-1, 1]). Uses the forward recurrence near the cut and Miller's backward
/// recurrence away from it; the branch is cut exactly on [-1, 1].
void legendre_q(Complex s, int n, std::vector<Complex>& out);

/// Boundary values from the minus side of the cut, Q_k^-(x) for x in (-1, 1).
void legendre_q_minus(double x, int n, std::vector<Complex>& out);

/// Row of Cauchy-transform weights for one piece: w such that
/// (C u)(z) = sum_k w[k] u(nodes[k]) for densities polynomial on the piece.
/// If `minus_side` the boundary limit from the right of a->b is taken
/// (z must then lie on the open segment).
void cauchy_row(const ContourPiece& piece, Complex z, bool minus_side,
                std::vector<Complex>& out);

/// Integral of the interpolant over the piece (for residues):
/// integral = sum_k w[k] u(nodes[k]).
void integral_row(const ContourPiece& piece, std::vector<Complex>& out);

}  // namespace rhd
