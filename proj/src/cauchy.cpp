#include "rhdeform/cauchy.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "rhdeform/errors.hpp"

namespace rhd {

namespace {

constexpr double kPi = 3.141592653589793238463;

std::vector<double> chebyshev_roots(int n) {
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = -std::cos((2.0 * k + 1.0) * kPi / (2.0 * n));
  return t;
}

}  // namespace

ContourPiece make_piece(Complex a, Complex b, int n) {
  if (n < 1) throw InvalidInput("piece needs at least one node");
  ContourPiece p;
  p.a = a;
  p.b = b;
  p.n = n;
  p.t = chebyshev_roots(n);
  p.nodes.reserve(n);
  for (double t : p.t) p.nodes.push_back(p.from_local(Complex(t, 0.0)));
  return p;
}

const Eigen::MatrixXd& legendre_from_values(int n) {
  static std::map<int, Eigen::MatrixXd> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  auto t = chebyshev_roots(n);
  Eigen::MatrixXd vand(n, n);  // vand(j, k) = P_k(t_j)
  for (int j = 0; j < n; ++j) {
    double p0 = 1.0, p1 = t[j];
    for (int k = 0; k < n; ++k) {
      double pk = (k == 0) ? p0 : (k == 1 ? p1 : 0.0);
      if (k >= 2) {
        pk = ((2.0 * k - 1.0) * t[j] * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      vand(j, k) = pk;
    }
  }
  return cache.emplace(n, vand.inverse()).first->second;
}

namespace {

Complex q0_off_cut(Complex s) {
  // 0.5 (log(s+1) - log(s-1)); principal logs put the branch cut on (-1, 1].
  return 0.5 * (std::log(s + 1.0) - std::log(s - 1.0));
}

// |s + sqrt(s^2 - 1)| with the root chosen outside the unit circle.
double bernstein_radius(Complex s) {
  Complex r = std::sqrt(s * s - 1.0);
  double m1 = std::abs(s + r), m2 = std::abs(s - r);
  return std::max(m1, m2);
}

void legendre_q_forward(Complex q0, Complex s, int n, std::vector<Complex>& out) {
  out.resize(n);
  if (n >= 1) out[0] = q0;
  if (n >= 2) out[1] = s * q0 - 1.0;
  for (int k = 1; k + 1 < n; ++k)
    out[k + 1] = ((2.0 * k + 1.0) * s * out[k] - static_cast<double>(k) * out[k - 1]) /
                 (k + 1.0);
}

}  // namespace

void legendre_q(Complex s, int n, std::vector<Complex>& out) {
  double rho = bernstein_radius(s);
  if (rho < 1.1) {
    legendre_q_forward(q0_off_cut(s), s, n, out);
    return;
  }
  // Miller's backward recurrence: Q is the minimal solution off the cut.
  // Values grow like rho^(top-k) on the way down, so rescale as they grow.
  int extra = static_cast<int>(std::ceil(40.0 / std::log(rho))) + 10;
  extra = std::min(extra, 600);
  int top = n + extra;
  std::vector<Complex> tmp(top + 2);
  tmp[top + 1] = 0.0;
  tmp[top] = 1.0;
  for (int k = top; k >= 1; --k) {
    tmp[k - 1] = ((2.0 * k + 1.0) * s * tmp[k] - (k + 1.0) * tmp[k + 1]) /
                 static_cast<double>(k);
    double mag = std::abs(tmp[k - 1]);
    if (mag > 1e250) {
      for (int j = k - 1; j <= top + 1; ++j) tmp[j] /= mag;
    }
  }
  Complex scale = q0_off_cut(s) / tmp[0];
  out.resize(n);
  for (int k = 0; k < n; ++k) out[k] = tmp[k] * scale;
}

void legendre_q_minus(double x, int n, std::vector<Complex>& out) {
  if (!(x > -1.0 && x < 1.0)) throw InvalidInput("minus-side limit needs x in (-1,1)");
  // Limit from below the cut: log(s-1) -> log(1-x) - i pi.
  Complex q0(0.5 * std::log((1.0 + x) / (1.0 - x)), 0.5 * kPi);
  legendre_q_forward(q0, Complex(x, 0.0), n, out);
}

void cauchy_row(const ContourPiece& piece, Complex z, bool minus_side,
                std::vector<Complex>& out) {
  std::vector<Complex> q;
  if (minus_side) {
    Complex s = piece.to_local(z);
    if (std::abs(s.imag()) > 1e-12 || std::abs(s.real()) >= 1.0)
      throw InvalidInput("minus-side limit requested off the piece");
    legendre_q_minus(s.real(), piece.n, q);
  } else {
    legendre_q(piece.to_local(z), piece.n, q);
  }
  // (C u)(z) = (i/pi) sum_k a_k Q_k(s), a = L u.
  const Eigen::MatrixXd& L = legendre_from_values(piece.n);
  out.assign(piece.n, Complex(0, 0));
  const Complex i_over_pi(0.0, 1.0 / kPi);
  for (int k = 0; k < piece.n; ++k) {
    Complex qk = i_over_pi * q[k];
    for (int j = 0; j < piece.n; ++j) out[j] += qk * L(k, j);
  }
}

void integral_row(const ContourPiece& piece, std::vector<Complex>& out) {
  // integral over the piece = (b-a)/2 * integral_{-1}^{1} p(t) dt
  //                         = (b-a) * a_0  with Legendre coefficients a.
  const Eigen::MatrixXd& L = legendre_from_values(piece.n);
  out.assign(piece.n, Complex(0, 0));
  for (int j = 0; j < piece.n; ++j) out[j] = (piece.b - piece.a) * L(0, j);
}

}  // namespace rhd
