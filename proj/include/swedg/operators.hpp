#pragma once

#include <vector>

namespace swedg {

// Collocation operators on the Legendre-Gauss-Lobatto nodes of degree N.
// All matrices are dense row-major (N+1)x(N+1); entry (j,k) sits at j*(N+1)+k.
//
// B is the boundary matrix diag(-1, 0, ..., 0, +1). It is never stored, only
// its diagonal is exposed through boundary().
struct SbpOperators {
  int N = 0;
  std::vector<double> nodes;    // xi_0 = -1 < ... < xi_N = +1
  std::vector<double> weights;  // positive quadrature weights, sum to 2
  std::vector<double> D;        // nodal derivative matrix
  std::vector<double> Q;        // Q_jk = w_j * D_jk
  std::vector<double> S;        // S = 2Q - B = Q - Q^T
  std::vector<double> bary;     // barycentric weights of the node set

  int np() const { return N + 1; }
  double d(int j, int k) const { return D[j * (N + 1) + k]; }
  double q(int j, int k) const { return Q[j * (N + 1) + k]; }
  double s(int j, int k) const { return S[j * (N + 1) + k]; }
  double boundary(int j) const { return j == 0 ? -1.0 : (j == N ? 1.0 : 0.0); }
};

// Nodes by Newton iteration on the interior roots of P'_N with
// Chebyshev-Lobatto starting guesses; weights w_j = 2 / (N(N+1) P_N(xi_j)^2).
SbpOperators build_lgl_operators(int N);

// Legendre polynomial P_n and its derivative at a point, by the
// three-term recurrence.
struct LegendreEval {
  double p;
  double dp;
};
LegendreEval legendre(int n, double x);

// Row-major size(pts) x (N+1) matrix evaluating the degree-N interpolant on
// ops.nodes at the given points (barycentric form; exact on the node set).
std::vector<double> interpolation_matrix(const SbpOperators& ops,
                                         const std::vector<double>& pts);

// Evaluate the interpolant of nodal values at one point.
double interpolate(const SbpOperators& ops, const double* values, double x);

// Gauss-Legendre quadrature with n interior points, exact through degree
// 2n-1. Used where the collocation rule would alias, e.g. error norms.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre_rule(int n);

// Discrete Legendre transform: c_k = sum_j w_j P_k(xi_j) u_j / gamma_k with
// the discrete norms gamma_k = sum_j w_j P_k(xi_j)^2, which makes the
// transform the exact inverse of modal evaluation on the node set.
struct ModalTransform {
  int N = 0;
  std::vector<double> to_modal;    // (N+1)x(N+1), c = to_modal * u
  std::vector<double> from_modal;  // (N+1)x(N+1), u = from_modal * c
};
ModalTransform build_modal_transform(const SbpOperators& ops);

}  // namespace swedg
