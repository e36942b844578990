#include "swedg/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace swedg {

LegendreEval legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double pm = 1.0, p = x;     // P_{k-1}, P_k
  double dpm = 0.0, dp = 1.0; // their derivatives
  for (int k = 2; k <= n; ++k) {
    double pk = ((2 * k - 1) * x * p - (k - 1) * pm) / k;
    double dpk = dpm + (2 * k - 1) * p;
    pm = p;
    p = pk;
    dpm = dp;
    dp = dpk;
  }
  return {p, dp};
}

SbpOperators build_lgl_operators(int N) {
  if (N < 1) throw std::invalid_argument("build_lgl_operators: degree must be >= 1");
  SbpOperators ops;
  ops.N = N;
  const int np = N + 1;
  ops.nodes.assign(np, 0.0);
  ops.weights.assign(np, 0.0);

  ops.nodes[0] = -1.0;
  ops.nodes[N] = 1.0;
  // Interior nodes are the roots of P'_N. Newton with Chebyshev-Lobatto
  // starting guesses; P''_N comes from the Legendre ODE
  // (1-x^2) P''_N = 2x P'_N - N(N+1) P_N.
  for (int j = 1; j < N; ++j) {
    double x = -std::cos(M_PI * j / N);
    for (int it = 0; it < 50; ++it) {
      LegendreEval e = legendre(N, x);
      double ddp = (2.0 * x * e.dp - N * (N + 1) * e.p) / (1.0 - x * x);
      double dx = e.dp / ddp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    ops.nodes[j] = x;
  }
  // Enforce the exact symmetry of the node set (odd N has no center node).
  for (int j = 0; j < np / 2; ++j) {
    double s = 0.5 * (ops.nodes[np - 1 - j] - ops.nodes[j]);
    ops.nodes[j] = -s;
    ops.nodes[np - 1 - j] = s;
  }
  if (np % 2 == 1) ops.nodes[N / 2] = 0.0;

  for (int j = 0; j < np; ++j) {
    double pn = legendre(N, ops.nodes[j]).p;
    ops.weights[j] = 2.0 / (N * (N + 1) * pn * pn);
  }

  // Barycentric weights, scaled to unit max magnitude for stability.
  ops.bary.assign(np, 1.0);
  for (int j = 0; j < np; ++j) {
    for (int k = 0; k < np; ++k) {
      if (k != j) ops.bary[j] *= (ops.nodes[j] - ops.nodes[k]);
    }
    ops.bary[j] = 1.0 / ops.bary[j];
  }
  double bmax = 0.0;
  for (double b : ops.bary) bmax = std::max(bmax, std::abs(b));
  for (double& b : ops.bary) b /= bmax;

  // Derivative matrix in barycentric form, with the negative-sum trick for
  // the diagonal so each row sums to zero exactly up to rounding.
  ops.D.assign(np * np, 0.0);
  for (int j = 0; j < np; ++j) {
    double diag = 0.0;
    for (int k = 0; k < np; ++k) {
      if (k == j) continue;
      double djk = (ops.bary[k] / ops.bary[j]) / (ops.nodes[j] - ops.nodes[k]);
      ops.D[j * np + k] = djk;
      diag -= djk;
    }
    ops.D[j * np + j] = diag;
  }

  ops.Q.assign(np * np, 0.0);
  for (int j = 0; j < np; ++j)
    for (int k = 0; k < np; ++k) ops.Q[j * np + k] = ops.weights[j] * ops.D[j * np + k];

  ops.S.assign(np * np, 0.0);
  for (int j = 0; j < np; ++j) {
    for (int k = 0; k < np; ++k) {
      double b = (j == k) ? ops.boundary(j) : 0.0;
      ops.S[j * np + k] = 2.0 * ops.Q[j * np + k] - b;
    }
  }
  return ops;
}

QuadratureRule gauss_legendre_rule(int n) {
  if (n < 1) {
    throw std::invalid_argument("gauss_legendre_rule: need at least 1 point");
  }
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < n; ++k) {
    // Chebyshev guess for the k-th root of P_n, refined by Newton.
    double x = std::cos(pi * (k + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const LegendreEval e = legendre(n, x);
      const double dx = e.p / e.dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const LegendreEval e = legendre(n, x);
    r.nodes[n - 1 - k] = x;
    r.weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * e.dp * e.dp);
  }
  return r;
}

std::vector<double> interpolation_matrix(const SbpOperators& ops,
                                         const std::vector<double>& pts) {
  const int np = ops.np();
  std::vector<double> L(pts.size() * np, 0.0);
  for (std::size_t r = 0; r < pts.size(); ++r) {
    double x = pts[r];
    // If x coincides with a node, the row is a Kronecker delta.
    int hit = -1;
    for (int k = 0; k < np; ++k) {
      if (x == ops.nodes[k]) {
        hit = k;
        break;
      }
    }
    if (hit >= 0) {
      L[r * np + hit] = 1.0;
      continue;
    }
    double denom = 0.0;
    for (int k = 0; k < np; ++k) denom += ops.bary[k] / (x - ops.nodes[k]);
    for (int k = 0; k < np; ++k)
      L[r * np + k] = (ops.bary[k] / (x - ops.nodes[k])) / denom;
  }
  return L;
}

double interpolate(const SbpOperators& ops, const double* values, double x) {
  const int np = ops.np();
  for (int k = 0; k < np; ++k) {
    if (x == ops.nodes[k]) return values[k];
  }
  double num = 0.0, den = 0.0;
  for (int k = 0; k < np; ++k) {
    double w = ops.bary[k] / (x - ops.nodes[k]);
    num += w * values[k];
    den += w;
  }
  return num / den;
}

ModalTransform build_modal_transform(const SbpOperators& ops) {
  const int np = ops.np();
  ModalTransform mt;
  mt.N = ops.N;
  mt.from_modal.assign(np * np, 0.0);
  mt.to_modal.assign(np * np, 0.0);
  for (int j = 0; j < np; ++j)
    for (int k = 0; k < np; ++k)
      mt.from_modal[j * np + k] = legendre(k, ops.nodes[j]).p;
  for (int k = 0; k < np; ++k) {
    double gamma = 0.0;
    for (int j = 0; j < np; ++j) {
      double pkj = mt.from_modal[j * np + k];
      gamma += ops.weights[j] * pkj * pkj;
    }
    for (int j = 0; j < np; ++j)
      mt.to_modal[k * np + j] = ops.weights[j] * mt.from_modal[j * np + k] / gamma;
  }
  return mt;
}

}  // namespace swedg
