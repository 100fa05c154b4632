#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "liqflow/basis.hpp"
#include "liqflow/errors.hpp"
#include "liqflow/linalg.hpp"
#include "liqflow/moment_matrix.hpp"

// Function and density estimators built on moment matrices: least squares
// interpolation, the reproducing kernel K(x, x) (reciprocal Christoffel
// function), two Radon-Nikodym derivative estimators and the localized
// state psi_0. The Radon-Nikodym forms are ratios of two polynomials of
// order 2n: they keep the sign of the estimated density, stay bounded for
// x outside the measure support and tend to a constant at infinity, unlike
// the least squares polynomial.

namespace liqflow {

/// Least squares value Q(x)^T G^-1 mf; exact for polynomials of degree <= n.
inline double least_squares_interp(Basis basis, std::span<const double> mf, const Matrix& g,
                                   double x) {
  const std::size_t n = g.rows();
  const Vec coef = spd_solve(g, std::span<const double>(mf.data(), n), "Gram matrix");
  const Vec q = eval_basis_all(basis, static_cast<int>(n) - 1, x);
  return dot(coef, q);
}

/// Reproducing kernel on the diagonal, K(x, x) = Q(x)^T G^-1 Q(x) > 0.
/// The Christoffel function is 1 / K(x, x); at Gauss nodes it equals the
/// quadrature weight.
inline double christoffel_kernel(Basis basis, const Matrix& g, double x) {
  const std::size_t n = g.rows();
  const Vec q = eval_basis_all(basis, static_cast<int>(n) - 1, x);
  const Vec gi_q = spd_solve(g, q, "Gram matrix");
  return dot(q, gi_q);
}

/// Radon-Nikodym derivative d nu / d mu at x as a Christoffel function
/// ratio K(x, x, mu) / K(x, x, nu). Requires both Gram matrices positive
/// definite.
inline double rn_ratio(Basis basis, const Matrix& g_mu, const Matrix& g_nu, double x) {
  return christoffel_kernel(basis, g_mu, x) / christoffel_kernel(basis, g_nu, x);
}

/// Matrix-form estimator
///   [Q(x)^T G^-1 M_num G^-1 Q(x)] / [Q(x)^T G^-1 M_den G^-1 Q(x)];
/// with M_den = M[1] = G this is the Nevai operator applied to the function
/// behind M_num. Only the pi measure (G) must be positive definite.
inline double rn_matrix(Basis basis, const Matrix& g_pi, const Matrix& m_num,
                        const Matrix& m_den, double x) {
  const std::size_t n = g_pi.rows();
  const Vec q = eval_basis_all(basis, static_cast<int>(n) - 1, x);
  const Vec y = spd_solve(g_pi, q, "Gram matrix");
  const double num = quadratic_form(y, m_num, y);
  const double den = quadratic_form(y, m_den, y);
  if (std::abs(den) < 1e-300) throw degenerate_error("rn_matrix: vanishing denominator");
  return num / den;
}

/// Localized state psi_0(x) = Q(x)^T G^-1 Q(x0) / sqrt(K(x0, x0)),
/// normalized to <psi_0 | M[1] | psi_0> = 1.
inline Vec localized_state(Basis basis, const Matrix& g, double x0) {
  const std::size_t n = g.rows();
  const Vec q0 = eval_basis_all(basis, static_cast<int>(n) - 1, x0);
  Vec psi = spd_solve(g, q0, "Gram matrix");
  const double k = dot(q0, psi);
  if (!(k > 0.0)) throw degenerate_error("localized_state: non-positive kernel value");
  const double inv = 1.0 / std::sqrt(k);
  for (double& c : psi) c *= inv;
  return psi;
}

// ---------------------------------------------------------------------------
// Runge demonstration
// ---------------------------------------------------------------------------

inline double runge_function(double x) { return 1.0 / (1.0 + 25.0 * x * x); }

struct RungeRow {
  double x;
  double f;
  double a_ls;  // least squares approximation
  double a_rn;  // Radon-Nikodym approximation
};

struct RungeDemo {
  Matrix gram;      // <Q_i Q_j> for d mu = dx on [-1, 1]
  Matrix m_f;       // <Q_i f Q_j>
  Vec f_moments;    // <Q_k f>
  Basis basis = Basis(BasisKind::Legendre);
  std::vector<RungeRow> rows;
};

/// Interpolate the Runge function 1 / (1 + 25 x^2) on [-1, 1] with measure
/// d mu = dx at order n and sample both estimators over [-1.5, 1.5].
/// Moments come from a dense trapezoid grid so their error is far below the
/// comparison tolerances.
inline RungeDemo runge_demo(int n, int grid_points = 20001, double sample_step = 0.005) {
  if (n < 2) throw error("runge_demo: n must be >= 2");
  RungeDemo demo;
  const Basis basis = demo.basis;
  const int order = 2 * n;
  Vec mu(order + 1, 0.0), mf(order + 1, 0.0);
  const double h = 2.0 / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i) {
    const double x = -1.0 + h * i;
    const double w = (i == 0 || i == grid_points - 1) ? 0.5 * h : h;
    const Vec q = eval_basis_all(basis, order, x);
    const double f = runge_function(x);
    for (int k = 0; k <= order; ++k) {
      mu[k] += w * q[k];
      mf[k] += w * f * q[k];
    }
  }
  const std::size_t dim = static_cast<std::size_t>(n) + 1;
  demo.gram = build_moment_matrix(basis, mu, dim);
  demo.m_f = build_moment_matrix(basis, mf, dim);
  demo.f_moments.assign(mf.begin(), mf.begin() + dim);

  for (double x = -1.5; x <= 1.5 + 1e-12; x += sample_step) {
    RungeRow row;
    row.x = x;
    row.f = runge_function(x);
    row.a_ls = least_squares_interp(basis, demo.f_moments, demo.gram, x);
    row.a_rn = rn_matrix(basis, demo.gram, demo.m_f, demo.gram, x);
    demo.rows.push_back(row);
  }
  return demo;
}

}  // namespace liqflow
