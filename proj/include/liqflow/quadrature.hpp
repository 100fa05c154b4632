#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "liqflow/basis.hpp"
#include "liqflow/errors.hpp"
#include "liqflow/linalg.hpp"
#include "liqflow/moment_matrix.hpp"

// Quadrature rules recovered from basis moments alone. The Gauss rule comes
// from the generalized eigenproblem M[x] psi = lambda M[1] psi: eigenvalues
// are the nodes and the weights are 1 / psi^(k)(x_k)^2. Radau reattaches a
// fixed support-edge node through the (x - x0) modified measure, Kronrod
// extends a Gauss rule through the Stieltjes polynomial of the signed
// measure P d mu.

namespace liqflow {

struct Quadrature {
  Vec nodes;    // ascending
  Vec weights;  // paired with nodes
};

inline double apply_rule(const Quadrature& q, auto&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * f(q.nodes[i]);
  return s;
}

inline double total_mass(const Quadrature& q) {
  double s = 0.0;
  for (double w : q.weights) s += w;
  return s;
}

/// Gauss rule with `points` nodes from moments of orders 0 .. 2*points - 1.
inline Quadrature gauss(Basis basis, std::span<const double> moments, std::size_t points) {
  if (points == 0) throw error("gauss: need at least one point");
  if (moments.size() < 2 * points)
    throw error("gauss: need " + std::to_string(2 * points) + " moments, got " +
                std::to_string(moments.size()));
  const Vec mx = moments_multiply_linear(basis, moments, 1.0, 0.0);
  const Matrix a = build_moment_matrix(basis, mx, points);
  const Matrix b = build_moment_matrix(basis, moments, points);
  const EigSystem es = solve_gev(a, b);
  Quadrature q;
  q.nodes = es.values;
  q.weights.resize(points);
  for (std::size_t k = 0; k < points; ++k) {
    Vec psi(points);
    for (std::size_t i = 0; i < points; ++i) psi[i] = es.vectors(i, k);
    const double v = eval(basis, psi, q.nodes[k]);
    q.weights[k] = 1.0 / (v * v);
  }
  return q;
}

/// Radau rule with `points` nodes total, one of them fixed at the support
/// edge x0. Solves the Gauss construction on (x - x0) d mu (sign chosen to
/// keep the modified measure positive) and reattaches x0.
inline Quadrature radau(Basis basis, std::span<const double> moments, double x0,
                        std::size_t points) {
  if (points < 2) throw error("radau: need at least two points");
  if (std::isinf(basis.support_min()) && std::isinf(basis.support_max()))
    throw degenerate_error("radau: measure has no finite support edge; "
                           "(x - x0) d mu cannot be positive");
  const std::size_t interior = points - 1;
  if (moments.size() < 2 * interior + 1)
    throw error("radau: insufficient moments");
  Vec sigma = moments_multiply_linear(basis, moments, 1.0, -x0);
  double sign = 1.0;
  if (!cholesky(build_moment_matrix(basis, sigma, interior)).ok) {
    for (double& v : sigma) v = -v;
    sign = -1.0;
    if (!cholesky(build_moment_matrix(basis, sigma, interior)).ok)
      throw degenerate_error("radau: (x - x0) d mu is not positive definite; "
                             "x0 must sit at a support edge");
  }
  const Quadrature inner = gauss(basis, sigma, interior);
  Quadrature q;
  q.nodes.reserve(points);
  q.weights.reserve(points);
  double w_edge = moments[0];
  for (std::size_t k = 0; k < interior; ++k) {
    const double w = inner.weights[k] / (sign * (inner.nodes[k] - x0));
    w_edge -= w;
    q.nodes.push_back(inner.nodes[k]);
    q.weights.push_back(w);
  }
  q.nodes.push_back(x0);
  q.weights.push_back(w_edge);
  // Keep nodes ascending.
  std::vector<std::size_t> order(points);
  for (std::size_t i = 0; i < points; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&q](std::size_t i, std::size_t j) { return q.nodes[i] < q.nodes[j]; });
  Quadrature sorted;
  for (std::size_t i : order) {
    sorted.nodes.push_back(q.nodes[i]);
    sorted.weights.push_back(q.weights[i]);
  }
  return sorted;
}

/// Kronrod extension of the `gauss_points`-point Gauss rule: 2g + 1 nodes
/// exact to degree >= 3g + 1. Needs moments to order 3 * gauss_points + 1.
/// Throws kronrod_infeasible when the extension does not exist (complex
/// stage-2 nodes or negative weights).
inline Quadrature kronrod(Basis basis, std::span<const double> moments,
                          std::size_t gauss_points) {
  const std::size_t g = gauss_points;
  if (g == 0) throw error("kronrod: need at least one Gauss point");
  if (moments.size() < 3 * g + 2)
    throw error("kronrod: need moments to order " + std::to_string(3 * g + 1));
  const Quadrature stage1 = gauss(basis, moments, g);

  // Orthogonal polynomial of the measure with roots at the Gauss nodes.
  Poly p{basis, {1.0}};
  for (double xk : stage1.nodes) p.coeffs = multiply_linear(basis, p.coeffs, 1.0, -xk);

  // Moments of the signed measure d sigma = P d mu.
  const std::size_t sigma_order = 2 * g + 1;
  Vec sigma(sigma_order + 1, 0.0);
  for (std::size_t k = 0; k <= sigma_order; ++k) {
    Vec unit(k + 1, 0.0);
    unit[k] = 1.0;
    const Poly qk_p = multiply(Poly{basis, std::move(unit)}, p);
    double s = 0.0;
    for (std::size_t m = 0; m < qk_p.coeffs.size(); ++m) s += qk_p.coeffs[m] * moments[m];
    sigma[k] = s;
  }

  // Stieltjes polynomial E of degree g + 1: <E Q_i>_sigma = 0 for i <= g.
  const std::size_t dim = g + 1;
  Matrix sys(dim, dim);
  Vec rhs(dim);
  const LinearizationTable& table = linearization_table(basis, static_cast<int>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const Vec& c = table.coefficients(static_cast<int>(i), static_cast<int>(j));
      double s = 0.0;
      for (std::size_t m = 0; m < c.size(); ++m) s += c[m] * sigma[m];
      sys(i, j) = s;
    }
    const Vec& c = table.coefficients(static_cast<int>(i), static_cast<int>(dim));
    double s = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) s += c[m] * sigma[m];
    rhs[i] = -s;
  }
  Vec e_coeffs;
  try {
    e_coeffs = lu_solve(sys, rhs);
  } catch (const degenerate_error&) {
    throw kronrod_infeasible("kronrod: Stieltjes system is singular");
  }
  e_coeffs.push_back(1.0);
  const auto roots = roots_confederate(Poly{basis, e_coeffs});
  Vec new_nodes;
  for (const auto& r : roots) {
    if (std::abs(r.imag()) > 1e-8 * (1.0 + std::abs(r.real())))
      throw kronrod_infeasible("kronrod: complex extension nodes");
    new_nodes.push_back(r.real());
  }

  Vec nodes = stage1.nodes;
  nodes.insert(nodes.end(), new_nodes.begin(), new_nodes.end());
  std::sort(nodes.begin(), nodes.end());

  // Weights from moment matching on the union nodes.
  const std::size_t total = nodes.size();
  Matrix vand(total, total);
  Vec mu_rhs(total);
  for (std::size_t m = 0; m < total; ++m) {
    const Vec q = eval_basis_all(basis, static_cast<int>(total) - 1, nodes[m]);
    for (std::size_t k = 0; k < total; ++k) vand(k, m) = q[k];
  }
  for (std::size_t k = 0; k < total; ++k) mu_rhs[k] = moments[k];
  Vec weights;
  try {
    weights = lu_solve(vand, mu_rhs);
  } catch (const degenerate_error&) {
    throw kronrod_infeasible("kronrod: weight system is singular");
  }
  for (double w : weights)
    if (w < -1e-12 * std::abs(moments[0]))
      throw kronrod_infeasible("kronrod: negative weights");

  return Quadrature{std::move(nodes), std::move(weights)};
}

// ---------------------------------------------------------------------------
// Two-point quadrature skewness
// ---------------------------------------------------------------------------

struct Skewness {
  double gamma;    // (w1 - w2) / (w1 + w2), in [-1, 1]
  double gamma_x;  // (x1 + x2) / 2 - mean, in units of x
  double x1, x2;   // nodes, x1 < x2
  double w1, w2;   // weights, both positive
};

/// Two-point quadrature from raw moments <1>, <x>, <x^2>, <x^3> via the
/// closed forms of the L2 extremal problem for a + b x + x^2.
inline Skewness skewness_from_moments(double m0, double m1, double m2, double m3) {
  if (!(m0 > 0.0)) throw error("skewness: total mass must be positive");
  const double d = m2 * m0 - m1 * m1;
  if (!(d > 1e-300 * std::max(1.0, m2 * m0)))
    throw degenerate_error("skewness: zero variance (point mass)");
  const double a = (m3 * m1 - m2 * m2) / d;
  const double b = (m2 * m1 - m3 * m0) / d;
  const double disc = b * b - 4.0 * a;
  if (!(disc > 0.0)) throw degenerate_error("skewness: moment set is not positive definite");
  const double root = std::sqrt(disc);
  Skewness s;
  s.x1 = 0.5 * (-b - root);
  s.x2 = 0.5 * (-b + root);
  const double mean = m1 / m0;
  s.w1 = m0 * (mean - s.x2) / (s.x1 - s.x2);
  s.w2 = m0 * (s.x1 - mean) / (s.x1 - s.x2);
  s.gamma = (s.w1 - s.w2) / (s.w1 + s.w2);
  s.gamma_x = 0.5 * (s.x1 + s.x2) - mean;
  return s;
}

/// Raw moments <x^j>, j = 0 .. count-1, from basis moments <Q_j>.
inline Vec monomial_moments(Basis basis, std::span<const double> basis_moments,
                            std::size_t count) {
  if (count > basis_moments.size())
    throw error("monomial_moments: insufficient basis moments");
  Vec out(count);
  Vec xj{1.0};  // coefficients of x^j in the Q basis
  for (std::size_t j = 0; j < count; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < xj.size(); ++k) s += xj[k] * basis_moments[k];
    out[j] = s;
    xj = multiply_linear(basis, xj, 1.0, 0.0);
  }
  return out;
}

inline Skewness skewness_from_basis_moments(Basis basis, std::span<const double> moments) {
  const Vec m = monomial_moments(basis, moments, 4);
  return skewness_from_moments(m[0], m[1], m[2], m[3]);
}

}  // namespace liqflow
