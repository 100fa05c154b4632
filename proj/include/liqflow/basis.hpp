#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "liqflow/errors.hpp"
#include "liqflow/linalg.hpp"

// Polynomial families satisfying the three-term recurrence
//
//   Q_k(x) = (alpha_k x - delta_k) Q_{k-1}(x) - gamma_k Q_{k-2}(x),  Q_0 = 1,
//
// together with the coefficient-space operations everything downstream is
// built on: evaluation (Clenshaw), products, argument maps, calculus,
// synthetic division, root finding via the confederate matrix and moment
// accumulation from weighted samples. Polynomials are stored as coefficient
// vectors with respect to Q_k, never as monomials.

namespace liqflow {

enum class BasisKind { Laguerre, Legendre, ShiftedLegendre, Chebyshev, HermiteE };

inline constexpr std::string_view to_string(BasisKind k) {
  switch (k) {
    case BasisKind::Laguerre: return "laguerre";
    case BasisKind::Legendre: return "legendre";
    case BasisKind::ShiftedLegendre: return "shifted-legendre";
    case BasisKind::Chebyshev: return "chebyshev";
    case BasisKind::HermiteE: return "hermite-e";
  }
  return "?";
}

class Basis {
 public:
  constexpr explicit Basis(BasisKind kind) : kind_(kind) {}

  constexpr BasisKind kind() const { return kind_; }

  // Recurrence coefficients for k >= 1. ShiftedLegendre reuses the Legendre
  // table through the fixed argument map x -> 2x - 1 (if Legendre satisfies
  // P_k = (a y - d) P_{k-1} - g P_{k-2} with y = 2x - 1, then the shifted
  // family satisfies Q_k = (2a x - (a + d)) Q_{k-1} - g Q_{k-2}).
  constexpr double alpha(int k) const {
    switch (kind_) {
      case BasisKind::Laguerre: return -1.0 / k;
      case BasisKind::Legendre: return (2.0 * k - 1.0) / k;
      case BasisKind::ShiftedLegendre: return 2.0 * Basis(BasisKind::Legendre).alpha(k);
      case BasisKind::Chebyshev: return k == 1 ? 1.0 : 2.0;
      case BasisKind::HermiteE: return 1.0;
    }
    return 0.0;
  }
  constexpr double delta(int k) const {
    switch (kind_) {
      case BasisKind::Laguerre: return -(2.0 * k - 1.0) / k;
      case BasisKind::Legendre: return 0.0;
      case BasisKind::ShiftedLegendre: {
        const Basis leg(BasisKind::Legendre);
        return leg.alpha(k) + leg.delta(k);
      }
      case BasisKind::Chebyshev: return 0.0;
      case BasisKind::HermiteE: return 0.0;
    }
    return 0.0;
  }
  constexpr double gamma(int k) const {
    switch (kind_) {
      case BasisKind::Laguerre: return (k - 1.0) / k;
      case BasisKind::Legendre: return (k - 1.0) / k;
      case BasisKind::ShiftedLegendre: return Basis(BasisKind::Legendre).gamma(k);
      case BasisKind::Chebyshev: return k == 1 ? 0.0 : 1.0;
      case BasisKind::HermiteE: return k - 1.0;
    }
    return 0.0;
  }

  // Support of the basis's natural measure.
  constexpr double support_min() const {
    switch (kind_) {
      case BasisKind::Laguerre: return 0.0;
      case BasisKind::Legendre: return -1.0;
      case BasisKind::ShiftedLegendre: return 0.0;
      case BasisKind::Chebyshev: return -1.0;
      case BasisKind::HermiteE: return -std::numeric_limits<double>::infinity();
    }
    return 0.0;
  }
  constexpr double support_max() const {
    switch (kind_) {
      case BasisKind::Laguerre: return std::numeric_limits<double>::infinity();
      case BasisKind::Legendre: return 1.0;
      case BasisKind::ShiftedLegendre: return 1.0;
      case BasisKind::Chebyshev: return 1.0;
      case BasisKind::HermiteE: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
  }

  friend constexpr bool operator==(Basis a, Basis b) { return a.kind_ == b.kind_; }
  friend constexpr bool operator!=(Basis a, Basis b) { return a.kind_ != b.kind_; }

 private:
  BasisKind kind_;
};

/// A polynomial sum f_k Q_k(x) in a fixed basis.
struct Poly {
  Basis basis;
  Vec coeffs;  // coeffs[k] multiplies Q_k; empty vector is the zero polynomial

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Drop trailing coefficients below 1e-14 of the largest magnitude.
inline Poly canonicalize(Poly p) {
  double m = 0.0;
  for (double c : p.coeffs) m = std::max(m, std::abs(c));
  const double tol = 1e-14 * m;
  while (!p.coeffs.empty() && std::abs(p.coeffs.back()) <= tol) p.coeffs.pop_back();
  return p;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Clenshaw backward recurrence; no monomial conversion.
inline double eval(Basis basis, std::span<const double> coeffs, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
    const double b = coeffs[k] + (basis.alpha(k + 1) * x - basis.delta(k + 1)) * b1 -
                     basis.gamma(k + 2) * b2;
    b2 = b1;
    b1 = b;
  }
  return b1;
}

inline double eval(const Poly& p, double x) { return eval(p.basis, p.coeffs, x); }

/// Q_0(x) .. Q_order(x) in one forward pass of the recurrence.
inline Vec eval_basis_all(Basis basis, int order, double x) {
  Vec q(order + 1);
  q[0] = 1.0;
  if (order >= 1) q[1] = basis.alpha(1) * x - basis.delta(1);
  for (int k = 2; k <= order; ++k)
    q[k] = (basis.alpha(k) * x - basis.delta(k)) * q[k - 1] - basis.gamma(k) * q[k - 2];
  return q;
}

// ---------------------------------------------------------------------------
// Products and argument maps
// ---------------------------------------------------------------------------

/// Coefficients of (a x + b) * p, using the recurrence identity
/// x Q_k = (Q_{k+1} + delta_{k+1} Q_k + gamma_{k+1} Q_{k-1}) / alpha_{k+1}.
inline Vec multiply_linear(Basis basis, std::span<const double> p, double a, double b) {
  if (p.empty()) return {};
  Vec out(p.size() + 1, 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double c = p[k];
    if (c == 0.0) continue;
    const double inv = 1.0 / basis.alpha(static_cast<int>(k) + 1);
    out[k + 1] += a * c * inv;
    out[k] += a * c * basis.delta(static_cast<int>(k) + 1) * inv + b * c;
    if (k >= 1) out[k - 1] += a * c * basis.gamma(static_cast<int>(k) + 1) * inv;
  }
  return out;
}

/// Product in the shared basis via the three-term recurrence applied in
/// coefficient space; degree(p) + degree(q) == degree(result).
inline Poly multiply(const Poly& p, const Poly& q) {
  if (p.basis != q.basis) throw error("multiply: basis mismatch");
  if (p.coeffs.empty() || q.coeffs.empty()) return Poly{p.basis, {}};
  const Basis basis = p.basis;
  Vec acc(p.coeffs.size() + q.coeffs.size() - 1, 0.0);
  // qk_p holds coefficients of Q_k * p as k walks up q's terms.
  Vec prev2(p.coeffs.begin(), p.coeffs.end());  // Q_0 * p
  for (std::size_t i = 0; i < prev2.size(); ++i) acc[i] += q.coeffs[0] * prev2[i];
  if (q.coeffs.size() == 1) return Poly{basis, std::move(acc)};
  Vec prev1 = multiply_linear(basis, prev2, basis.alpha(1), -basis.delta(1));
  for (std::size_t i = 0; i < prev1.size(); ++i) acc[i] += q.coeffs[1] * prev1[i];
  for (std::size_t k = 2; k < q.coeffs.size(); ++k) {
    Vec cur = multiply_linear(basis, prev1, basis.alpha(static_cast<int>(k)),
                              -basis.delta(static_cast<int>(k)));
    const double g = basis.gamma(static_cast<int>(k));
    for (std::size_t i = 0; i < prev2.size(); ++i) cur[i] -= g * prev2[i];
    for (std::size_t i = 0; i < cur.size(); ++i) acc[i] += q.coeffs[k] * cur[i];
    prev2 = std::move(prev1);
    prev1 = std::move(cur);
  }
  return Poly{basis, std::move(acc)};
}

inline Poly add(const Poly& p, const Poly& q) {
  if (p.basis != q.basis) throw error("add: basis mismatch");
  Poly out{p.basis, Vec(std::max(p.coeffs.size(), q.coeffs.size()), 0.0)};
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) out.coeffs[i] += p.coeffs[i];
  for (std::size_t i = 0; i < q.coeffs.size(); ++i) out.coeffs[i] += q.coeffs[i];
  return out;
}

inline Poly scale(Poly p, double a) {
  for (double& c : p.coeffs) c *= a;
  return p;
}

/// Expansion matrix D with Q_n(a x + b) = sum_j D(n, j) Q_j(x) for every
/// n <= order, produced by running the recurrence in the target basis.
inline Matrix shift_argument(Basis basis, int order, double a, double b) {
  Matrix d(order + 1, order + 1);
  d(0, 0) = 1.0;
  if (order == 0) return d;
  Vec prev2{1.0};
  // Q_1(ax+b) = (alpha_1 (a x + b) - delta_1) Q_0
  Vec prev1 = multiply_linear(basis, prev2, basis.alpha(1) * a, basis.alpha(1) * b - basis.delta(1));
  for (std::size_t j = 0; j < prev1.size(); ++j) d(1, j) = prev1[j];
  for (int n = 2; n <= order; ++n) {
    Vec cur = multiply_linear(basis, prev1, basis.alpha(n) * a, basis.alpha(n) * b - basis.delta(n));
    const double g = basis.gamma(n);
    for (std::size_t j = 0; j < prev2.size(); ++j) cur[j] -= g * prev2[j];
    for (std::size_t j = 0; j < cur.size() && j <= static_cast<std::size_t>(order); ++j)
      d(n, j) = cur[j];
    prev2 = std::move(prev1);
    prev1 = std::move(cur);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Calculus
// ---------------------------------------------------------------------------

/// Coefficient vectors of dQ_k/dx for k = 0..order, from differentiating the
/// recurrence: Q'_k = alpha_k Q_{k-1} + (alpha_k x - delta_k) Q'_{k-1}
///                    - gamma_k Q'_{k-2}.
inline std::vector<Vec> derivative_table(Basis basis, int order) {
  std::vector<Vec> d(order + 1);
  d[0] = {};
  if (order >= 1) d[1] = {basis.alpha(1)};
  for (int k = 2; k <= order; ++k) {
    Vec cur = multiply_linear(basis, d[k - 1], basis.alpha(k), -basis.delta(k));
    cur.resize(std::max<std::size_t>(cur.size(), k), 0.0);
    cur[k - 1] += basis.alpha(k);
    const double g = basis.gamma(k);
    for (std::size_t j = 0; j < d[k - 2].size(); ++j) cur[j] -= g * d[k - 2][j];
    d[k] = std::move(cur);
  }
  return d;
}

inline Poly differentiate(const Poly& p) {
  if (p.coeffs.size() <= 1) return Poly{p.basis, {}};
  const auto table = derivative_table(p.basis, p.degree());
  Vec out(p.coeffs.size() - 1, 0.0);
  for (std::size_t k = 1; k < p.coeffs.size(); ++k)
    for (std::size_t j = 0; j < table[k].size(); ++j) out[j] += p.coeffs[k] * table[k][j];
  return Poly{p.basis, std::move(out)};
}

/// Antiderivative with the integration constant fixed by R(0) = 0.
/// differentiate(integrate(p)) == p.
inline Poly integrate(const Poly& p) {
  if (p.coeffs.empty()) return Poly{p.basis, {}};
  const int n = p.degree();
  const auto table = derivative_table(p.basis, n + 1);
  // Solve sum_j r_j Q'_j = p by back substitution; table[j] has top index j-1.
  Vec r(n + 2, 0.0);
  Vec rhs(p.coeffs.begin(), p.coeffs.end());
  for (int j = n + 1; j >= 1; --j) {
    const double lead = table[j][j - 1];
    const double rj = rhs[j - 1] / lead;
    r[j] = rj;
    if (rj != 0.0)
      for (std::size_t m = 0; m < table[j].size(); ++m) rhs[m] -= rj * table[j][m];
  }
  r[0] = 0.0;
  r[0] = -eval(p.basis, r, 0.0);
  return Poly{p.basis, std::move(r)};
}

// ---------------------------------------------------------------------------
// Synthetic division
// ---------------------------------------------------------------------------

struct DivisionResult {
  Poly quotient;
  Poly remainder;
};

/// p = q * d + r with deg r < deg d. Linear divisors run directly on the
/// three-term recurrence; higher degrees assemble the coefficient-matching
/// linear system over (q, r) and solve it.
inline DivisionResult synthetic_divide(const Poly& p_in, const Poly& d_in) {
  if (p_in.basis != d_in.basis) throw error("synthetic_divide: basis mismatch");
  const Basis basis = p_in.basis;
  const Poly p = canonicalize(p_in);
  const Poly d = canonicalize(d_in);
  if (d.coeffs.empty()) throw degenerate_error("synthetic_divide: zero divisor");
  const int nd = d.degree();
  if (nd < 1) throw error("synthetic_divide: divisor must have degree >= 1");
  const int np = p.degree();
  if (np < nd) return {Poly{basis, {}}, p};

  if (nd == 1) {
    // d = a x + b in monomial terms.
    const double a = d.coeffs[1] * basis.alpha(1);
    const double b = d.coeffs[0] - d.coeffs[1] * basis.delta(1);
    Vec q(np, 0.0);
    // Match coefficients of Q_m in (a x + b) q downward from m = np.
    // (a x + b) q = sum_k q_k [ a (Q_{k+1} + delta_{k+1} Q_k + gamma_{k+1} Q_{k-1}) / alpha_{k+1} + b Q_k ]
    for (int m = np; m >= 1; --m) {
      double acc = p.coeffs[m];
      if (m <= np - 1) acc -= q[m] * (a * basis.delta(m + 1) / basis.alpha(m + 1) + b);
      if (m + 1 <= np - 1) acc -= q[m + 1] * a * basis.gamma(m + 2) / basis.alpha(m + 2);
      q[m - 1] = acc * basis.alpha(m) / a;
    }
    double r0 = p.coeffs[0] - q[0] * (a * basis.delta(1) / basis.alpha(1) + b);
    if (np >= 2) r0 -= q[1] * a * basis.gamma(2) / basis.alpha(2);
    Poly rem{basis, {r0}};
    return {canonicalize(Poly{basis, std::move(q)}), canonicalize(std::move(rem))};
  }

  // General case: unknowns q_0..q_{np-nd}, r_0..r_{nd-1}.
  const int nq = np - nd;
  const std::size_t unknowns = static_cast<std::size_t>(nq + 1 + nd);
  Matrix sys(static_cast<std::size_t>(np + 1), unknowns);
  for (int s = 0; s <= nq; ++s) {
    Vec unit(static_cast<std::size_t>(s) + 1, 0.0);
    unit[s] = 1.0;
    const Poly qs_d = multiply(Poly{basis, std::move(unit)}, d);
    for (std::size_t m = 0; m < qs_d.coeffs.size(); ++m)
      sys(m, static_cast<std::size_t>(s)) = qs_d.coeffs[m];
  }
  for (int t = 0; t < nd; ++t) sys(t, static_cast<std::size_t>(nq + 1 + t)) = 1.0;
  Vec rhs(p.coeffs.begin(), p.coeffs.end());
  const Vec sol = lu_solve(sys, rhs);
  Vec q(sol.begin(), sol.begin() + nq + 1);
  Vec r(sol.begin() + nq + 1, sol.end());
  // Chop solver roundoff in the remainder against the dividend's scale.
  double pscale = 0.0;
  for (double c : p.coeffs) pscale = std::max(pscale, std::abs(c));
  while (!r.empty() && std::abs(r.back()) <= 1e-11 * pscale) r.pop_back();
  return {canonicalize(Poly{basis, std::move(q)}), Poly{basis, std::move(r)}};
}

// ---------------------------------------------------------------------------
// Roots via the confederate (comrade) matrix
// ---------------------------------------------------------------------------

/// Confederate matrix of p: the multiply-by-x operator modulo p in the
/// Q basis; its eigenvalues are the roots of p. The polynomial is taken at
/// face value: a leading coefficient below 1e-12 of the largest coefficient
/// is a degree collapse, not a silent truncation.
inline Matrix confederate_matrix(const Poly& p) {
  const int n = p.degree();
  if (n < 1) throw degenerate_error("confederate_matrix: polynomial degree < 1");
  double m = 0.0;
  for (double c : p.coeffs) m = std::max(m, std::abs(c));
  if (std::abs(p.coeffs[n]) < 1e-12 * m)
    throw degenerate_error("confederate_matrix: leading coefficient collapse");
  const Basis basis = p.basis;
  Matrix c(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double inv = 1.0 / basis.alpha(k + 1);
    const double to_up = inv;                          // coefficient on Q_{k+1}
    const double to_same = basis.delta(k + 1) * inv;   // on Q_k
    const double to_down = basis.gamma(k + 1) * inv;   // on Q_{k-1}
    c(k, k) += to_same;
    if (k >= 1) c(k - 1, k) += to_down;
    if (k + 1 < n) {
      c(k + 1, k) += to_up;
    } else {
      // Q_n == -(1/f_n) sum_j f_j Q_j  (mod p)
      for (int j = 0; j < n; ++j) c(j, k) -= to_up * p.coeffs[j] / p.coeffs[n];
    }
  }
  return c;
}

/// All (possibly complex) roots, sorted by real part then imaginary part.
inline std::vector<std::complex<double>> roots_confederate(const Poly& p) {
  Matrix c = confederate_matrix(p);
  auto roots = hessenberg_eigenvalues(c);
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

// ---------------------------------------------------------------------------
// Moments from weighted samples
// ---------------------------------------------------------------------------

struct Sample {
  double x;
  double w;
};

/// m_k = sum_j Q_k(x_j) w_j for k = 0..order, one recurrence pass per sample.
inline Vec moments_from_sample(Basis basis, std::span<const Sample> samples, int order) {
  Vec m(order + 1, 0.0);
  for (const Sample& s : samples) {
    double q2 = 0.0, q1 = 1.0;
    m[0] += s.w;
    for (int k = 1; k <= order; ++k) {
      const double q = (basis.alpha(k) * s.x - basis.delta(k)) * q1 - basis.gamma(k) * q2;
      m[k] += s.w * q;
      q2 = q1;
      q1 = q;
    }
  }
  return m;
}

}  // namespace liqflow
