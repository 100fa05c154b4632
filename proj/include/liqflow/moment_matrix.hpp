#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "liqflow/basis.hpp"
#include "liqflow/errors.hpp"
#include "liqflow/linalg.hpp"

// Gram and function matrices M_ij[f] = <Q_i f Q_j> assembled from moment
// vectors via product linearization, the symmetric-definite generalized
// eigenproblem A psi = lambda B psi, and trace / vector averages.

namespace liqflow {

// ---------------------------------------------------------------------------
// Product linearization  Q_i Q_j = sum_k c^{ij}_k Q_k
// ---------------------------------------------------------------------------

/// Linearization coefficients generated once per (basis, degree) by running
/// the three-term recurrence in coefficient space. Immutable after build.
class LinearizationTable {
 public:
  LinearizationTable(Basis basis, int max_degree) : basis_(basis), max_degree_(max_degree) {
    const std::size_t n = static_cast<std::size_t>(max_degree) + 1;
    c_.resize(n * n);
    for (int j = 0; j <= max_degree; ++j) {
      Vec prev2(static_cast<std::size_t>(j) + 1, 0.0);
      prev2[j] = 1.0;  // Q_0 * Q_j
      at(0, j) = prev2;
      if (max_degree == 0) continue;
      Vec prev1 = multiply_linear(basis, prev2, basis.alpha(1), -basis.delta(1));
      at(1, j) = prev1;
      for (int i = 2; i <= max_degree; ++i) {
        Vec cur = multiply_linear(basis, prev1, basis.alpha(i), -basis.delta(i));
        const double g = basis.gamma(i);
        for (std::size_t m = 0; m < prev2.size(); ++m) cur[m] -= g * prev2[m];
        at(i, j) = cur;
        prev2 = std::move(prev1);
        prev1 = std::move(cur);
      }
    }
  }

  Basis basis() const { return basis_; }
  int max_degree() const { return max_degree_; }

  /// Coefficients of Q_i Q_j (length i + j + 1).
  const Vec& coefficients(int i, int j) const {
    return c_[static_cast<std::size_t>(i) * (max_degree_ + 1) + j];
  }

 private:
  Vec& at(int i, int j) { return c_[static_cast<std::size_t>(i) * (max_degree_ + 1) + j]; }

  Basis basis_;
  int max_degree_;
  std::vector<Vec> c_;
};

/// Shared per-(basis, degree) cache; tables are immutable once built, so
/// handing out references is safe across threads.
inline const LinearizationTable& linearization_table(Basis basis, int max_degree) {
  static std::mutex mu;
  static std::map<std::pair<BasisKind, int>, std::unique_ptr<LinearizationTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{basis.kind(), max_degree}];
  if (!slot) slot = std::make_unique<LinearizationTable>(basis, max_degree);
  return *slot;
}

// ---------------------------------------------------------------------------
// Moment matrices
// ---------------------------------------------------------------------------

/// M_ij = sum_k c^{ij}_k m_k for i, j < dim. Moments must cover order
/// 2 (dim - 1).
inline Matrix build_moment_matrix(Basis basis, std::span<const double> moments,
                                  std::size_t dim) {
  if (moments.size() < 2 * dim - 1)
    throw error("build_moment_matrix: need moments to order " + std::to_string(2 * dim - 2) +
                ", got " + std::to_string(moments.size() - 1));
  const LinearizationTable& table = linearization_table(basis, static_cast<int>(dim) - 1);
  Matrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) {
      const Vec& c = table.coefficients(static_cast<int>(i), static_cast<int>(j));
      double s = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * moments[k];
      m(i, j) = s;
      m(j, i) = s;
    }
  return m;
}

/// Moment vector of (a x + b) f from the moment vector of f:
/// out_k = <Q_k (a x + b) f>. Output is one order shorter.
inline Vec moments_multiply_linear(Basis basis, std::span<const double> m, double a, double b) {
  if (m.size() < 2) throw error("moments_multiply_linear: need at least two moments");
  Vec out(m.size() - 1, 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const int kk = static_cast<int>(k);
    double xm = m[k + 1] + basis.delta(kk + 1) * m[k];
    if (k >= 1) xm += basis.gamma(kk + 1) * m[k - 1];
    xm /= basis.alpha(kk + 1);
    out[k] = a * xm + b * m[k];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generalized eigenproblem  A psi = lambda B psi,  B positive definite
// ---------------------------------------------------------------------------

struct EigSystem {
  Vec values;      // ascending
  Matrix vectors;  // column j: eigenvector with <psi_j | B | psi_j> = 1
};

/// Reduce with the Cholesky factor of B to a standard symmetric problem and
/// run Jacobi iteration; eigenvectors come back B-orthonormal.
inline EigSystem solve_gev(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.rows();
  const Cholesky f = cholesky(b);
  if (!f.ok)
    throw degenerate_error("solve_gev: B is not positive definite (smallest pivot " +
                           std::to_string(f.smallest_pivot) + ")");
  // C = L^-1 A L^-T
  Matrix c(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = a(i, j);
    col = lower_solve(f.lower, col);
    for (std::size_t i = 0; i < n; ++i) c(i, j) = col[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    Vec row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = c(i, j);
    row = lower_solve(f.lower, row);
    for (std::size_t j = 0; j < n; ++j) c(i, j) = row[j];
  }
  // Symmetrize against roundoff before Jacobi.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = 0.5 * (c(i, j) + c(j, i));
      c(i, j) = s;
      c(j, i) = s;
    }
  SymmetricEigen se = jacobi_eigen(std::move(c));
  EigSystem out;
  out.values = std::move(se.values);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = se.vectors(i, j);
    col = lower_transpose_solve(f.lower, col);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = col[i];
  }
  return out;
}

/// |lambda_max - lambda_min| below 1e-10 of the spectral scale: quantities
/// that pick extremal eigenvectors must treat the spectrum as degenerate.
inline bool spectrum_degenerate(const Vec& values) {
  if (values.empty()) return true;
  double amax = 0.0;
  for (double v : values) amax = std::max(amax, std::abs(v));
  return (values.back() - values.front()) < 1e-10 * std::max(amax, 1e-300);
}

// ---------------------------------------------------------------------------
// Trace and vector averages
// ---------------------------------------------------------------------------

/// Spur(G^-1 M[f]) / dim.
inline double trace_average(const Matrix& g, const Matrix& mf) {
  const std::size_t n = g.rows();
  if (mf.rows() != n) throw error("trace_average: dimension mismatch");
  const Cholesky f = cholesky(g);
  if (!f.ok) throw degenerate_error("trace_average: singular Gram matrix");
  double tr = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Vec col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = mf(i, j);
    col = spd_solve(f, col);
    tr += col[j];
  }
  return tr / static_cast<double>(n);
}

/// Spur(G^-1 M[f] G^-1 M[g]) / dim; symmetric in f and g.
inline double trace_product_average(const Matrix& g, const Matrix& mf, const Matrix& mg) {
  const std::size_t n = g.rows();
  if (mf.rows() != n || mg.rows() != n) throw error("trace_product_average: dimension mismatch");
  const Cholesky f = cholesky(g);
  if (!f.ok) throw degenerate_error("trace_product_average: singular Gram matrix");
  Matrix xf(n, n), xg(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec cf(n), cg(n);
    for (std::size_t i = 0; i < n; ++i) {
      cf[i] = mf(i, j);
      cg[i] = mg(i, j);
    }
    cf = spd_solve(f, cf);
    cg = spd_solve(f, cg);
    for (std::size_t i = 0; i < n; ++i) {
      xf(i, j) = cf[i];
      xg(i, j) = cg[i];
    }
  }
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) tr += xf(i, k) * xg(k, i);
  return tr / static_cast<double>(n);
}

/// mf^T G^-1 mg - mf_0 mg_0 / m_0 where m_0 is the measure mass (the
/// normalization reduces to the familiar covariance when <1> = 1).
inline double vector_covariance(std::span<const double> mf, std::span<const double> mg,
                                const Matrix& g, double m0) {
  const std::size_t n = g.rows();
  if (mf.size() < n || mg.size() < n) throw error("vector_covariance: vector too short");
  const Cholesky f = cholesky(g);
  if (!f.ok) throw degenerate_error("vector_covariance: singular Gram matrix");
  const Vec gi_mg = spd_solve(f, std::span<const double>(mg.data(), n));
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += mf[i] * gi_mg[i];
  return s - mf[0] * mg[0] / m0;
}

}  // namespace liqflow
