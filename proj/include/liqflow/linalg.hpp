#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "liqflow/errors.hpp"

// Small dense linear algebra used throughout: Cholesky, LU, a cyclic Jacobi
// eigensolver for symmetric matrices and a Francis QR iteration for the
// (upper Hessenberg) confederate matrices of the root finder. Dimensions in
// this library never exceed a few dozen, so everything is direct and dense.

namespace liqflow {

using Vec = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  Vec& data() { return data_; }
  const Vec& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Vec mat_vec(const Matrix& a, std::span<const double> x) {
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

/// x^T M y for square M.
inline double quadratic_form(std::span<const double> x, const Matrix& m,
                             std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) row += m(i, j) * y[j];
    s += x[i] * row;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Cholesky factorization with a pivot report.
// ---------------------------------------------------------------------------

struct Cholesky {
  Matrix lower;           // L with A = L L^T when ok
  double smallest_pivot;  // min over j of (A_jj - sum L_jk^2) seen during the sweep
  bool ok;
};

/// Factor a symmetric matrix; `ok` is false when the smallest pivot falls at
/// or below rel_tol times the largest diagonal entry (the degeneracy rule
/// used for all positive-definiteness checks in this library).
inline Cholesky cholesky(const Matrix& a, double rel_tol = 1e-12) {
  const std::size_t n = a.rows();
  Cholesky res{Matrix(n, n), std::numeric_limits<double>::infinity(), true};
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  if (n == 0) return res;
  const double floor = rel_tol * std::max(max_diag, std::numeric_limits<double>::min());
  Matrix& l = res.lower;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    res.smallest_pivot = std::min(res.smallest_pivot, d);
    if (!(d > floor)) {
      res.ok = false;
      return res;
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return res;
}

inline Vec lower_solve(const Matrix& l, std::span<const double> b) {
  const std::size_t n = l.rows();
  Vec x(b.begin(), b.begin() + n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

inline Vec lower_transpose_solve(const Matrix& l, std::span<const double> b) {
  const std::size_t n = l.rows();
  Vec x(b.begin(), b.begin() + n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

/// Solve A x = b for symmetric positive definite A via a prepared factor.
inline Vec spd_solve(const Cholesky& f, std::span<const double> b) {
  return lower_transpose_solve(f.lower, lower_solve(f.lower, b));
}

inline Vec spd_solve(const Matrix& a, std::span<const double> b, const char* what = "matrix") {
  const Cholesky f = cholesky(a);
  if (!f.ok)
    throw degenerate_error(std::string(what) + " is not positive definite (smallest pivot " +
                           std::to_string(f.smallest_pivot) + ")");
  return spd_solve(f, b);
}

// ---------------------------------------------------------------------------
// LU with partial pivoting (general square systems, possibly indefinite).
// ---------------------------------------------------------------------------

inline Vec lu_solve(Matrix a, Vec b, double rel_tol = 1e-13) {
  const std::size_t n = a.rows();
  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) throw degenerate_error("singular linear system (zero matrix)");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= rel_tol * scale)
      throw degenerate_error("singular linear system (pivot " + std::to_string(a(piv, k)) + ")");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a(i, k) / a(k, k);
      a(i, k) = m;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
      b[i] -= m * b[k];
    }
  }
  Vec x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
    x[ii] = s / a(ii, ii);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi eigensolver for symmetric matrices.
// ---------------------------------------------------------------------------

struct SymmetricEigen {
  Vec values;      // ascending
  Matrix vectors;  // column j pairs with values[j]; orthonormal
};

inline SymmetricEigen jacobi_eigen(Matrix a, int max_sweeps = 64) {
  const std::size_t n = a.rows();
  Matrix v = Matrix::identity(n);
  auto off_norm = [&a, n]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };
  double diag_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag_scale = std::max(diag_scale, std::abs(a(i, i)));
  diag_scale = std::max(diag_scale, off_norm());
  const double stop = 1e-15 * std::max(diag_scale, std::numeric_limits<double>::min());
  for (int sweep = 0; sweep < max_sweeps && off_norm() > stop; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  SymmetricEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&out](std::size_t i, std::size_t j) { return out.values[i] < out.values[j]; });
  SymmetricEigen sorted;
  sorted.values.resize(n);
  sorted.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    sorted.values[j] = out.values[order[j]];
    for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, j) = v(i, order[j]);
  }
  return sorted;
}

// ---------------------------------------------------------------------------
// Francis double-shift QR for upper Hessenberg matrices; eigenvalues only.
// ---------------------------------------------------------------------------

inline std::vector<std::complex<double>> hessenberg_eigenvalues(Matrix h) {
  const std::size_t n = h.rows();
  std::vector<std::complex<double>> eig;
  eig.reserve(n);
  if (n == 0) return eig;

  auto push_2x2 = [&eig](double a, double b, double c, double d) {
    // eigenvalues of [[a, b], [c, d]]
    const double tr2 = 0.5 * (a + d);
    const double det = a * d - b * c;
    const double disc = tr2 * tr2 - det;
    if (disc >= 0.0) {
      const double r = std::sqrt(disc);
      eig.emplace_back(tr2 + r, 0.0);
      eig.emplace_back(tr2 - r, 0.0);
    } else {
      const double r = std::sqrt(-disc);
      eig.emplace_back(tr2, r);
      eig.emplace_back(tr2, -r);
    }
  };

  std::size_t hi = n - 1;
  int iter_since_deflation = 0;
  const int max_iter = 40 * static_cast<int>(n) + 100;
  int total_iter = 0;

  while (true) {
    // Zero out negligible subdiagonals.
    for (std::size_t i = 1; i <= hi; ++i) {
      const double tiny =
          1e-16 * (std::abs(h(i - 1, i - 1)) + std::abs(h(i, i))) + 1e-300;
      if (std::abs(h(i, i - 1)) <= tiny) h(i, i - 1) = 0.0;
    }
    // Deflate trailing 1x1 / 2x2 blocks.
    if (hi == 0 || h(hi, hi - 1) == 0.0) {
      eig.emplace_back(h(hi, hi), 0.0);
      if (hi == 0) break;
      --hi;
      iter_since_deflation = 0;
      continue;
    }
    if (hi == 1 || h(hi - 1, hi - 2) == 0.0) {
      push_2x2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
      if (hi == 1) break;
      hi -= 2;
      iter_since_deflation = 0;
      continue;
    }
    if (++total_iter > max_iter)
      throw degenerate_error("QR iteration failed to converge");

    // Active block [lo..hi].
    std::size_t lo = hi;
    while (lo > 0 && h(lo, lo - 1) != 0.0) --lo;

    // Francis double shift from the trailing 2x2 (exceptional shift now and
    // then to break cycles).
    double s = h(hi - 1, hi - 1) + h(hi, hi);
    double t = h(hi - 1, hi - 1) * h(hi, hi) - h(hi - 1, hi) * h(hi, hi - 1);
    if (++iter_since_deflation % 16 == 0) {
      const double w = std::abs(h(hi, hi - 1)) + std::abs(h(hi - 1, hi - 2));
      s = 1.5 * w;
      t = w * w;
    }

    double x = h(lo, lo) * h(lo, lo) + h(lo, lo + 1) * h(lo + 1, lo) - s * h(lo, lo) + t;
    double y = h(lo + 1, lo) * (h(lo, lo) + h(lo + 1, lo + 1) - s);
    double z = h(lo + 2, lo + 1) * h(lo + 1, lo);

    for (std::size_t k = lo; k <= hi - 2; ++k) {
      // Householder reflector annihilating (y, z) against x.
      const double scale = std::abs(x) + std::abs(y) + std::abs(z);
      if (scale == 0.0) {
        x = h(k + 1, k);
        y = h(k + 2, k);
        z = (k + 3 <= hi) ? h(k + 3, k) : 0.0;
        continue;
      }
      double xs = x / scale, ys = y / scale, zs = z / scale;
      double alpha = std::sqrt(xs * xs + ys * ys + zs * zs);
      if (xs > 0.0) alpha = -alpha;
      const double v0 = xs - alpha, v1 = ys, v2 = zs;
      const double vnorm2 = v0 * v0 + v1 * v1 + v2 * v2;
      if (vnorm2 > 1e-300) {
        const double beta = 2.0 / vnorm2;
        const std::size_t row_start = (k > lo) ? k - 1 : lo;
        for (std::size_t j = row_start; j <= hi; ++j) {
          double g = v0 * h(k, j) + v1 * h(k + 1, j) + v2 * h(k + 2, j);
          g *= beta;
          h(k, j) -= g * v0;
          h(k + 1, j) -= g * v1;
          h(k + 2, j) -= g * v2;
        }
        const std::size_t col_end = std::min(hi, k + 3);
        for (std::size_t i = lo; i <= col_end; ++i) {
          double g = v0 * h(i, k) + v1 * h(i, k + 1) + v2 * h(i, k + 2);
          g *= beta;
          h(i, k) -= g * v0;
          h(i, k + 1) -= g * v1;
          h(i, k + 2) -= g * v2;
        }
      }
      x = h(k + 1, k);
      y = h(k + 2, k);
      z = (k + 3 <= hi) ? h(k + 3, k) : 0.0;
    }
    // Final 2-element reflector (Givens) on the last column pair.
    {
      const std::size_t k = hi - 1;
      const double scale = std::abs(x) + std::abs(y);
      if (scale > 0.0) {
        double xs = x / scale, ys = y / scale;
        double alpha = std::sqrt(xs * xs + ys * ys);
        if (xs > 0.0) alpha = -alpha;
        const double v0 = xs - alpha, v1 = ys;
        const double vnorm2 = v0 * v0 + v1 * v1;
        if (vnorm2 > 1e-300) {
          const double beta = 2.0 / vnorm2;
          for (std::size_t j = k - 1; j <= hi; ++j) {
            double g = v0 * h(k, j) + v1 * h(k + 1, j);
            g *= beta;
            h(k, j) -= g * v0;
            h(k + 1, j) -= g * v1;
          }
          for (std::size_t i = lo; i <= hi; ++i) {
            double g = v0 * h(i, k) + v1 * h(i, k + 1);
            g *= beta;
            h(i, k) -= g * v0;
            h(i, k + 1) -= g * v1;
          }
        }
      }
    }
  }
  return eig;
}

}  // namespace liqflow
