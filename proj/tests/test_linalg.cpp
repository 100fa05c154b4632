#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "liqflow/linalg.hpp"

using namespace liqflow;

namespace {

Matrix random_spd(std::size_t n, std::mt19937& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = dist(rng);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += r(k, i) * r(k, j);
      a(i, j) = s + (i == j ? 0.5 : 0.0);
    }
  return a;
}

}  // namespace

TEST_CASE("cholesky factors and solves SPD systems") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const Matrix a = random_spd(n, rng);
    const Cholesky f = cholesky(a);
    REQUIRE(f.ok);
    Vec b(n);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : b) v = dist(rng);
    const Vec x = spd_solve(f, b);
    const Vec ax = mat_vec(a, x);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(ax[i] == Catch::Approx(b[i]).margin(1e-9));
  }
}

TEST_CASE("cholesky rejects indefinite matrices with pivot report") {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = a(1, 0) = 2.0;
  a(1, 1) = 1.0;  // eigenvalues 3, -1
  const Cholesky f = cholesky(a);
  REQUIRE_FALSE(f.ok);
  REQUIRE(f.smallest_pivot < 0.0);
}

TEST_CASE("lu_solve handles indefinite systems") {
  Matrix a(3, 3);
  const double rows[3][3] = {{0.0, 2.0, 1.0}, {1.0, -1.0, 0.0}, {3.0, 0.0, -2.0}};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) a(i, j) = rows[i][j];
  const Vec x = lu_solve(a, {3.0, 0.0, 1.0});
  const Vec ax = mat_vec(a, x);
  REQUIRE(ax[0] == Catch::Approx(3.0).margin(1e-12));
  REQUIRE(ax[1] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(ax[2] == Catch::Approx(1.0).margin(1e-12));
  REQUIRE_THROWS_AS(lu_solve(Matrix(2, 2, 0.0), {1.0, 1.0}), degenerate_error);
}

TEST_CASE("jacobi_eigen recovers known spectrum") {
  Matrix a(2, 2);
  a(0, 0) = 2.0;
  a(0, 1) = a(1, 0) = 1.0;
  a(1, 1) = 2.0;
  const SymmetricEigen e = jacobi_eigen(a);
  REQUIRE(e.values[0] == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(e.values[1] == Catch::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("jacobi_eigen residual and orthonormality on random symmetric matrices") {
  std::mt19937 rng(11);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + trial % 9;
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = dist(rng);
    const SymmetricEigen e = jacobi_eigen(a);
    for (std::size_t k = 0; k < n; ++k) {
      Vec v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = e.vectors(i, k);
      const Vec av = mat_vec(a, v);
      for (std::size_t i = 0; i < n; ++i)
        REQUIRE(av[i] == Catch::Approx(e.values[k] * v[i]).margin(1e-9));
    }
    for (std::size_t k = 0; k + 1 < n; ++k) REQUIRE(e.values[k] <= e.values[k + 1]);
  }
}

TEST_CASE("hessenberg_eigenvalues on companion-style matrices") {
  SECTION("real distinct roots") {
    // Monomial companion of (x - 1)(x - 2)(x - 3) = x^3 - 6x^2 + 11x - 6.
    Matrix c(3, 3);
    c(0, 2) = 6.0;
    c(1, 2) = -11.0;
    c(2, 2) = 6.0;
    c(1, 0) = 1.0;
    c(2, 1) = 1.0;
    auto eig = hessenberg_eigenvalues(c);
    std::sort(eig.begin(), eig.end(),
              [](auto a, auto b) { return a.real() < b.real(); });
    REQUIRE(eig[0].real() == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(eig[1].real() == Catch::Approx(2.0).margin(1e-9));
    REQUIRE(eig[2].real() == Catch::Approx(3.0).margin(1e-9));
    for (const auto& v : eig) REQUIRE(std::abs(v.imag()) < 1e-9);
  }
  SECTION("complex pair") {
    // Companion of x^2 + 1.
    Matrix c(2, 2);
    c(0, 1) = -1.0;
    c(1, 0) = 1.0;
    auto eig = hessenberg_eigenvalues(c);
    REQUIRE(eig.size() == 2);
    REQUIRE(std::abs(eig[0].imag()) == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(eig[0].real() == Catch::Approx(0.0).margin(1e-10));
  }
  SECTION("random real-rooted characteristic polynomials") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t n = 2 + trial % 10;
      Vec roots(n);
      for (double& r : roots) r = dist(rng);
      std::sort(roots.begin(), roots.end());
      // Build monomial coefficients of prod (x - r_i).
      Vec mono{1.0};
      for (double r : roots) {
        Vec next(mono.size() + 1, 0.0);
        for (std::size_t i = 0; i < mono.size(); ++i) {
          next[i + 1] += mono[i];
          next[i] -= r * mono[i];
        }
        mono = std::move(next);
      }
      Matrix c(n, n);
      for (std::size_t i = 0; i < n; ++i) c(i, n - 1) = -mono[i];
      for (std::size_t i = 1; i < n; ++i) c(i, i - 1) = 1.0;
      auto eig = hessenberg_eigenvalues(c);
      REQUIRE(eig.size() == n);
      std::sort(eig.begin(), eig.end(),
                [](auto a, auto b) { return a.real() < b.real(); });
      for (std::size_t i = 0; i < n; ++i) {
        REQUIRE(eig[i].real() == Catch::Approx(roots[i]).margin(2e-6));
        REQUIRE(std::abs(eig[i].imag()) < 2e-6);
      }
    }
  }
}
