#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "liqflow/rn_estimate.hpp"

using namespace liqflow;

namespace {

Vec trapezoid_moments(Basis basis, int order, double a, double b, auto&& density,
                      int grid = 40001) {
  Vec m(order + 1, 0.0);
  const double h = (b - a) / (grid - 1);
  for (int i = 0; i < grid; ++i) {
    const double x = a + h * i;
    const double w = ((i == 0 || i == grid - 1) ? 0.5 * h : h) * density(x);
    const Vec q = eval_basis_all(basis, order, x);
    for (int k = 0; k <= order; ++k) m[k] += w * q[k];
  }
  return m;
}

}  // namespace

TEST_CASE("least squares interpolation") {
  const Basis basis(BasisKind::ShiftedLegendre);
  Vec mu(13, 0.0);
  mu[0] = 1.0;
  const Matrix g = build_moment_matrix(basis, mu, 5);

  SECTION("reproduces polynomials of degree <= n exactly") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec coeffs(5);
    for (double& c : coeffs) c = u(rng);
    const Vec mf = mat_vec(g, coeffs);  // <Q_k f> for f = sum coeffs Q
    for (double x : {0.0, 0.2, 0.5, 0.9, 1.3}) {
      REQUIRE(least_squares_interp(basis, mf, g, x) ==
              Catch::Approx(eval(basis, coeffs, x)).epsilon(1e-9).margin(1e-9));
    }
  }
  SECTION("constant function") {
    Vec mf(5, 0.0);
    mf[0] = 4.2;
    for (double x : {0.0, 0.7, 2.0})
      REQUIRE(least_squares_interp(basis, mf, g, x) == Catch::Approx(4.2).margin(1e-11));
  }
}

TEST_CASE("christoffel kernel") {
  SECTION("n = 0 on a normalized measure: K == 1") {
    const Basis basis(BasisKind::ShiftedLegendre);
    Vec mu{1.0};
    Matrix g(1, 1);
    g(0, 0) = 1.0;
    REQUIRE(christoffel_kernel(basis, g, 0.3) == Catch::Approx(1.0));
    REQUIRE(christoffel_kernel(basis, g, 5.0) == Catch::Approx(1.0));
  }
  SECTION("K grows monotonically outside the support") {
    const Basis basis(BasisKind::ShiftedLegendre);
    Vec mu(13, 0.0);
    mu[0] = 1.0;
    const Matrix g = build_moment_matrix(basis, mu, 6);
    double prev = christoffel_kernel(basis, g, 1.0);
    for (double x = 1.1; x <= 2.01; x += 0.1) {
      const double k = christoffel_kernel(basis, g, x);
      REQUIRE(k > prev);
      prev = k;
    }
  }
}

TEST_CASE("Radon-Nikodym estimators") {
  const Basis basis(BasisKind::ShiftedLegendre);
  Vec mu(13, 0.0);
  mu[0] = 1.0;
  const Matrix g_mu = build_moment_matrix(basis, mu, 5);

  SECTION("scaled measure: both estimators return the constant everywhere") {
    for (double c : {0.5, 1.0, 3.0}) {
      Vec nu = mu;
      for (double& v : nu) v *= c;
      const Matrix g_nu = build_moment_matrix(basis, nu, 5);
      for (double x : {0.0, 0.25, 0.5, 1.0, 1.5, 10.0}) {
        REQUIRE(rn_ratio(basis, g_mu, g_nu, x) == Catch::Approx(c).margin(1e-9));
        REQUIRE(rn_matrix(basis, g_mu, g_nu, g_mu, x) == Catch::Approx(c).margin(1e-9));
      }
    }
  }
  SECTION("Nevai operator on f = 1 is 1") {
    for (double x : {0.0, 0.4, 1.0, 2.0})
      REQUIRE(rn_matrix(basis, g_mu, g_mu, g_mu, x) == Catch::Approx(1.0).margin(1e-11));
  }
  SECTION("d nu = x d mu at x = 1 against a closed-form small-matrix oracle") {
    const Vec nux = moments_multiply_linear(basis, mu, 1.0, 0.0);
    const Matrix g_nu = build_moment_matrix(basis, nux, 3);
    const Matrix g3 = build_moment_matrix(basis, mu, 3);
    const double estimate = rn_ratio(basis, g3, g_nu, 1.0);
    // Oracle: assemble both 3x3 Gram matrices from dense integration, invert
    // and evaluate the Christoffel ratio directly.
    const Vec mu_o = trapezoid_moments(basis, 6, 0.0, 1.0, [](double) { return 1.0; });
    const Vec nu_o = trapezoid_moments(basis, 6, 0.0, 1.0, [](double x) { return x; });
    const Matrix gm = build_moment_matrix(basis, mu_o, 3);
    const Matrix gn = build_moment_matrix(basis, nu_o, 3);
    const Vec q = eval_basis_all(basis, 2, 1.0);
    const double k_mu = dot(q, spd_solve(gm, q));
    const double k_nu = dot(q, spd_solve(gn, q));
    REQUIRE(estimate == Catch::Approx(k_mu / k_nu).margin(1e-7));
    REQUIRE(estimate > 0.0);
  }
}

TEST_CASE("localized state is normalized") {
  const Basis basis(BasisKind::ShiftedLegendre);
  Vec mu(13, 0.0);
  mu[0] = 1.0;
  const Matrix g = build_moment_matrix(basis, mu, 6);
  const Vec psi0 = localized_state(basis, g, 1.0);
  REQUIRE(quadratic_form(psi0, g, psi0) == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("Runge demonstration") {
  const RungeDemo demo = runge_demo(6);

  SECTION("f(0) = 1 exactly in the table") {
    bool found = false;
    for (const auto& row : demo.rows)
      if (std::abs(row.x) < 1e-9) {
        REQUIRE(row.f == 1.0);
        found = true;
      }
    REQUIRE(found);
  }
  SECTION("least squares value at x = 0 matches a monomial-basis oracle") {
    // Normal equations over monomials: H a = b with H_ij = <x^i x^j>,
    // b_i = <x^i f>, both by dense integration on [-1, 1].
    const int n = 6;
    Matrix h(n + 1, n + 1);
    Vec b(n + 1, 0.0);
    const int grid = 200001;
    const double step = 2.0 / (grid - 1);
    for (int i = 0; i < grid; ++i) {
      const double x = -1.0 + step * i;
      const double w = (i == 0 || i == grid - 1) ? 0.5 * step : step;
      double xi = 1.0;
      for (int a = 0; a <= n; ++a) {
        b[a] += w * xi * runge_function(x);
        double xj = xi * xi;  // x^(a+c) starting at c = a
        for (int c = a; c <= n; ++c) {
          h(a, c) += w * xj;
          xj *= x;
        }
        xi *= x;
      }
    }
    for (int a = 0; a <= n; ++a)
      for (int c = 0; c < a; ++c) h(a, c) = h(c, a);
    const Vec coef = lu_solve(h, b);
    const double oracle_at_0 = coef[0];
    const double ls =
        least_squares_interp(demo.basis, demo.f_moments, demo.gram, 0.0);
    REQUIRE(ls == Catch::Approx(oracle_at_0).margin(1e-6));
  }
  SECTION("bounded oscillation of the RN estimate on the support") {
    for (const auto& row : demo.rows) {
      if (row.x >= -1.0 && row.x <= 1.0) {
        REQUIRE(row.a_rn >= -0.1);
        REQUIRE(row.a_rn <= 1.1);
      }
    }
  }
  SECTION("outside the support the least squares estimate blows up faster") {
    double sup_ls = 0.0, sup_rn = 0.0;
    for (const auto& row : demo.rows) {
      if (row.x >= 1.2) {
        sup_ls = std::max(sup_ls, std::abs(row.a_ls));
        sup_rn = std::max(sup_rn, std::abs(row.a_rn));
      }
    }
    REQUIRE(sup_ls > sup_rn);
  }
}
