#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "liqflow/quadrature.hpp"
#include "liqflow/rn_estimate.hpp"

using namespace liqflow;

namespace {

Vec natural_moments(Basis basis, int order) {
  Vec m(order + 1, 0.0);
  m[0] = basis.kind() == BasisKind::Legendre ? 2.0 : 1.0;
  return m;
}

// Analytic integrals of x^j under the natural measure of each basis
// (Chebyshev and HermiteE measures normalized to unit mass).
double monomial_integral(BasisKind kind, int j) {
  switch (kind) {
    case BasisKind::Legendre:
      return j % 2 == 0 ? 2.0 / (j + 1) : 0.0;
    case BasisKind::ShiftedLegendre:
      return 1.0 / (j + 1);
    case BasisKind::Laguerre: {
      double f = 1.0;
      for (int i = 2; i <= j; ++i) f *= i;
      return f;
    }
    case BasisKind::Chebyshev: {
      if (j % 2 == 1) return 0.0;
      double v = 1.0;
      for (int i = j - 1; i >= 1; i -= 2) v *= static_cast<double>(i) / (i + 1);
      return v;
    }
    case BasisKind::HermiteE: {
      if (j % 2 == 1) return 0.0;
      double v = 1.0;
      for (int i = j - 1; i >= 1; i -= 2) v *= i;
      return v;
    }
  }
  return 0.0;
}

double pow_int(double x, int j) {
  double v = 1.0;
  for (int i = 0; i < j; ++i) v *= x;
  return v;
}

}  // namespace

TEST_CASE("Gauss rule fixtures on the uniform measure") {
  const Basis leg(BasisKind::Legendre);
  SECTION("one point: node 0, weight 2") {
    const Quadrature q = gauss(leg, natural_moments(leg, 1), 1);
    REQUIRE(q.nodes[0] == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(q.weights[0] == Catch::Approx(2.0).margin(1e-12));
  }
  SECTION("two points: nodes +-1/sqrt(3), unit weights") {
    const Quadrature q = gauss(leg, natural_moments(leg, 3), 2);
    REQUIRE(q.nodes[0] == Catch::Approx(-1.0 / std::sqrt(3.0)).margin(1e-10));
    REQUIRE(q.nodes[1] == Catch::Approx(1.0 / std::sqrt(3.0)).margin(1e-10));
    REQUIRE(q.weights[0] == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(q.weights[1] == Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("Gauss exactness to degree 2n+1 for all natural measures") {
  for (BasisKind kind :
       {BasisKind::Laguerre, BasisKind::Legendre, BasisKind::ShiftedLegendre,
        BasisKind::Chebyshev, BasisKind::HermiteE}) {
    const Basis basis(kind);
    for (int n = 0; n <= 6; ++n) {
      const Quadrature q = gauss(basis, natural_moments(basis, 2 * n + 1), n + 1);
      for (int j = 0; j <= 2 * n + 1; ++j) {
        const double approx = apply_rule(q, [j](double x) { return pow_int(x, j); });
        const double exact = monomial_integral(kind, j);
        REQUIRE(approx == Catch::Approx(exact).margin(1e-9 * std::max(1.0, std::abs(exact))));
      }
      double mass = total_mass(q);
      REQUIRE(mass == Catch::Approx(monomial_integral(kind, 0)).margin(1e-10));
      for (double w : q.weights) REQUIRE(w > 0.0);
    }
  }
}

TEST_CASE("Gauss nodes are roots of the next orthogonal polynomial") {
  for (BasisKind kind : {BasisKind::Legendre, BasisKind::ShiftedLegendre,
                         BasisKind::Chebyshev, BasisKind::HermiteE, BasisKind::Laguerre}) {
    const Basis basis(kind);
    const int n = 4;  // 5-point rule, roots of Q_5
    const Quadrature q = gauss(basis, natural_moments(basis, 2 * n + 1), n + 1);
    Vec coeffs(n + 2, 0.0);
    coeffs[n + 1] = 1.0;
    const auto roots = roots_confederate(Poly{basis, coeffs});
    REQUIRE(roots.size() == q.nodes.size());
    for (std::size_t i = 0; i < roots.size(); ++i)
      REQUIRE(roots[i].real() == Catch::Approx(q.nodes[i]).margin(1e-9));
  }
}

TEST_CASE("Christoffel function reciprocal equals Gauss weights at the nodes") {
  for (BasisKind kind : {BasisKind::Legendre, BasisKind::ShiftedLegendre,
                         BasisKind::Chebyshev, BasisKind::HermiteE, BasisKind::Laguerre}) {
    const Basis basis(kind);
    const int n = 5;
    const Vec mu = natural_moments(basis, 2 * n + 1);
    const Quadrature q = gauss(basis, mu, n + 1);
    const Matrix g = build_moment_matrix(basis, mu, n + 1);
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
      const double kxx = christoffel_kernel(basis, g, q.nodes[k]);
      REQUIRE(1.0 / kxx == Catch::Approx(q.weights[k]).margin(1e-9 * q.weights[k] + 1e-12));
    }
  }
}

TEST_CASE("Radau rules") {
  const Basis leg(BasisKind::Legendre);
  SECTION("uniform [-1,1], x0 = -1, two points") {
    const Quadrature q = radau(leg, natural_moments(leg, 3), -1.0, 2);
    REQUIRE(q.nodes[0] == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(q.nodes[1] == Catch::Approx(1.0 / 3.0).margin(1e-10));
    REQUIRE(q.weights[0] == Catch::Approx(0.5).margin(1e-10));
    REQUIRE(q.weights[1] == Catch::Approx(1.5).margin(1e-10));
  }
  SECTION("mass preserved and exactness to degree 2n for edge-supported measures") {
    for (BasisKind kind : {BasisKind::Legendre, BasisKind::ShiftedLegendre,
                           BasisKind::Laguerre, BasisKind::Chebyshev}) {
      const Basis basis(kind);
      const double x0 =
          kind == BasisKind::Laguerre ? 0.0 : basis.support_min();
      for (int pts = 2; pts <= 5; ++pts) {
        const int exact_to = 2 * (pts - 1);
        const Quadrature q = radau(basis, natural_moments(basis, exact_to + 1), x0, pts);
        REQUIRE(total_mass(q) ==
                Catch::Approx(monomial_integral(kind, 0)).margin(1e-10));
        bool has_x0 = false;
        for (double node : q.nodes)
          if (std::abs(node - x0) < 1e-9) has_x0 = true;
        REQUIRE(has_x0);
        for (double w : q.weights) REQUIRE(w > 0.0);
        for (int j = 0; j <= exact_to; ++j) {
          const double approx = apply_rule(q, [j](double x) { return pow_int(x, j); });
          const double exact = monomial_integral(kind, j);
          REQUIRE(approx ==
                  Catch::Approx(exact).margin(1e-10 * std::max(1.0, std::abs(exact))));
        }
      }
    }
  }
  SECTION("interior x0 throws") {
    REQUIRE_THROWS_AS(radau(leg, natural_moments(leg, 5), 0.0, 3), degenerate_error);
  }
  SECTION("HermiteE has no support edge: always throws") {
    const Basis he(BasisKind::HermiteE);
    REQUIRE_THROWS_AS(radau(he, natural_moments(he, 5), 0.0, 3), degenerate_error);
    REQUIRE_THROWS_AS(radau(he, natural_moments(he, 5), -10.0, 3), degenerate_error);
  }
}

TEST_CASE("Kronrod extension") {
  const Basis leg(BasisKind::Legendre);
  SECTION("extending the 1-point uniform Gauss reproduces the 3-point rule") {
    const Quadrature q = kronrod(leg, natural_moments(leg, 5), 1);
    REQUIRE(q.nodes.size() == 3);
    REQUIRE(q.nodes[0] == Catch::Approx(-std::sqrt(0.6)).margin(1e-9));
    REQUIRE(q.nodes[1] == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(q.nodes[2] == Catch::Approx(std::sqrt(0.6)).margin(1e-9));
    REQUIRE(q.weights[0] == Catch::Approx(5.0 / 9.0).margin(1e-9));
    REQUIRE(q.weights[1] == Catch::Approx(8.0 / 9.0).margin(1e-9));
    REQUIRE(q.weights[2] == Catch::Approx(5.0 / 9.0).margin(1e-9));
    REQUIRE(total_mass(q) == Catch::Approx(2.0).margin(1e-10));
  }
  SECTION("exactness beyond 3g+1 for uniform and shifted Legendre measures") {
    for (BasisKind kind : {BasisKind::Legendre, BasisKind::ShiftedLegendre}) {
      const Basis basis(kind);
      for (std::size_t g : {2u, 3u}) {
        const Quadrature q = kronrod(basis, natural_moments(basis, 3 * g + 1), g);
        REQUIRE(q.nodes.size() == 2 * g + 1);
        for (std::size_t j = 0; j <= 3 * g + 1; ++j) {
          const double approx =
              apply_rule(q, [j](double x) { return pow_int(x, static_cast<int>(j)); });
          const double exact = monomial_integral(kind, static_cast<int>(j));
          REQUIRE(approx ==
                  Catch::Approx(exact).margin(1e-8 * std::max(1.0, std::abs(exact))));
        }
      }
    }
  }
}

TEST_CASE("two-point quadrature skewness") {
  SECTION("symmetric measures give zero") {
    // Uniform on [-1, 1]: <1>=2, <x>=0, <x^2>=2/3, <x^3>=0
    const Skewness s = skewness_from_moments(2.0, 0.0, 2.0 / 3.0, 0.0);
    REQUIRE(s.gamma == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(s.gamma_x == Catch::Approx(0.0).margin(1e-12));
    // Standard normal moments: 1, 0, 1, 0
    const Skewness sn = skewness_from_moments(1.0, 0.0, 1.0, 0.0);
    REQUIRE(sn.gamma == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("two-point discrete measure recovered exactly") {
    // {x=0, w=0.75}, {x=1, w=0.25}
    const Skewness s = skewness_from_moments(1.0, 0.25, 0.25, 0.25);
    REQUIRE(s.x1 == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(s.x2 == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(s.w1 == Catch::Approx(0.75).margin(1e-12));
    REQUIRE(s.w2 == Catch::Approx(0.25).margin(1e-12));
    REQUIRE(s.gamma == Catch::Approx(0.5).margin(1e-12));
  }
  SECTION("chi-squared with k = 100 tracks half the classical skewness") {
    const double k = 100.0;
    const Skewness s =
        skewness_from_moments(1.0, k, k * (k + 2.0), k * (k + 2.0) * (k + 4.0));
    const double reference = 0.5 * std::sqrt(8.0 / k);
    REQUIRE(std::abs(s.gamma - reference) < 0.10 * reference);
  }
  SECTION("gamma stays in [-1, 1] for random discrete measures") {
    std::mt19937 rng(97);
    std::uniform_real_distribution<double> ux(-3.0, 3.0);
    std::uniform_real_distribution<double> uw(0.05, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
      double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
      for (int pt = 0; pt < 4; ++pt) {
        const double x = ux(rng), w = uw(rng);
        m0 += w;
        m1 += w * x;
        m2 += w * x * x;
        m3 += w * x * x * x;
      }
      const Skewness s = skewness_from_moments(m0, m1, m2, m3);
      REQUIRE(s.gamma >= -1.0);
      REQUIRE(s.gamma <= 1.0);
      REQUIRE(s.w1 > 0.0);
      REQUIRE(s.w2 > 0.0);
      REQUIRE(s.x1 < s.x2);
    }
  }
  SECTION("degenerate inputs throw") {
    REQUIRE_THROWS_AS(skewness_from_moments(1.0, 0.5, 0.25, 0.125), degenerate_error);
    REQUIRE_THROWS_AS(skewness_from_moments(0.0, 0.0, 0.0, 0.0), error);
  }
  SECTION("basis-moment entry point agrees with raw moments") {
    // HermiteE basis moments of the standard normal: e_0.
    const Basis he(BasisKind::HermiteE);
    Vec m(4, 0.0);
    m[0] = 1.0;
    const Skewness s = skewness_from_basis_moments(he, m);
    REQUIRE(s.gamma == Catch::Approx(0.0).margin(1e-12));
  }
}
