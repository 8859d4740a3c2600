#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "oracles.hpp"
#include "wedgedirac/numerics.hpp"

using namespace wedgedirac;

TEST(GaussLegendre, WeightsSumToTwoAndNodesSymmetric) {
    for (int n : {1, 2, 5, 16, 32, 64}) {
        NodesWeights const gl = gauss_legendre(n);
        double s = 0;
        for (int i = 0; i < n; ++i) {
            s += gl.weights[i];
            EXPECT_NEAR(gl.nodes[i], -gl.nodes[n - 1 - i], 1e-15);
        }
        EXPECT_NEAR(s, 2.0, 1e-14) << n;
    }
    EXPECT_THROW(gauss_legendre(0), DomainError);
}

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2nMinus1) {
    int const n = 8;
    QuadratureRule const r(-1.0, 1.0, 1, n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
        double const got = integrate_1d([d](double x) { return std::pow(x, d); }, r);
        double const want = d % 2 ? 0.0 : 2.0 / (d + 1);
        EXPECT_NEAR(got, want, 1e-14) << d;
    }
}

TEST(Quadrature, CompositeRuleMatchesSimpsonOracle) {
    QuadratureRule const r(0.0, 3.0);
    auto const f = [](double x) { return std::exp(-x) * std::sin(5 * x); };
    double const want = oracle::simpson<double>(f, 0.0, 3.0, 200000);
    EXPECT_NEAR(integrate_1d(f, r), want, 1e-12);
}

TEST(Quadrature, RejectsBadBreaks) {
    EXPECT_THROW(QuadratureRule(1.0, 1.0), DomainError);
    EXPECT_THROW(QuadratureRule(std::vector<double>{0.0, 1.0, 0.5}, 4), DomainError);
    EXPECT_THROW(QuadratureRule(std::vector<double>{0.0}, 4), DomainError);
    EXPECT_THROW(QuadratureRule(0.0, 1.0, 2, 0), DomainError);
}

TEST(Quadrature, NonFiniteIntegrandIsNumericalError) {
    QuadratureRule const r(0.0, 1.0, 1, 4);
    EXPECT_THROW(integrate_1d([](double) { return NAN; }, r), NumericalError);
}

TEST(RootFinding, FindsCosineRoot) {
    RootResult const r = find_root_detailed([](double x) { return std::cos(x); }, {1.0, 2.0}, 1e-14);
    EXPECT_NEAR(r.x, pi / 2, 1e-14);
    EXPECT_LE(r.width, 1e-14);
}

TEST(RootFinding, ExactZeroEndpointIsReturned) {
    EXPECT_EQ(find_root([](double x) { return x; }, {0.0, 1.0}, 1e-12), 0.0);
    EXPECT_EQ(find_root([](double x) { return x - 1.0; }, {0.0, 1.0}, 1e-12), 1.0);
}

TEST(RootFinding, Errors) {
    EXPECT_THROW(find_root([](double x) { return x * x + 1; }, {-1.0, 1.0}, 1e-12), NoSignChange);
    EXPECT_THROW(find_root([](double x) { return x; }, {1.0, -1.0}, 1e-12), DomainError);
    EXPECT_THROW(find_root([](double x) { return x; }, {-1.0, 1.0}, 0.0), DomainError);
}

TEST(RootFinding, HardFunctionsConverge) {
    // flat near the root and steep away from it
    auto const f = [](double x) { return std::pow(x - 0.3, 5); };
    EXPECT_NEAR(find_root(f, {0.0, 1.0}, 1e-14), 0.3, 1e-13);
    auto const g = [](double x) { return std::atan(1e6 * (x - 0.7)); };
    EXPECT_NEAR(find_root(g, {0.0, 1.0}, 1e-14), 0.7, 1e-13);
}

TEST(Scan, FindsAllSignChanges) {
    auto const b = scan_sign_changes([](double x) { return std::sin(x); }, 0.5, 10.0, 1000);
    ASSERT_EQ(b.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_LE(b[i].lo, pi * (i + 1));
        EXPECT_GE(b[i].hi, pi * (i + 1));
    }
}

TEST(Scan, GridPointOnRootStillBrackets) {
    // the root 0 sits exactly on a grid node
    auto const b = scan_sign_changes([](double x) { return x; }, -1.0, 1.0, 4);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0].lo, -0.5);
    EXPECT_EQ(b[0].hi, 0.0);
}

TEST(Stencils, LaplacianOfQuadraticIsExact) {
    auto const g = [](Point p) { return cplx{p.x * p.x + 3 * p.y * p.y, p.x * p.y}; };
    cplx const l = laplacian_5pt(g, {0.3, -0.2}, 1e-2);
    EXPECT_NEAR(l.real(), 8.0, 1e-9);
    EXPECT_NEAR(l.imag(), 0.0, 1e-9);
}

TEST(Stencils, DiracOfLinearField) {
    // u = (x, i y): H u = -i (sigma1 (1, 0) + sigma2 (0, i)) = -i ((0, 1) + (1, 0)) = (-i, -i)
    auto const g = [](Point p) { return Spinor2{p.x, I * p.y}; };
    Spinor2 const h = dirac_fd(g, {0.4, 0.1}, 1e-3);
    EXPECT_LT((h - Spinor2{-I, -I}).norm(), 1e-10);
}

TEST(Quadrature, EnvironmentOverridesNodeCount) {
    ::setenv("WEDGEDIRAC_QUAD_NODES", "12", 1);
    EXPECT_EQ(default_quad_nodes(), 12);
    ::setenv("WEDGEDIRAC_QUAD_NODES", "twelve", 1);
    EXPECT_EQ(default_quad_nodes(), 32);
    ::unsetenv("WEDGEDIRAC_QUAD_NODES");
    EXPECT_EQ(default_quad_nodes(), 32);
}
