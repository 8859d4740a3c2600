#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wedgedirac/straightening.hpp"

using namespace wedgedirac;

namespace {

std::vector<double> const omegas{pi / 4, pi / 2, 1.5 * pi, 1.75 * pi};

/// Finite-difference Jacobian of the straightening map, as an oracle for the closed form.
Mat2 fd_jacobian(StraighteningMap const& m, Point p, double h) {
    Point const xp = m.straighten({p.x + h, p.y});
    Point const xm = m.straighten({p.x - h, p.y});
    Point const yp = m.straighten({p.x, p.y + h});
    Point const ym = m.straighten({p.x, p.y - h});
    return {(xp.x - xm.x) / (2 * h), (yp.x - ym.x) / (2 * h), (xp.y - xm.y) / (2 * h), (yp.y - ym.y) / (2 * h)};
}

} // namespace

TEST(IdentityCurve, EverythingVanishesExactly) {
    for (double w : omegas) {
        StraighteningMap const m(wedge_curve(w));
        for (double x : log_grid()) {
            EXPECT_EQ(m.offset(x), 0.0);
            EXPECT_EQ(m.rotation_angle(x), 0.0);
            Perturbation const p = m.perturbation_matrices(x);
            EXPECT_EQ(p.L1.max_norm(), 0.0);
            EXPECT_EQ(p.L2.max_norm(), 0.0);
            EXPECT_EQ(p.M.max_norm(), 0.0);
            EXPECT_EQ((m.jacobian(x) - Mat2::identity()).max_norm(), 0.0);
        }
    }
}

TEST(QuadraticCurve, JacobianBoundAndClosedForm) {
    for (double w : omegas) {
        StraighteningMap const m(quadratic_test_curve(w));
        EXPECT_NEAR(m.curve().sup_c2, 1.0, 1e-15);
        for (double x : log_grid()) {
            EXPECT_LE((m.jacobian(x) - Mat2::identity()).max_norm(), std::abs(x) * m.curve().sup_c2 + 1e-15);
            Point const p{x, 0.2};
            EXPECT_LT((m.jacobian(x) - fd_jacobian(m, p, 0.5 * std::abs(x))).max_norm(), 1e-7);
        }
    }
}

TEST(QuadraticCurve, PerturbationIsFirstOrderInX) {
    for (double w : omegas) {
        StraighteningMap const m(quadratic_test_curve(w));
        std::vector<double> const xs = log_grid();
        std::vector<double> l1;
        for (double x : xs) {
            l1.push_back(m.perturbation_matrices(x).L1.op_norm());
        }
        auto const slope = loglog_slope(xs, l1);
        ASSERT_TRUE(slope.has_value());
        EXPECT_GE(*slope, 0.9) << w;
        EXPECT_LE(*slope, 1.1) << w;
    }
}

TEST(QuadraticCurve, RotationAngleMatchesTangentDifference) {
    // delta is the angle between the wedge tangent and the curve tangent
    StraighteningMap const m(quadratic_test_curve(pi / 2));
    for (double x : {0.05, 0.1, 0.2, -0.05, -0.2}) {
        double const c1 = 1.0 * (x < 0 ? -1 : 1) + x;
        double const want = std::atan(c1) - std::atan(x < 0 ? -1.0 : 1.0);
        EXPECT_NEAR(std::abs(m.rotation_angle(x)), std::abs(want), 1e-14) << x;
        EXPECT_EQ(m.rotation_angle(x, DeltaSign::Flipped), -m.rotation_angle(x));
    }
}

TEST(QuadraticCurve, DeltaPrimeMatchesFiniteDifference) {
    for (double w : omegas) {
        StraighteningMap const m(quadratic_test_curve(w));
        for (double x : {0.05, -0.07, 0.12}) {
            double const h = 1e-6;
            double const fd = (m.rotation_angle(x + h) - m.rotation_angle(x - h)) / (2 * h);
            EXPECT_NEAR(std::abs(m.delta_prime(x)), std::abs(fd), 1e-7) << w << " " << x;
        }
    }
}

TEST(BoundaryCondition, PreservedByTransportAndBrokenByFlippedRotation) {
    for (double w : omegas) {
        StraighteningMap const m(quadratic_test_curve(w));
        std::vector<double> const xs = boundary_samples(25, 0.25);
        for (double mu : {0.5, -0.3, 0.9}) {
            LorentzModel const lm(mu);
            EXPECT_LT(bc_preservation_check(m, lm, xs), 1e-9) << w << " " << mu;
            EXPECT_GT(bc_preservation_check(m, lm, xs, DeltaSign::Flipped), 1e-3) << w << " " << mu;
        }
    }
}

TEST(BoundaryCondition, NormalsAreUnitAndRotatedByDelta) {
    StraighteningMap const m(quadratic_test_curve(1.5 * pi));
    for (double x : boundary_samples(5, 0.25)) {
        Point const nc = m.curve_normal(x);
        Point const nw = m.wedge_normal(x);
        EXPECT_NEAR(std::hypot(nc.x, nc.y), 1.0, 1e-15);
        double const ang = std::atan2(nc.x * nw.y - nc.y * nw.x, nc.x * nw.x + nc.y * nw.y);
        EXPECT_NEAR(std::abs(ang), std::abs(m.rotation_angle(x)), 1e-13);
    }
}

TEST(Transport, ConjugatedDiracOperatorMatchesPerturbation) {
    for (double w : omegas) {
        StraighteningMap const m(quadratic_test_curve(w));
        for (Point q : {Point{0.1, 0.3}, Point{-0.2, 0.5}, Point{0.05, -0.1}, Point{-0.03, 0.2}}) {
            EXPECT_LT(transport_identity_residual(m, q, 1e-4), 1e-4) << w;
        }
    }
    StraighteningMap const m(quadratic_test_curve(pi / 2));
    EXPECT_THROW(transport_identity_residual(m, {1e-4, 0.2}, 1e-4), DomainError);
}

TEST(Errors, HorizontalTangentAndRange) {
    // for reflex omega, c' = -|cot| + x vanishes at x = |cot(omega/2)| inside [-1, 1]
    StraighteningMap const m(quadratic_test_curve(1.5 * pi));
    EXPECT_THROW((void)m.rotation_angle(1.0), SingularTangent);
    EXPECT_THROW((void)m.rotation_angle(0.0), DomainError);
    EXPECT_THROW((void)m.offset(1.5), DomainError);
    EXPECT_THROW((void)m.offset(NAN), DomainError);
    EXPECT_THROW(poly_curve(pi / 2, {NAN}, {}), DomainError);
    EXPECT_THROW(poly_curve(pi / 2, {}, {}, 0.5, 1.0), DomainError);
    EXPECT_THROW(boundary_samples(0, 1.0), DomainError);
    EXPECT_THROW(log_grid(1), DomainError);
}

TEST(Slope, DegenerateInputs) {
    EXPECT_FALSE(loglog_slope({0.1}, {1.0}).has_value());
    EXPECT_FALSE(loglog_slope({0.1, -0.1}, {1.0, 2.0}).has_value());
    auto const s = loglog_slope({0.01, 0.1, 1.0}, {0.0004, 0.04, 4.0});
    ASSERT_TRUE(s.has_value());
    EXPECT_NEAR(*s, 2.0, 1e-12);
}

TEST(CurveDocuments, PolyDocument) {
    BoundaryCurve const c =
        curve_from_json_text(R"({"type": "poly", "omega": 1.5707963267948966, "coeffs_pos": [0.5], "coeffs_neg": [0.5, 1.0]})");
    EXPECT_EQ(c.kind, "poly");
    EXPECT_NEAR(c.c(0.5), 0.5 + 0.125, 1e-15);
    EXPECT_NEAR(c.c(-0.5), 0.5 + 0.125 - 0.125, 1e-15);
    EXPECT_NEAR(c.d2c(-0.5), 1.0 - 3.0, 1e-15);
    BoundaryCurve const r = curve_from_json_text(R"({"type": "poly", "omega": 1.0, "x_min": -0.2, "x_max": 0.3})");
    EXPECT_EQ(r.x_min, -0.2);
    EXPECT_EQ(r.x_max, 0.3);
}

TEST(CurveDocuments, SampledCurveReproducesQuadratic) {
    // samples of |x| + x^2/2 on [-0.5, 0.5]
    std::string doc = R"({"type": "samples", "points": [)";
    int const n = 200;
    for (int i = -n; i <= n; ++i) {
        double const x = 0.5 * i / n;
        doc += (i == -n ? "" : ",") + std::string("[") + std::to_string(x) + "," +
               std::to_string(std::abs(x) + 0.5 * x * x) + "]";
    }
    doc += "]}";
    BoundaryCurve const c = curve_from_json_text(doc);
    EXPECT_EQ(c.kind, "samples");
    EXPECT_NEAR(c.omega, pi / 2, 1e-3);
    ASSERT_TRUE(c.differentiation_error.has_value());
    EXPECT_LT(*c.differentiation_error, 1e-2);
    for (double x : {-0.3, -0.1, 0.1, 0.3}) {
        EXPECT_NEAR(c.c(x), std::abs(x) + 0.5 * x * x, 1e-5);
        EXPECT_NEAR(c.dc(x), (x < 0 ? -1 : 1) + x, 1e-3);
    }
    // explicit omega wins over the estimate
    BoundaryCurve const d =
        curve_from_json_text(R"({"type": "samples", "omega": 1.5, "points": [[-1,1],[-0.5,0.5],[0,0],[0.5,0.5],[1,1]]})");
    EXPECT_EQ(d.omega, 1.5);
}

TEST(CurveDocuments, MalformedInputIsFormatError) {
    for (char const* bad : {"", "{", "[]", R"({"type": "circle"})", R"({"type": "poly"})",
                            R"({"type": "poly", "omega": "wide"})", R"({"type": "samples", "points": [[0]]})",
                            R"({"type": "samples", "points": [[-1, 1], [0, 0.5], [1, 1]]})"}) {
        EXPECT_THROW(curve_from_json_text(bad), FormatError) << bad;
    }
}

TEST(Properties, RandomPolynomialCurvesPreserveBoundaryCondition) {
    oracle::SplitMix g(31);
    for (int i = 0; i < 20; ++i) {
        double w = g.uniform(0.3, 2 * pi - 0.3);
        // keep |cot(omega/2)| well above the polynomial slope so the tangent never turns horizontal
        if (std::abs(w - pi) < 0.5) {
            w += 1.0;
        }
        std::vector<double> const pos{g.uniform(-1, 1), g.uniform(-1, 1)};
        std::vector<double> const neg{g.uniform(-1, 1)};
        StraighteningMap const m(poly_curve(w, pos, neg, -0.05, 0.05));
        LorentzModel const lm(g.uniform(0.1, 0.9));
        EXPECT_LT(bc_preservation_check(m, lm, boundary_samples(10, 0.05)), 1e-9) << w;
        for (double x : boundary_samples(10, 0.05)) {
            EXPECT_LE((m.jacobian(x) - Mat2::identity()).max_norm(), std::abs(x) * m.curve().sup_c2 + 1e-14);
        }
    }
}
