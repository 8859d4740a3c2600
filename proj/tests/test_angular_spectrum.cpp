#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "wedgedirac/angular_spectrum.hpp"

using namespace wedgedirac;

namespace {

std::vector<double> const alphas{0.25, 1.0, 2.0};
std::vector<double> const omegas{pi / 4, pi / 2, 3 * pi / 2, 7 * pi / 4};

} // namespace

TEST(QuantumDotLadder, ClosedFormValues) {
    EXPECT_NEAR(qdot_lambda(0, 1.5 * pi), -1.0 / 6.0, 1e-15);
    EXPECT_NEAR(qdot_lambda(-1, 1.5 * pi), -5.0 / 6.0, 1e-15);
    for (int k = -5; k <= 5; ++k) {
        for (double w : omegas) {
            EXPECT_NEAR(qdot_lambda(k, w), oracle::qdot_lambda(k, w), 1e-13);
            EXPECT_NEAR(qdot_lambda(k, w) + qdot_lambda(-k - 1, w), -1.0, 1e-13);
        }
    }
}

TEST(LorentzLadder, LambdaZeroMatchesFrozenValues) {
    for (auto const& f : oracle::frozen_lambda0()) {
        EXPECT_NEAR(lorentz_lambda_0(f.alpha, f.omega), f.lambda0, 1e-12) << f.alpha << " " << f.omega;
        EXPECT_NEAR(lorentz_lambda_index(f.alpha, f.omega, 0), f.lambda0, 1e-12);
    }
}

TEST(LorentzLadder, SignOfAlphaDoesNotMatter) {
    for (double w : omegas) {
        EXPECT_EQ(lorentz_lambda_0(1.0, w), lorentz_lambda_0(-1.0, w));
    }
}

TEST(LorentzLadder, MirrorSymmetry) {
    for (double a : alphas) {
        for (double w : omegas) {
            std::vector<double> const l = lorentz_ladder(a, w, -11, 10);
            for (int k = -10; k <= 10; ++k) {
                double const lk = l[static_cast<std::size_t>(k + 11)];
                double const lm = l[static_cast<std::size_t>(-k - 1 + 11)];
                EXPECT_NEAR(lk + lm, -1.0, 1e-9) << a << " " << w << " " << k;
            }
        }
    }
}

TEST(LorentzLadder, AgreesWithIndependentScan) {
    // even k walk the F_+ roots from the one in (-1/2, 0), odd k the F_- roots from the one in (-1, -1/2)
    for (double a : alphas) {
        for (double w : omegas) {
            std::vector<double> const l = lorentz_ladder(a, w, -6, 5);
            std::vector<double> plus, minus;
            for (auto const& r : oracle::lorentz_roots(a, w, -9.0, 8.0, 400000)) {
                (r.parity > 0 ? plus : minus).push_back(r.lambda);
            }
            auto const first_above = [](std::vector<double> const& v, double x) {
                return static_cast<long>(std::upper_bound(v.begin(), v.end(), x) - v.begin());
            };
            long const p0 = first_above(plus, -0.5);
            long const m0 = first_above(minus, -1.0);
            ASSERT_LT(plus[static_cast<std::size_t>(p0)], 0.0);
            ASSERT_LT(minus[static_cast<std::size_t>(m0)], -0.5);
            for (int k = -6; k <= 5; ++k) {
                double const want = k % 2 == 0 ? plus[static_cast<std::size_t>(p0 + k / 2)]
                                               : minus[static_cast<std::size_t>(m0 + (k + 1) / 2)];
                EXPECT_NEAR(l[static_cast<std::size_t>(k + 6)], want, 1e-9) << a << " " << w << " " << k;
            }
        }
    }
}

TEST(LorentzLadder, PinnedRootsLieInTheirIntervals) {
    for (double a : alphas) {
        for (double w : omegas) {
            double const l0 = lorentz_lambda_index(a, w, 0);
            double const lm1 = lorentz_lambda_index(a, w, -1);
            EXPECT_GT(l0, -0.5);
            EXPECT_LT(l0, 0.0);
            EXPECT_GT(lm1, -1.0);
            EXPECT_LT(lm1, -0.5);
        }
    }
}

TEST(LorentzLadder, ScanReturnsAscendingRootsOfBothParities) {
    LorentzScan const s = lorentz_lambda_scan(1.0, pi / 4, -2.5, 1.5);
    auto const frozen = oracle::frozen_figure_roots();
    ASSERT_EQ(s.roots.size(), frozen.size());
    for (std::size_t i = 0; i < frozen.size(); ++i) {
        EXPECT_NEAR(s.roots[i].lambda, frozen[i].lambda, 1e-12);
        EXPECT_EQ(parity_sign(s.roots[i].parity), frozen[i].parity);
    }
    EXPECT_THROW(lorentz_lambda_scan(1.0, pi / 4, 1.0, 0.0), DomainError);
}

TEST(LorentzLadder, InvalidParameters) {
    EXPECT_THROW(lorentz_lambda_0(0.0, pi / 2), DomainError);
    EXPECT_THROW(lorentz_lambda_0(1.0, pi), DomainError);
    EXPECT_THROW(lorentz_lambda_0(NAN, pi / 2), DomainError);
}

TEST(Modes, QuantumDotGramMatrixIsIdentity) {
    for (double w : {pi / 3, 1.5 * pi}) {
        for (int k = -10; k <= 10; ++k) {
            AngularMode const a = qdot_eigenfunction(k, w);
            for (int l = -10; l <= 10; ++l) {
                cplx const g = angular_inner_product(a, qdot_eigenfunction(l, w));
                EXPECT_NEAR(std::abs(g - cplx{k == l ? 1.0 : 0.0}), 0.0, 1e-10) << k << " " << l;
            }
        }
    }
}

TEST(Modes, LorentzGramAgainstSimpsonOracle) {
    double const a = 1.0;
    double const w = 1.5 * pi;
    for (int k = -3; k <= 2; ++k) {
        AngularMode const m = lorentz_eigenfunction(k, a, w);
        for (int l = -3; l <= 2; ++l) {
            AngularMode const n = lorentz_eigenfunction(l, a, w);
            // one Simpson pass per sheet, since the modes jump at theta = omega
            cplx want{};
            for (Sheet sh : {Sheet::Plus, Sheet::Minus}) {
                want += oracle::simpson<std::complex<double>>(
                    [&](double t) { return inner(m.value(sh, t), n.value(sh, t)); }, m.sheet_begin(sh),
                    m.sheet_end(sh), 20000);
            }
            cplx const got = angular_inner_product(m, n);
            EXPECT_NEAR(std::abs(got - want), 0.0, 1e-10) << k << " " << l;
            EXPECT_NEAR(std::abs(got - cplx{k == l ? 1.0 : 0.0}), 0.0, 1e-8) << k << " " << l;
        }
    }
}

TEST(Modes, ResidualsVanishForBothModels) {
    for (double w : omegas) {
        for (int k = -10; k <= 10; ++k) {
            AngularMode const q = qdot_eigenfunction(k, w);
            EXPECT_LT(boundary_residual(q), 1e-9);
            EXPECT_LT(angular_operator_residual(q), 1e-9);
            for (double a : alphas) {
                AngularMode const m = lorentz_eigenfunction(k, a, w);
                EXPECT_LT(boundary_residual(m), 1e-9) << a << " " << w << " " << k;
                EXPECT_LT(angular_operator_residual(m), 1e-9);
            }
        }
    }
}

TEST(Modes, ShiftedExponentIsDetected) {
    AngularMode const m = lorentz_eigenfunction(0, 1.0, pi / 2);
    EXPECT_GT(angular_operator_residual(m, 1e-3), 1e-4);
}

TEST(Modes, RadialFlipAndChargeConjugation) {
    for (double w : {pi / 2, 1.5 * pi}) {
        for (int k : {-2, -1, 0, 1}) {
            EXPECT_LT(radial_flip_residual(qdot_eigenfunction(k, w)), 1e-9);
            EXPECT_LT(charge_residual(qdot_eigenfunction(k, w)), 1e-9);
            for (double a : alphas) {
                AngularMode const m = lorentz_eigenfunction(k, a, w);
                EXPECT_LT(radial_flip_residual(m), 1e-9) << a << " " << w << " " << k;
                EXPECT_LT(charge_residual(m), 1e-9) << a << " " << w << " " << k;
            }
        }
    }
}

TEST(Modes, EtaIsTheSignOfTheRootRelation) {
    // cos(pi s) = eta tanh(alpha) sin((pi - omega) s) at every root
    for (double a : {0.25, 1.0, -1.0, 2.0}) {
        for (double w : omegas) {
            for (int k = -10; k <= 10; ++k) {
                AngularMode const m = lorentz_eigenfunction(k, a, w);
                double const s = m.lambda + 0.5;
                double const rhs = m.eta * std::tanh(a) * std::sin((pi - w) * s);
                EXPECT_NEAR(std::cos(pi * s), rhs, 1e-10) << a << " " << w << " " << k;
            }
        }
    }
}

TEST(Modes, FamilyMismatchIsRejected) {
    AngularMode const a = qdot_eigenfunction(0, pi / 2);
    AngularMode const b = qdot_eigenfunction(0, 1.5 * pi);
    EXPECT_THROW(angular_inner_product(a, b), ParameterMismatch);
    EXPECT_THROW(radial_flip_residual(a, qdot_eigenfunction(1, pi / 2)), ParameterMismatch);
    EXPECT_THROW(eval_mode(a, pi), DomainError);
}

TEST(ClosedFormNormalization, NeitherCandidateNormalizesTheMode) {
    // the modes use the joint L2 norm; neither closed-form candidate agrees with it
    AngularMode const m = lorentz_eigenfunction(0, 1.0, pi / 2);
    ClosedFormNormalization const p = closed_form_normalization(m);
    EXPECT_GT(std::abs(p.minus_form - p.l2_norm), 1e-3);
    EXPECT_GT(std::abs(p.plus_form - p.l2_norm), 1e-3);
    EXPECT_NEAR(std::abs(angular_inner_product(m, m)), 1.0, 1e-10);
    EXPECT_THROW(closed_form_normalization(qdot_eigenfunction(0, pi / 2)), ParameterMismatch);
}

TEST(Properties, RandomParametersKeepLadderInvariants) {
    oracle::SplitMix gen(7);
    for (int trial = 0; trial < 25; ++trial) {
        double const a = gen.uniform(0.05, 3.0) * (trial % 2 ? -1.0 : 1.0);
        double w = gen.uniform(0.2, 2 * pi - 0.2);
        if (std::abs(w - pi) < 0.05) {
            w += 0.1;
        }
        std::vector<double> const l = lorentz_ladder(a, w, -6, 5);
        // ascending within each parity; the two parities need not interlace
        for (std::size_t i = 2; i < l.size(); ++i) {
            EXPECT_LT(l[i - 2], l[i]) << a << " " << w;
        }
        for (int k = -6; k <= 5; ++k) {
            EXPECT_NEAR(l[static_cast<std::size_t>(k + 6)] + l[static_cast<std::size_t>(-k - 1 + 6)], -1.0, 1e-9);
        }
        EXPECT_NEAR(oracle::lorentz_f(l[6], a, w, 1), 0.0, 1e-10);
    }
}
