#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wedgedirac/core_model.hpp"

using namespace wedgedirac;

TEST(Spinor, RejectsNonFiniteComponents) {
    EXPECT_THROW(Spinor2(cplx{NAN, 0}, 0.0), DomainError);
    EXPECT_THROW(Spinor2(0.0, cplx{0, INFINITY}), DomainError);
    EXPECT_NO_THROW(Spinor2(1.0, 2.0));
}

TEST(Spinor, InnerProductIsLinearInFirstSlot) {
    Spinor2 const a{cplx{1, 2}, cplx{0, -1}};
    Spinor2 const b{cplx{3, 0}, cplx{1, 1}};
    cplx const s{0.5, -2};
    EXPECT_NEAR(std::abs(inner(s * a, b) - s * inner(a, b)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(inner(a, s * b) - std::conj(s) * inner(a, b)), 0.0, 1e-14);
    EXPECT_NEAR(inner(a, a).real(), a.norm() * a.norm(), 1e-14);
}

TEST(Pauli, AnticommutationRelations) {
    Mat2 const s[3] = {sigma1, sigma2, sigma3};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            Mat2 const expect = i == j ? cplx{2.0} * Mat2::identity() : Mat2{};
            EXPECT_LT((anticommutator(s[i], s[j]) - expect).max_norm(), 1e-15) << i << j;
        }
    }
}

TEST(Pauli, DotRequiresUnitVector) {
    EXPECT_THROW(pauli_dot({1.0, 1.0}), DomainError);
    Mat2 const m = pauli_dot({0.6, 0.8});
    EXPECT_LT((m * m - Mat2::identity()).max_norm(), 1e-15);
}

TEST(Pauli, RadialMatrixMatchesDot) {
    for (double t : {0.0, 0.3, 2.0, 5.9}) {
        EXPECT_LT((sigma_radial(t) - pauli_dot(unit(t))).max_norm(), 1e-15);
    }
}

TEST(Geometry, OmegaValidation) {
    EXPECT_THROW(WedgeGeometry(pi, 1.0), DomainError);
    EXPECT_THROW(WedgeGeometry(0.0, 1.0), DomainError);
    EXPECT_THROW(WedgeGeometry(2 * pi, 1.0), DomainError);
    EXPECT_THROW(WedgeGeometry(1.0, 0.0), DomainError);
    EXPECT_TRUE(WedgeGeometry(1.0, 1.0).convex());
    EXPECT_FALSE(WedgeGeometry(4.0, 1.0).convex());
}

TEST(QuantumDot, InfiniteMassHasUnitB) {
    EXPECT_NEAR(quantum_dot_B(pi / 2), 1.0, 1e-15);
    EXPECT_THROW(quantum_dot_B(0.0), DomainError);
    EXPECT_THROW(quantum_dot_B(pi), DomainError);
    Mat2 const m = rescale_matrix(4.0);
    EXPECT_NEAR(std::abs(m.a - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m.d - 2.0), 0.0, 1e-15);
}

TEST(QuantumDot, BoundaryMatrixSquaresToIdentity) {
    QuantumDotModel const q(1.1);
    Mat2 const a = q.boundary_matrix({0.0, 1.0});
    EXPECT_LT((a * a - Mat2::identity()).max_norm(), 1e-14);
}

TEST(Lorentz, AlphaMatchesDefinition) {
    for (double mu : {-0.9, -0.3, 0.1, 0.5, 0.99}) {
        double const direct = std::atanh(2 * mu / (1 + mu * mu));
        EXPECT_NEAR(lorentz_alpha(mu), direct, 1e-12 * std::max(1.0, std::abs(direct)));
        EXPECT_NEAR(LorentzModel::from_alpha(lorentz_alpha(mu)).mu(), mu, 1e-14);
    }
    EXPECT_THROW(lorentz_alpha(0.0), DomainError);
    EXPECT_THROW(lorentz_alpha(1.0), DomainError);
    EXPECT_THROW(lorentz_alpha(-1.5), DomainError);
}

TEST(Lorentz, ExteriorTraceSatisfiesTransmission) {
    LorentzModel const m(0.5);
    oracle::SplitMix gen(11);
    for (int i = 0; i < 50; ++i) {
        double const t = gen.uniform(0, 2 * pi);
        Point const n = unit(t);
        Spinor2 const up{gen.complex_in_disk(), gen.complex_in_disk()};
        SpinorPair const tr{up, m.exterior_trace(n, up)};
        EXPECT_LT(m.transmission_residual(n, tr).norm(), 1e-13);
    }
}

TEST(Model, KindAndNames) {
    EXPECT_EQ(kind_of(BoundaryModel{QuantumDotModel{}}), ModelKind::QuantumDot);
    EXPECT_EQ(kind_of(BoundaryModel{LorentzModel{0.5}}), ModelKind::LorentzScalar);
    EXPECT_EQ(to_string(ModelKind::QuantumDot), "qdot");
    EXPECT_EQ(to_string(ModelKind::LorentzScalar), "lorentz");
}
