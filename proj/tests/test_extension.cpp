#include <gtest/gtest.h>

#include <numbers>

#include "krein/extension.hpp"
#include "oracles.hpp"

using namespace krein;
using oracle::eye;
using oracle::fro;

namespace {

ComplexMatrix scalar(Complex v) {
    ComplexMatrix m(1, 1);
    m << v;
    return m;
}

ComplexMatrix desk1_a1() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix e(Index n, Index k) {
    ComplexMatrix v = ComplexMatrix::Zero(n, 1);
    v(k, 0) = 1.0;
    return v;
}

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& err) {
        return err.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::InvalidInput;
}

RestrictionModel s1_model() {
    return build_model(scalar(0.0), scalar(1.0));
}

} // namespace

TEST(Cayley, Examples) {
    EXPECT_LE(fro(cayley(scalar(0.0)) - scalar(-1.0)), 1e-15);
    EXPECT_LE(fro(cayley(scalar(1.0)) - scalar(kI)), 1e-15);
    // A^2 = I gives C = (A + i)^2 / 2 = i A
    const ComplexMatrix a = desk1_a1();
    const ComplexMatrix expected = 0.5 * (a + kI * eye(2)) * (a + kI * eye(2));
    EXPECT_LE(fro(cayley(a) - expected), 1e-15);
    EXPECT_LE(fro(cayley(a) - kI * a), 1e-15);
}

TEST(Cayley, RejectsNonHermitian) {
    ComplexMatrix a(2, 2);
    a << 0, 1, 0, 0;
    EXPECT_EQ(kind_of([&] { cayley(a); }), ErrorKind::NotHermitian);
}

TEST(InverseCayley, Examples) {
    EXPECT_LE(fro(inverse_cayley(scalar(-1.0)) - scalar(0.0)), 1e-15);
    EXPECT_LE(fro(inverse_cayley(scalar(kI)) - scalar(1.0)), 1e-15);
    EXPECT_EQ(kind_of([] { inverse_cayley(scalar(1.0)); }), ErrorKind::UnitEigenvalue);
}

TEST(BuildModel, Desk1) {
    const RestrictionModel m = build_model(desk1_a1(), e(2, 0));
    ComplexMatrix c1(2, 2);
    c1 << 0, kI, kI, 0;
    EXPECT_LE(fro(m.a1.cayley_transform() - c1), 1e-15);
    EXPECT_LE(fro(projector(m.nminus) - e(2, 1) * e(2, 1).adjoint()), 1e-14);
    ComplexMatrix d(2, 1);
    d << 1.0 / std::numbers::sqrt2, -kI / std::numbers::sqrt2;
    EXPECT_EQ(m.dot_domain.rank(), 1);
    EXPECT_LE(fro(projector(m.dot_domain) - d * d.adjoint()), 1e-14);
}

TEST(BuildModel, ScalarModelHasTrivialDomain) {
    const RestrictionModel m = s1_model();
    EXPECT_EQ(m.nminus.rank(), 1);
    EXPECT_EQ(m.dot_domain.rank(), 0);
}

TEST(BuildModel, DiagonalEigenvectorAligned) {
    ComplexMatrix a = ComplexMatrix::Zero(3, 3);
    a.diagonal() << 1, 2, 3;
    const RestrictionModel m = build_model(a, e(3, 2));
    EXPECT_LE(fro(projector(m.nminus) - e(3, 2) * e(3, 2).adjoint()), 1e-14);
    const ComplexMatrix p12 = e(3, 0) * e(3, 0).adjoint() + e(3, 1) * e(3, 1).adjoint();
    EXPECT_LE(fro(projector(m.dot_domain) - p12), 1e-14);
}

TEST(BuildModel, Errors) {
    ComplexMatrix bad(2, 2);
    bad << 0, 1, 0, 0;
    EXPECT_EQ(kind_of([&] { build_model(bad, e(2, 0)); }), ErrorKind::NotHermitian);
    ComplexMatrix dependent(3, 2);
    dependent << 1, 2, 0, 0, 0, 0;
    ComplexMatrix a = ComplexMatrix::Identity(3, 3);
    EXPECT_EQ(kind_of([&] { build_model(a, dependent); }), ErrorKind::RankDeficientInput);
}

TEST(ParameterOf, ScalarModel) {
    const RestrictionModel m = s1_model();
    EXPECT_LE(fro(parameter_of(m, m.a1).v - scalar(1.0)), 1e-15);
    const Extension a2(scalar(-1.0));
    EXPECT_LE(fro(a2.cayley_inverse() - scalar(kI)), 1e-15);
    EXPECT_LE(fro(parameter_of(m, a2).v - scalar(-kI)), 1e-15);
}

TEST(ParameterOf, RejectsNonExtension) {
    const RestrictionModel m = build_model(desk1_a1(), e(2, 0));
    ComplexMatrix other(2, 2);
    other << 5, 0, 0, -5;
    EXPECT_EQ(kind_of([&] { parameter_of(m, Extension(other)); }), ErrorKind::NotAnExtension);
}

TEST(ExtensionFromParameter, ScalarModelGivesMinusOne) {
    const RestrictionModel m = s1_model();
    const Extension a2 = extension_from_parameter(m, {scalar(-kI)});
    EXPECT_LE(fro(a2.matrix() - scalar(-1.0)), 1e-14);
    EXPECT_LE(fro(a2.cayley_transform() - scalar(-kI)), 1e-14);
}

TEST(ExtensionFromParameter, RoundTripOfReference) {
    for (const auto& m : {s1_model(), build_model(desk1_a1(), e(2, 0))}) {
        const Extension back = extension_from_parameter(m, parameter_of(m, m.a1));
        EXPECT_LE(fro(back.matrix() - m.a1.matrix()), 1e-13);
    }
}

TEST(ExtensionFromParameter, IdentityParameterOnScalarModelIsARelation) {
    // v = -1 gives C^{-1} = 1, so the Cayley operator has eigenvalue 1
    const RestrictionModel m = s1_model();
    EXPECT_EQ(kind_of([&] { extension_from_parameter(m, {scalar(-1.0)}); }),
              ErrorKind::UnitEigenvalue);
}

TEST(RelativePrimeness, Examples) {
    const RestrictionModel s1 = s1_model();
    EXPECT_FALSE(is_relatively_prime(s1, s1.a1, s1.a1));
    const Extension a2(scalar(-1.0));
    EXPECT_NEAR(primeness_margin(s1, s1.a1, a2), std::numbers::sqrt2, 1e-14);
    EXPECT_TRUE(is_relatively_prime(s1, s1.a1, a2));

    const RestrictionModel d = build_model(desk1_a1(), e(2, 0));
    for (double phase : {0.4, 1.3, 2.9, -2.0}) {
        const Extension a(extension_from_parameter(d, {scalar(std::polar(1.0, phase))}));
        // brute force: eigenvalue of (C1 C2^{-1}) on N+ from the full matrices
        const Complex lambda = (e(2, 0).adjoint() * oracle::cayley(desk1_a1()) *
                                oracle::inv(oracle::cayley(a.matrix())) * e(2, 0))(0, 0);
        EXPECT_GT(std::abs(lambda - 1.0), 1e-3);
        EXPECT_TRUE(is_relatively_prime(d, d.a1, a));
    }
}

TEST(CommonPlusSubspace, Examples) {
    const RestrictionModel s1 = s1_model();
    EXPECT_EQ(common_plus_subspace(s1.a1, s1.a1).rank(), 0);
    const Extension a2(scalar(-1.0));
    const Complex delta = 1.0 / (-1.0 - kI) - 1.0 / (-kI);
    EXPECT_GT(std::abs(delta), 0.1);
    EXPECT_EQ(common_plus_subspace(s1.a1, a2).rank(), 1);

    const RestrictionModel d = build_model(desk1_a1(), e(2, 0));
    const Extension a(extension_from_parameter(d, {scalar(std::polar(1.0, 0.7))}));
    const Subspace common = common_plus_subspace(d.a1, a);
    EXPECT_EQ(common.rank(), 1);
    const ComplexMatrix brute = oracle::span_projector(oracle::resolvent(a.matrix(), kI) -
                                                       oracle::resolvent(desk1_a1(), kI));
    EXPECT_LE(fro(projector(common) - brute), 1e-12);
    EXPECT_LE(fro(projector(common) - e(2, 0) * e(2, 0).adjoint()), 1e-12);
}

TEST(CheckLemma1, ScalarModelAtMinusOne) {
    const RestrictionModel s1 = s1_model();
    const Lemma1Report r = check_lemma1(s1, Extension(scalar(-1.0)));
    EXPECT_LE(r.deficiency_map, 1e-12);
    EXPECT_LE(r.resolvent_identity, 1e-12);
    EXPECT_TRUE(r.direct_sum_exhausts);
}

TEST(CheckLemma1, ReferenceAndDesk1RandomExtension) {
    const RestrictionModel d = build_model(desk1_a1(), e(2, 0));
    for (const Extension& a :
         {d.a1, extension_from_parameter(d, {scalar(std::polar(1.0, 2.2))})}) {
        const Lemma1Report r = check_lemma1(d, a);
        EXPECT_LE(r.deficiency_map, 1e-12);
        EXPECT_LE(r.resolvent_identity, 1e-12);
        EXPECT_EQ(r.direct_sum_rank, 2);
    }
}

TEST(Resolvent, SpectralParameterRaises) {
    const Extension a(desk1_a1());
    EXPECT_EQ(kind_of([&] { resolvent(a, 1.0); }), ErrorKind::SpectralParameter);
    EXPECT_LE(fro(resolvent(a, kI) - oracle::resolvent(desk1_a1(), kI)), 1e-15);
}
