#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "krein/halfline.hpp"
#include "krein/krein.hpp"
#include "oracles.hpp"

using namespace krein;
using oracle::eye;
using oracle::fro;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kTrials = 30;

RestrictionModel random_model(oracle::Gen& gen, Index max_dim = 10) {
    const Index dim = gen.index(2, max_dim);
    const Index n = gen.index(1, std::min<Index>(3, dim));
    return build_model(gen.hermitian(dim, 2.0), gen.matrix(dim, n));
}

/// Hermitian n x n with spectrum drawn from (-clamp, clamp); the first `at_half_pi`
/// eigenvalues are pinned to pi/2.
ComplexMatrix random_angle(oracle::Gen& gen, Index n, Index at_half_pi = 0, double clamp = 1.4) {
    Eigen::VectorXcd spectrum(n);
    for (Index j = 0; j < n; ++j)
        spectrum(j) = j < at_half_pi ? kPi / 2 : gen.real(-clamp, clamp);
    const ComplexMatrix q = gen.unitary(n);
    return q * spectrum.asDiagonal() * q.adjoint();
}

Extension random_extension(oracle::Gen& gen, const RestrictionModel& m) {
    return extension_from_parameter(m, {gen.unitary(m.n)});
}

double relative(const ComplexMatrix& diff, const ComplexMatrix& ref) {
    return fro(diff) / (1.0 + fro(ref));
}

std::vector<Complex> sample_points(oracle::Gen& gen, int count, double lo = 0.2) {
    std::vector<Complex> zs;
    for (int k = 0; k < count; ++k)
        zs.push_back(gen.nonreal(lo));
    return zs;
}

double sigma_min(const ComplexMatrix& m) {
    return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues().minCoeff();
}

} // namespace

TEST(NumericsProperty, HermitianEigReconstructs) {
    oracle::Gen gen(1001);
    for (int t = 0; t < kTrials; ++t) {
        const ComplexMatrix h = gen.hermitian(gen.index(1, 12), 3.0);
        const SpectralDecomposition d = hermitian_eig(h);
        EXPECT_LE(fro(d.reconstruct() - h), 1e-12 * (1.0 + fro(h)));
        EXPECT_LE(fro(d.eigenvectors.adjoint() * d.eigenvectors - eye(h.rows())), 1e-12);
        for (Index j = 1; j < d.eigenvalues.size(); ++j)
            EXPECT_LE(d.eigenvalues(j - 1).real(), d.eigenvalues(j).real());
        const ComplexMatrix same = apply_function_normal(d, [](Complex x) { return x; });
        EXPECT_LE(fro(same - h), 1e-12 * (1.0 + fro(h)));
    }
}

TEST(NumericsProperty, UnitaryEigReconstructs) {
    oracle::Gen gen(1002);
    for (int t = 0; t < kTrials; ++t) {
        const ComplexMatrix u = gen.unitary(gen.index(1, 10));
        const SpectralDecomposition d = unitary_eig(u);
        EXPECT_LE(fro(d.reconstruct() - u), 1e-11);
        EXPECT_LE(unitary_defect(d.eigenvectors), 1e-12);
    }
}

TEST(NumericsProperty, RangeAndAdjointKernelSplitTheSpace) {
    oracle::Gen gen(1003);
    for (int t = 0; t < kTrials; ++t) {
        const Index rows = gen.index(2, 10);
        const Index inner = gen.index(1, rows);
        const ComplexMatrix m = gen.matrix(rows, inner) * gen.matrix(inner, gen.index(1, 10));
        const Subspace range = orthonormal_range(m);
        const Subspace kernel = null_space(m.adjoint());
        EXPECT_EQ(range.rank() + kernel.rank(), rows);
        EXPECT_LE(fro(range.basis().adjoint() * kernel.basis()), 1e-12);
        EXPECT_LE(fro(projector(range) - oracle::span_projector(m)), 1e-10);
        EXPECT_LE(fro(projector(range) * range.basis() - range.basis()), 1e-13);
        EXPECT_LE(fro(m.adjoint() * kernel.basis()), 1e-10 * (1.0 + fro(m)));
    }
}

TEST(ExtensionProperty, CayleyRoundTrip) {
    oracle::Gen gen(2001);
    for (int t = 0; t < kTrials; ++t) {
        const ComplexMatrix a = gen.hermitian(gen.index(1, 10), 5.0);
        const ComplexMatrix c = cayley(a);
        EXPECT_LE(unitary_defect(c), 1e-12);
        EXPECT_LE(fro(c - oracle::cayley(a)), 1e-12);
        EXPECT_LE(fro(inverse_cayley(c) - a), 1e-10 * (1.0 + fro(a)));
    }
}

TEST(ExtensionProperty, ParameterRoundTripAndModelInvariants) {
    oracle::Gen gen(2002);
    for (int t = 0; t < kTrials; ++t) {
        const RestrictionModel m = random_model(gen);
        const ModelResiduals res = model_residuals(m);
        EXPECT_LE(res.nminus_relation, 1e-12);
        EXPECT_LE(res.domain_orthogonality, 1e-10 * (1.0 + fro(m.a1.matrix())));
        EXPECT_EQ(m.dot_domain.rank(), m.dim - m.n);
        EXPECT_LE(fro(parameter_of(m, m.a1).v - eye(m.n)), 1e-12);

        const ComplexMatrix v = gen.unitary(m.n);
        const Extension a = extension_from_parameter(m, {v});
        EXPECT_LE(hermitian_defect(a.matrix()), 1e-12 * (1.0 + fro(a.matrix())));
        EXPECT_LE(extension_defect(m, a), 1e-10 * (1.0 + fro(a.matrix())));
        EXPECT_LE(fro(parameter_of(m, a).v - v), 1e-10);
    }
}

TEST(ExtensionProperty, DeficiencyMapAndResolventIdentity) {
    oracle::Gen gen(2003);
    for (int t = 0; t < kTrials; ++t) {
        const RestrictionModel m = random_model(gen);
        for (const Extension& a : {m.a1, random_extension(gen, m)}) {
            const Lemma1Report r = check_lemma1(m, a);
            EXPECT_LE(r.deficiency_map, 1e-10);
            EXPECT_LE(r.resolvent_identity, 1e-10);
            EXPECT_TRUE(r.direct_sum_exhausts);
            // the Cayley transform carries N- onto N+
            const ComplexMatrix image = a.cayley_transform() * m.nminus.basis();
            EXPECT_LE(fro(image - projector(m.nplus) * image), 1e-10);
        }
    }
}

TEST(ExtensionProperty, DistinctParametersGiveDistinctCayleyTransforms) {
    oracle::Gen gen(2004);
    for (int t = 0; t < kTrials; ++t) {
        const RestrictionModel m = random_model(gen);
        const ComplexMatrix v1 = gen.unitary(m.n);
        const ComplexMatrix v2 = gen.unitary(m.n);
        const Extension a = extension_from_parameter(m, {v1});
        const Extension b = extension_from_parameter(m, {v2});
        // C^{-1} Bp = -Bm v, so the Cayley transforms differ by at least |v1 - v2|
        EXPECT_GE(fro(a.cayley_transform() - b.cayley_transform()), fro(v1 - v2) * (1.0 - 1e-10));
        EXPECT_GT(fro(v1 - v2), 1e-3);
    }
}

TEST(ExtensionProperty, PrimePairsHaveFullCommonSubspace) {
    oracle::Gen gen(2005);
    for (int t = 0; t < kTrials; ++t) {
        const RestrictionModel m = random_model(gen);
        const Extension a2 = extension_from_parameter(m, ExtensionParameter::from_angle(random_angle(gen, m.n)));
        ASSERT_TRUE(is_relatively_prime(m, m.a1, a2));
        const Subspace common = common_plus_subspace(m.a1, a2);
        EXPECT_EQ(common.rank(), m.n);
        EXPECT_LE(fro(projector(common) - projector(m.nplus)), 1e-10);
        const ComplexMatrix delta = oracle::resolvent(a2.matrix(), kI) - oracle::resolvent(m.a1.matrix(), kI);
        EXPECT_GT(sigma_min(delta * m.nplus.basis()), 1e-9);
    }
}

TEST(ExtensionProperty, PrimenessMatchesResolventDifferenceRank) {
    oracle::Gen gen(2006);
    for (int t = 0; t < kTrials; ++t) {
        const RestrictionModel m = random_model(gen);
        const Index stuck = gen.index(0, m.n);
        const Extension a2 =
            extension_from_parameter(m, ExtensionParameter::from_angle(random_angle(gen, m.n, stuck)));
        const ComplexMatrix delta = oracle::resolvent(a2.matrix(), kI) - oracle::resolvent(m.a1.matrix(), kI);
        const Index rank = numerical_rank(delta);
        EXPECT_EQ(rank, m.n - stuck);
        EXPECT_EQ(is_relatively_prime(m, m.a1, a2), rank == m.n);
        EXPECT_EQ(common_plus_subspace(m.a1, a2).rank(), rank);
    }
}

TEST(KreinProperty, PFunctionSymmetrySupportAndTranslation) {
    oracle::Gen gen(3001);
    for (int t = 0; t < kTrials; ++t) {
        const RestrictionModel m = random_model(gen);
        const Extension a2 = random_extension(gen, m);
        const ComplexMatrix pp = projector(m.nplus);
        const auto zs = sample_points(gen, 3);
        for (Complex z : zs) {
            const PSample p = p_function(m.a1, a2, m.nplus, z);
            const PSample pc = p_function(m.a1, a2, m.nplus, std::conj(z));
            EXPECT_LE(relative(pc.full - p.full.adjoint(), p.full), 1e-10);
            EXPECT_LE(relative(p.full - pp * p.full * pp, p.full), 1e-10);
        }
        const PTranslationReport tr = p_translation_check(m.a1, a2, m.nplus, zs[0], zs[1]);
        EXPECT_LE(tr.residual, 1e-8);
        EXPECT_TRUE(tr.ranks_equal());
    }
}

TEST(KreinProperty, PAtIFormsAgreeAndInvertThroughTheAngle) {
    oracle::Gen gen(3002);
    for (int t = 0; t < kTrials; ++t) {
        const RestrictionModel m = random_model(gen);
        const ComplexMatrix alpha = random_angle(gen, m.n);
        const Extension a2 = extension_from_parameter(m, ExtensionParameter::from_angle(alpha));
        const ComplexMatrix p_i = p_function(m.a1, a2, m.nplus, kI).restricted;
        EXPECT_LE(fro(p_i - p_at_i_via_cayley(m.a1, a2, m.nplus)), 1e-10);
        EXPECT_EQ(numerical_rank(p_i), m.n);
        EXPECT_GT(sigma_min(p_i), 1e-9);

        const AngleOperator recovered = angle_operator(m.a1, a2, m.nplus);
        EXPECT_LE(fro(recovered.alpha - alpha), 1e-9);
        const ComplexMatrix tan = tan_alpha(recovered);
        EXPECT_LE(fro(p_i * (tan - kI * eye(m.n)) - eye(m.n)), 1e-9);
        for (Complex z : sample_points(gen, 3)) {
            const ComplexMatrix p = p_function(m.a1, a2, m.nplus, z).restricted;
            EXPECT_LE(fro(p * p_inverse_via_m(m.a1, tan, m.nplus, z) - eye(m.n)), 1e-8);
        }
    }
}

TEST(KreinProperty, ResolventFormulaMatchesDirectInverse) {
    oracle::Gen gen(3003);
    for (int t = 0; t < kTrials; ++t) {
        const RestrictionModel m = random_model(gen);
        const Index stuck = m.n > 1 ? gen.index(0, m.n - 1) : 0;
        const Extension a2 =
            extension_from_parameter(m, ExtensionParameter::from_angle(random_angle(gen, m.n, stuck)));
        const Subspace common = common_plus_subspace(m.a1, a2);
        const ComplexMatrix tan = tan_alpha(angle_operator(m.a1, a2, common));
        for (Complex z : sample_points(gen, 3, 0.5)) {
            const ComplexMatrix direct = oracle::resolvent(a2.matrix(), z);
            EXPECT_LE(fro(krein_resolvent(m.a1, common, tan, z) - direct) / fro(direct), 1e-8);
        }
    }
}

TEST(KreinProperty, BothTransformPathsReproduceM2) {
    oracle::Gen gen(3004);
    for (int t = 0; t < kTrials; ++t) {
        const RestrictionModel m = random_model(gen);
        const Index stuck = gen.index(0, m.n);
        const Extension a2 =
            extension_from_parameter(m, ExtensionParameter::from_angle(random_angle(gen, m.n, stuck)));
        for (Complex z : sample_points(gen, 2, 0.5)) {
            const GeneralLftReport r = general_lft_check(m, m.a1, a2, z);
            EXPECT_LE(r.direct_residual, 1e-8);
            EXPECT_LE(r.third_path_residual, 1e-8);
            EXPECT_LE(r.cayley_identity_residual, 1e-10);
            const ComplexMatrix m2 = weyl_operator(a2, m.nplus, z).m;
            EXPECT_LE(relative(m2 - oracle::weyl(a2.matrix(), m.nplus.basis(), z), m2), 1e-10);
        }
        if (stuck == 0) {
            const WeylSample m1 = weyl_operator(m.a1, m.nplus, {0.3, 1.7});
            const ComplexMatrix m2 = weyl_operator(a2, m.nplus, {0.3, 1.7}).m;
            EXPECT_LE(relative(lft_m1_to_m2_angle(m1, angle_operator(m.a1, a2, m.nplus)) - m2, m2), 1e-8);
        }
    }
}

TEST(KreinProperty, HerglotzBoundAndIdentity) {
    oracle::Gen gen(3005);
    for (int t = 0; t < kTrials; ++t) {
        const RestrictionModel m = random_model(gen);
        const Extension a = random_extension(gen, m);
        EXPECT_LE(fro(weyl_operator(a, m.nplus, kI).m - kI * eye(m.n)), 1e-12);
        for (Complex z : sample_points(gen, 4, 0.1)) {
            const HerglotzReport r = herglotz_check(a, m.nplus, z);
            EXPECT_GE(r.normalized_bound_margin(), -1e-10) << z;
            if (std::abs(z.imag()) >= 1.0) {
                EXPECT_GE(r.scaled_bound_margin(), -1e-10) << z;
            }
            EXPECT_LE(r.identity_residual, 1e-9 * (1.0 + r.identity_scale)) << z;
            EXPECT_LE(r.symmetry_residual, 1e-10);
        }
    }
}

TEST(HalflineProperty, SymmetryAndScalarInversion) {
    oracle::Gen gen(4001);
    for (int t = 0; t < 200; ++t) {
        double a2 = gen.real(0.0, kPi);
        if (std::abs(a2 - kPi / 2) < 1e-3)
            continue;
        const halfline::HalflineScenario s(a2);
        const Complex z = gen.nonreal(0.05, 5.0, 5.0);
        using halfline::m1_halfline;
        using halfline::m2_halfline;
        EXPECT_LE(std::abs(m1_halfline(std::conj(z)) - std::conj(m1_halfline(z))), 1e-13);
        EXPECT_LE(std::abs(m2_halfline(std::conj(z), s) - std::conj(m2_halfline(z, s))),
                  1e-12 * (1.0 + std::abs(m2_halfline(z, s))));
        EXPECT_LE(std::abs(halfline::p12_halfline(z, s) * (s.tan_alpha2() - m1_halfline(z)) - 1.0), 1e-12);
        const double bound = herglotz_lower_bound(z);
        EXPECT_GE(m1_halfline(z).imag() / z.imag(), bound - 1e-12);
        EXPECT_GE(m2_halfline(z, s).imag() / z.imag(), bound - 1e-12);
    }
}

TEST(HalflineProperty, LiteralBoundOnTheDefaultGrid) {
    for (double a : halfline::default_alpha_grid()) {
        const halfline::HalflineScenario s(a);
        for (Complex z : halfline::default_z_grid()) {
            if (z.imag() == 0.0)
                continue;
            const double bound = herglotz_lower_bound(z);
            EXPECT_GE(z.imag() * halfline::m1_halfline(z).imag(), bound - 1e-12) << z;
            EXPECT_GE(z.imag() * halfline::m2_halfline(z, s).imag(), bound - 1e-12) << z << " " << a;
        }
    }
}

TEST(HalflineProperty, QuadratureInvertsTheOperator) {
    // u = x^2 e^{-x} (1 + b x) has u(0) = 0 and decays; f = -u'' - z u
    oracle::Gen gen(4002);
    for (int t = 0; t < 6; ++t) {
        const Complex z = gen.nonreal(0.3, 3.0, 3.0);
        const double b = gen.real(0.0, 1.0);
        const auto u = [b](double x) { return x * x * std::exp(-x) * (1.0 + b * x); };
        const auto u2 = [b](double x) {
            // second derivative of (x^2 + b x^3) e^{-x}
            const double p = x * x + b * x * x * x;
            const double dp = 2.0 * x + 3.0 * b * x * x;
            const double ddp = 2.0 + 6.0 * b * x;
            return (ddp - 2.0 * dp + p) * std::exp(-x);
        };
        const auto f = [&](double x) { return Complex(-u2(x)) - z * u(x); };
        const halfline::QuadratureResult r = halfline::dirichlet_resolvent_quadrature(f, z);
        double worst = 0.0;
        for (std::size_t j = 0; j < r.x.size(); ++j)
            worst = std::max(worst, std::abs(r.u[j] - u(r.x[j])));
        EXPECT_LE(worst, 1e-6) << z;
    }
}
