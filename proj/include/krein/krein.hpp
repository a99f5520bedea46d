#pragma once

// Krein's resolvent formula and the Weyl-Titchmarsh operators of two
// self-adjoint extensions of a common symmetric operator.
//
// Conventions:
//   P(z)     = (A1 - z)(A1 - i)^{-1} (R2(z) - R1(z)) (A1 - z)(A1 + i)^{-1}
//   W        = (C_{A2} C_{A1}^{-1}) restricted to a subspace, = -exp(-2i alpha)
//   M_{A,N}  = z I + (1 + z^2) P_N (A - z)^{-1} P_N   on N
// Restricted operators are coordinate matrices in the stored basis of the
// subspace they act on. Products in the linear fractional transformations are
// composed in exactly the written order.

#include <numbers>
#include <optional>
#include <string>

#include "krein/extension.hpp"

namespace krein {

/// Reciprocal-condition threshold below which a denominator counts as singular.
inline constexpr double kSingularityTolerance = 1e-12;

namespace detail {

/// num * den^{-1}
inline ComplexMatrix right_divide(const ComplexMatrix& num, const ComplexMatrix& den, double tol) {
    try {
        return solve_linear(den.adjoint(), num.adjoint(), tol).adjoint();
    } catch (const Error& e) {
        throw Error(ErrorKind::SingularDenominator, e.what());
    }
}

inline void require_nonreal(Complex z) {
    if (z.imag() == 0.0)
        throw Error(ErrorKind::RealParameter, "spectral parameter must be nonreal");
}

} // namespace detail

struct PSample {
    Complex z;
    ComplexMatrix full;       // N x N
    ComplexMatrix restricted; // n x n in the N+ frame
};

inline PSample p_function(const Extension& a1ext, const Extension& a2ext, const Subspace& nplus,
                          Complex z) {
    const Index dim = a1ext.dim();
    const ComplexMatrix id = identity(dim);
    const ComplexMatrix r1 = resolvent(a1ext, z);
    const ComplexMatrix r2 = resolvent(a2ext, z);
    const ComplexMatrix& a1 = a1ext.matrix();
    const ComplexMatrix left = (a1 - z * id) * resolvent(a1ext, kI);
    const ComplexMatrix right = (a1 - z * id) * resolvent(a1ext, -kI);
    PSample s{z, left * (r2 - r1) * right, {}};
    s.restricted = compress(s.full, nplus);
    return s;
}

/// (i/2)(I - C_{A2} C_{A1}^{-1}) restricted to N+.
inline ComplexMatrix p_at_i_via_cayley(const Extension& a1ext, const Extension& a2ext,
                                       const Subspace& nplus) {
    const ComplexMatrix w = compress(a2ext.cayley_transform() * a1ext.cayley_inverse(), nplus);
    return (0.5 * kI) * (identity(nplus.rank()) - w);
}

struct AngleOperator {
    ComplexMatrix alpha;            // Hermitian, spectrum in (-pi/2, pi/2]
    Subspace subspace;              // frame the matrix is written in
    SpectralDecomposition spectrum; // of alpha; eigenvalues real

    /// f(alpha) by spectral calculus.
    template <class F>
    [[nodiscard]] ComplexMatrix apply(F&& f, double overflow_guard = 1e13) const {
        return apply_function_normal(spectrum, std::forward<F>(f), overflow_guard);
    }
};

/// Maps an eigenvalue e^{i theta} of W to the branch value of alpha in (-pi/2, pi/2]
/// with -exp(-2i alpha) = e^{i theta}.
inline double angle_branch(Complex w_eigenvalue) {
    constexpr double pi = std::numbers::pi;
    double a = 0.5 * (pi - std::arg(w_eigenvalue));
    if (a > 0.5 * pi)
        a -= pi;
    return a;
}

/// alpha with -exp(-2i alpha) = (C_{A2} C_{A1}^{-1}) restricted to `subspace`.
inline AngleOperator angle_operator(const Extension& a1ext, const Extension& a2ext,
                                    const Subspace& subspace, double tol = kDefaultCheckTolerance) {
    const ComplexMatrix product = a2ext.cayley_transform() * a1ext.cayley_inverse();
    const ComplexMatrix& b = subspace.basis();
    const ComplexMatrix image = product * b;
    const double leak = norm(image - b * (b.adjoint() * image));
    if (leak > tol * std::max<double>(1.0, static_cast<double>(subspace.rank())))
        throw Error(ErrorKind::NotInvariant,
                    "subspace is not invariant under the Cayley product (leak " +
                        std::to_string(leak) + ")");
    Tolerances loose;
    loose.ortho = tol;
    const SpectralDecomposition w = unitary_eig(b.adjoint() * image, loose);

    SpectralDecomposition spectrum;
    spectrum.eigenvectors = w.eigenvectors;
    spectrum.eigenvalues.resize(w.eigenvalues.size());
    for (Index j = 0; j < w.eigenvalues.size(); ++j)
        spectrum.eigenvalues(j) = angle_branch(w.eigenvalues(j));
    ComplexMatrix alpha = real_part(spectrum.reconstruct());
    return {std::move(alpha), subspace, std::move(spectrum)};
}

/// tan(alpha); NotRelativelyPrime if an eigenvalue sits within tol of +-pi/2.
inline ComplexMatrix tan_alpha(const AngleOperator& alpha, double tol = kDefaultCheckTolerance) {
    constexpr double half_pi = 0.5 * std::numbers::pi;
    for (Index j = 0; j < alpha.spectrum.eigenvalues.size(); ++j) {
        const double a = alpha.spectrum.eigenvalues(j).real();
        if (std::abs(a - half_pi) <= tol || std::abs(a + half_pi) <= tol)
            throw Error(ErrorKind::NotRelativelyPrime,
                        "angle operator has an eigenvalue at pi/2; extensions are not relatively prime");
    }
    try {
        return real_part(alpha.apply([](Complex x) { return std::tan(x); }));
    } catch (const Error& e) {
        throw Error(ErrorKind::NotRelativelyPrime, e.what());
    }
}

struct WeylSample {
    Complex z;
    ComplexMatrix m; // k x k in the frame of `subspace`
    Subspace subspace;
};

/// M_{A,N}(z) = z I + (1 + z^2) P_N (A - z)^{-1} P_N.
inline WeylSample weyl_operator(const Extension& a, const Subspace& subspace, Complex z) {
    if (subspace.ambient() != a.dim())
        throw Error(ErrorKind::BadDimensions, "subspace and extension act in different spaces");
    const ComplexMatrix compressed = compress(resolvent(a, z), subspace);
    return {z, z * identity(subspace.rank()) + (1.0 + z * z) * compressed, subspace};
}

/// tan(alpha) - M_{A1,N+}(z), the inverse of P(z) restricted to N+.
inline ComplexMatrix p_inverse_via_m(const Extension& a1ext, const ComplexMatrix& tan,
                                     const Subspace& nplus, Complex z) {
    return tan - weyl_operator(a1ext, nplus, z).m;
}

/// R1(z) + (A1 - i) R1(z) P_S (tan alpha - M1(z))^{-1} P_S (A1 + i) R1(z).
inline ComplexMatrix krein_resolvent(const Extension& a1ext, const Subspace& subspace,
                                     const ComplexMatrix& tan, Complex z,
                                     double tol = kSingularityTolerance) {
    const ComplexMatrix r1 = resolvent(a1ext, z);
    if (subspace.rank() == 0)
        return r1;
    const Index dim = a1ext.dim();
    const ComplexMatrix& a1 = a1ext.matrix();
    const ComplexMatrix& b = subspace.basis();
    const ComplexMatrix middle = tan - weyl_operator(a1ext, subspace, z).m;
    ComplexMatrix coupling;
    try {
        coupling = solve_linear(middle, identity(subspace.rank()), tol);
    } catch (const Error& e) {
        throw Error(ErrorKind::SingularDenominator,
                    std::string("Krein middle factor singular (z near sigma(A2)): ") + e.what());
    }
    const ComplexMatrix left = (a1 - kI * identity(dim)) * r1 * b;
    const ComplexMatrix right = b.adjoint() * (a1 + kI * identity(dim)) * r1;
    return r1 + left * coupling * right;
}

/// (max(1, |z|^2) + |Re z|)^{-1}
inline double herglotz_lower_bound(Complex z) {
    detail::require_nonreal(z);
    return 1.0 / (std::max(1.0, std::norm(z)) + std::abs(z.real()));
}

struct HerglotzReport {
    double lower_bound = 0.0;
    double min_eig_scaled = 0.0;     ///< lambda_min(Im z * Im M)
    double min_eig_normalized = 0.0; ///< lambda_min(Im M / Im z)
    /// ||Im M / Im z - P S P||, S = (I+A^2)^{1/2}((A - Re z)^2 + (Im z)^2)^{-1}(I+A^2)^{1/2}
    double identity_residual = 0.0;
    /// Same comparison with the left side multiplied instead of divided by Im z;
    /// vanishes only when |Im z| = 1.
    double scaled_identity_residual = 0.0;
    double identity_scale = 0.0; ///< ||P S P||, the size of the identity's terms
    double symmetry_residual = 0.0; ///< ||M(conj z) - M(z)^*||

    [[nodiscard]] double scaled_bound_margin() const { return min_eig_scaled - lower_bound; }
    [[nodiscard]] double normalized_bound_margin() const { return min_eig_normalized - lower_bound; }
};

inline HerglotzReport herglotz_check(const Extension& a, const Subspace& subspace, Complex z) {
    HerglotzReport r;
    r.lower_bound = herglotz_lower_bound(z);
    const ComplexMatrix m = weyl_operator(a, subspace, z).m;
    const ComplexMatrix m_conj = weyl_operator(a, subspace, std::conj(z)).m;
    const ComplexMatrix im_m = imag_part(m);
    r.min_eig_scaled = min_eigenvalue(z.imag() * im_m);
    r.min_eig_normalized = min_eigenvalue(im_m / z.imag());

    const double x = z.real();
    const double y = z.imag();
    const SpectralDecomposition d = hermitian_eig(a.matrix());
    const ComplexMatrix s = apply_function_normal(d, [x, y](Complex lambda) {
        const double l = lambda.real();
        return Complex{(1.0 + l * l) / ((l - x) * (l - x) + y * y), 0.0};
    });
    const ComplexMatrix s_compressed = compress(s, subspace);
    r.identity_residual = norm(im_m / y - s_compressed);
    r.identity_scale = norm(s_compressed);
    r.scaled_identity_residual = norm(y * im_m - s_compressed);
    r.symmetry_residual = norm(m_conj - m.adjoint());
    return r;
}

/// (p + (I + i p) m1) ((I + i p) - p m1)^{-1}
inline ComplexMatrix lft_m1_to_m2(const ComplexMatrix& m1, const ComplexMatrix& p_i,
                                  double tol = kSingularityTolerance) {
    const ComplexMatrix id = identity(m1.rows());
    const ComplexMatrix shifted = id + kI * p_i;
    return detail::right_divide(p_i + shifted * m1, shifted - p_i * m1, tol);
}

inline ComplexMatrix lft_m1_to_m2(const WeylSample& m1, const ComplexMatrix& p_i,
                                  double tol = kSingularityTolerance) {
    return lft_m1_to_m2(m1.m, p_i, tol);
}

/// e^{-i alpha} (cos alpha + sin alpha m) (sin alpha - cos alpha m)^{-1} e^{i alpha}
inline ComplexMatrix angle_lft(const AngleOperator& alpha, const ComplexMatrix& m,
                               double tol = kSingularityTolerance) {
    const ComplexMatrix c = alpha.apply([](Complex x) { return std::cos(x); });
    const ComplexMatrix s = alpha.apply([](Complex x) { return std::sin(x); });
    const ComplexMatrix e_minus = alpha.apply([](Complex x) { return std::exp(-kI * x); });
    const ComplexMatrix e_plus = alpha.apply([](Complex x) { return std::exp(kI * x); });
    return e_minus * detail::right_divide(c + s * m, s - c * m, tol) * e_plus;
}

/// Inverse of angle_lft:
/// -e^{i alpha} (cos alpha - sin alpha m) (sin alpha + cos alpha m)^{-1} e^{-i alpha}
inline ComplexMatrix angle_lft_inverse(const AngleOperator& alpha, const ComplexMatrix& m,
                                       double tol = kSingularityTolerance) {
    const ComplexMatrix c = alpha.apply([](Complex x) { return std::cos(x); });
    const ComplexMatrix s = alpha.apply([](Complex x) { return std::sin(x); });
    const ComplexMatrix e_minus = alpha.apply([](Complex x) { return std::exp(-kI * x); });
    const ComplexMatrix e_plus = alpha.apply([](Complex x) { return std::exp(kI * x); });
    return -(e_plus * detail::right_divide(c - s * m, s + c * m, tol) * e_minus);
}

/// M2 from M1 through the angle operator of a relatively prime pair.
inline ComplexMatrix lft_m1_to_m2_angle(const WeylSample& m1, const AngleOperator& alpha,
                                        double tol = kDefaultCheckTolerance) {
    (void)tan_alpha(alpha, tol); // NotRelativelyPrime guard
    return angle_lft(alpha, m1.m);
}

/// First A3 in the phase sweep t_j = j pi / (2(2n + 2)), j = 1..2n+1, with
/// C_{A3}^{-1}|N+ = e^{-2i t_j} C_{A1}^{-1}|N+, that is relatively prime to both
/// inputs with primeness margin > margin and whose Cayley transform keeps a
/// distance > tol from 1.
inline Extension choose_third_extension(const RestrictionModel& model, const Extension& a1ext,
                                        const Extension& a2ext, double margin,
                                        double tol = kDefaultCheckTolerance) {
    const ExtensionParameter p1 = parameter_of(model, a1ext);
    const Index count = 2 * model.n + 1;
    for (Index j = 1; j <= count; ++j) {
        const double t =
            static_cast<double>(j) * std::numbers::pi / (2.0 * static_cast<double>(2 * model.n + 2));
        const ExtensionParameter p3{std::exp(-2.0 * kI * t) * p1.v};
        std::optional<Extension> a3;
        try {
            a3.emplace(extension_from_parameter(model, p3, tol));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::UnitEigenvalue)
                continue;
            throw;
        }
        if (is_relatively_prime(model, *a3, a1ext, margin) &&
            is_relatively_prime(model, *a3, a2ext, margin))
            return *a3;
    }
    throw Error(ErrorKind::ExhaustedCandidates, "no admissible third extension in the phase sweep");
}

inline constexpr double kThirdExtensionMargin = 0.05;

struct GeneralLftReport {
    double direct_residual = 0.0;      ///< Cayley-form transform vs direct M2
    double third_path_residual = 0.0;  ///< M1 -> M3 -> M2 through A3 vs direct M2
    double cayley_identity_residual = 0.0; ///< P(i) = (i/2)(I - W), I + iP(i) = (I + W)/2
};

inline GeneralLftReport general_lft_check(const RestrictionModel& model, const Extension& a1ext,
                                          const Extension& a2ext, Complex z) {
    const Subspace& nplus = model.nplus;
    const ComplexMatrix m1 = weyl_operator(a1ext, nplus, z).m;
    const ComplexMatrix m2 = weyl_operator(a2ext, nplus, z).m;
    const double scale = 1.0 + norm(m2);
    const ComplexMatrix id = identity(model.n);

    GeneralLftReport r;
    const ComplexMatrix p_i = p_at_i_via_cayley(a1ext, a2ext, nplus);
    r.direct_residual = norm(lft_m1_to_m2(m1, p_i) - m2) / scale;

    const Extension a3 = choose_third_extension(model, a1ext, a2ext, kThirdExtensionMargin);
    const AngleOperator alpha31 = angle_operator(a3, a1ext, nplus);
    const AngleOperator alpha32 = angle_operator(a3, a2ext, nplus);
    const ComplexMatrix m3 = angle_lft_inverse(alpha31, m1);
    r.third_path_residual = norm(angle_lft(alpha32, m3) - m2) / scale;

    const ComplexMatrix w = compress(a2ext.cayley_transform() * a1ext.cayley_inverse(), nplus);
    const ComplexMatrix p_resolvent = p_function(a1ext, a2ext, nplus, kI).restricted;
    r.cayley_identity_residual =
        std::max(norm(p_resolvent - (0.5 * kI) * (id - w)),
                 norm((id + kI * p_resolvent) - 0.5 * (id + w)));
    return r;
}

struct VonNeumannLinkReport {
    Index common_rank = 0;
    double residual = 0.0;
};

/// P(i) on N_{1,2,+} against (i/2)(I - U2^{-1} U1) computed from the von
/// Neumann parameters.
inline VonNeumannLinkReport vonneumann_link_check(const RestrictionModel& model,
                                                  const Extension& a1ext, const Extension& a2ext) {
    const Subspace common = common_plus_subspace(a1ext, a2ext);
    const ComplexMatrix lhs = compress(p_function(a1ext, a2ext, model.nplus, kI).full, common);

    const ComplexMatrix v1 = parameter_of(model, a1ext).v;
    const ComplexMatrix v2 = parameter_of(model, a2ext).v;
    const ComplexMatrix u2_inv_u1 = v2.adjoint() * v1; // v2 unitary
    const ComplexMatrix coords = model.nplus.basis().adjoint() * common.basis();
    const ComplexMatrix rhs =
        (0.5 * kI) * (identity(common.rank()) - coords.adjoint() * u2_inv_u1 * coords);
    return {common.rank(), norm(lhs - rhs)};
}

struct PTranslationReport {
    double residual = 0.0;
    Index rank_z = 0;
    Index rank_z_prime = 0;
    [[nodiscard]] bool ranks_equal() const { return rank_z == rank_z_prime; }
};

/// P(z) - P(z') - (z - z') P(z') (A1 + i) R1(z') (A1 - i) R1(z) P(z), plus the
/// ranks of P restricted to N+ at both points.
inline PTranslationReport p_translation_check(const Extension& a1ext, const Extension& a2ext,
                                              const Subspace& nplus, Complex z, Complex z_prime) {
    const PSample pz = p_function(a1ext, a2ext, nplus, z);
    const PSample pzp = p_function(a1ext, a2ext, nplus, z_prime);
    const ComplexMatrix id = identity(a1ext.dim());
    const ComplexMatrix& a1 = a1ext.matrix();
    const ComplexMatrix middle =
        (a1 + kI * id) * resolvent(a1ext, z_prime) * (a1 - kI * id) * resolvent(a1ext, z);
    PTranslationReport r;
    r.residual = norm(pz.full - pzp.full - (z - z_prime) * pzp.full * middle * pz.full);
    r.rank_z = numerical_rank(pz.restricted);
    r.rank_z_prime = numerical_rank(pzp.restricted);
    return r;
}

} // namespace krein
