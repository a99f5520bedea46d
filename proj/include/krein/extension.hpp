#pragma once

// Finite-dimensional model of a symmetric operator with deficiency indices
// (n, n) and the Cayley-transform description of its self-adjoint extensions.
//
// The symmetric operator is the reference extension A1 restricted to
// (A1 + i)^{-1}(N+^perp). In finite dimensions this operator is not densely
// defined; all identities used here are Cayley-transform and resolvent
// identities that hold without density.
//
// Frame convention: restricted n x n operators are written in the stored bases
// of N+ and N-. The N- basis is fixed as -C_{A1}^{-1} applied to the N+ basis,
// so the von Neumann parameter of A1 itself is the identity matrix.

#include <string>

#include "krein/numerics.hpp"

namespace krein {

inline constexpr double kDefaultCheckTolerance = 1e-9;

/// C_A = (A + i)(A - i)^{-1}.
inline ComplexMatrix cayley(const ComplexMatrix& a, const Tolerances& tol = {}) {
    require_square(a, "cayley input");
    require_finite(a, "cayley input");
    if (hermitian_defect(a) > tol.herm * (1.0 + norm(a)))
        throw Error(ErrorKind::NotHermitian, "cayley input is not Hermitian");
    const Index n = a.rows();
    // (A - i) and (A + i) commute, so solving from the left is the same product.
    return solve_linear(a - kI * identity(n), a + kI * identity(n));
}

/// A = i(C + 1)(C - 1)^{-1}; UnitEigenvalue if 1 is (numerically) in sigma(C).
inline ComplexMatrix inverse_cayley(const ComplexMatrix& c, double tol = kDefaultCheckTolerance) {
    require_square(c, "inverse_cayley input");
    require_finite(c, "inverse_cayley input");
    const Index n = c.rows();
    if (n == 0)
        return c;
    Tolerances loose;
    loose.ortho = tol;
    const SpectralDecomposition d = unitary_eig(c, loose);
    double margin = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i)
        margin = std::min(margin, std::abs(d.eigenvalues(i) - 1.0));
    if (margin <= tol)
        throw Error(ErrorKind::UnitEigenvalue,
                    "1 lies in the spectrum of the Cayley operator (distance " +
                        std::to_string(margin) + "); the extension is a relation");
    const ComplexMatrix a =
        kI * solve_linear(c - identity(n), c + identity(n), 0.25 * tol);
    if (hermitian_defect(a) > std::max(tol, 1e-12) * (1.0 + norm(a)) / margin)
        throw Error(ErrorKind::NumericalFailure, "inverse Cayley transform lost Hermitian symmetry");
    return real_part(a);
}

/// One self-adjoint extension: a Hermitian matrix with its cached Cayley
/// transform and spectrum.
class Extension {
public:
    explicit Extension(const ComplexMatrix& a, const Tolerances& tol = {})
        : a_(real_part(a)), cayley_(cayley(a, tol)) {
        eigenvalues_ = hermitian_eig(a_, tol).eigenvalues.real();
        cayley_inv_ = cayley_.adjoint();
    }

    [[nodiscard]] Index dim() const noexcept { return a_.rows(); }
    [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return a_; }
    [[nodiscard]] const ComplexMatrix& cayley_transform() const noexcept { return cayley_; }
    [[nodiscard]] const ComplexMatrix& cayley_inverse() const noexcept { return cayley_inv_; }
    [[nodiscard]] const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }

private:
    ComplexMatrix a_;
    ComplexMatrix cayley_;
    ComplexMatrix cayley_inv_;
    Eigen::VectorXd eigenvalues_;
};

/// Coordinates of the isometry U_A : N+ -> N- in the model's fixed bases.
struct ExtensionParameter {
    ComplexMatrix v;

    /// Parameter whose angle operator relative to A1 is alpha: v = -exp(2i alpha).
    static ExtensionParameter from_angle(const ComplexMatrix& alpha) {
        const SpectralDecomposition d = hermitian_eig(alpha);
        return {apply_function_normal(d, [](Complex x) { return -std::exp(2.0 * kI * x); })};
    }
};

struct RestrictionModel {
    Index dim = 0;
    Index n = 0;
    Extension a1;
    Subspace nplus;
    Subspace nminus;
    Subspace dot_domain;
};

/// Residuals of the RestrictionModel invariants.
struct ModelResiduals {
    double nminus_relation = 0.0; ///< ||P_{N-} - C1^{-1} P_{N+} C1||
    double domain_orthogonality = 0.0; ///< ||P_{N+} (A1 + i) D||
};

inline ModelResiduals model_residuals(const RestrictionModel& m) {
    const ComplexMatrix& c1 = m.a1.cayley_transform();
    const ComplexMatrix& c1_inv = m.a1.cayley_inverse();
    ModelResiduals r;
    r.nminus_relation = norm(projector(m.nminus) - c1_inv * projector(m.nplus) * c1);
    r.domain_orthogonality =
        norm(m.nplus.basis().adjoint() * (m.a1.matrix() + kI * identity(m.dim)) *
             m.dot_domain.basis());
    return r;
}

inline RestrictionModel build_model(const ComplexMatrix& a1, const ComplexMatrix& nplus_raw,
                                    double tol = kDefaultCheckTolerance) {
    require_square(a1, "reference extension");
    if (nplus_raw.rows() != a1.rows())
        throw Error(ErrorKind::BadDimensions, "N+ columns do not match the ambient dimension");
    if (nplus_raw.cols() == 0)
        throw Error(ErrorKind::BadDimensions, "deficiency index must be positive");
    require_finite(nplus_raw, "N+ columns");

    Extension ext(a1);
    const double raw_scale = norm(nplus_raw);
    const Subspace nplus = raw_scale > 0.0 ? orthonormal_range(nplus_raw / raw_scale)
                                           : Subspace::zero(a1.rows());
    if (nplus.rank() != nplus_raw.cols())
        throw Error(ErrorKind::RankDeficientInput, "N+ columns are linearly dependent");

    const Index dim = a1.rows();
    const ComplexMatrix nminus_basis = -ext.cayley_inverse() * nplus.basis();
    Subspace nminus(nminus_basis, 1e-10);
    const Subspace complement = null_space(nplus.basis().adjoint());
    const ComplexMatrix domain_raw =
        solve_linear(ext.matrix() + kI * identity(dim), complement.basis());
    Subspace dot_domain = orthonormal_range(domain_raw);

    RestrictionModel model{dim, nplus.rank(), std::move(ext), nplus, std::move(nminus),
                           std::move(dot_domain)};
    const ModelResiduals r = model_residuals(model);
    const double scale = 1.0 + norm(model.a1.matrix());
    if (r.nminus_relation > tol * scale || r.domain_orthogonality > tol * scale ||
        model.dot_domain.rank() != dim - model.n)
        throw Error(ErrorKind::NumericalFailure, "model invariants violated after construction");
    return model;
}

/// ||(a - a1) D(dot A)||, the amount by which a fails to extend the model.
inline double extension_defect(const RestrictionModel& model, const Extension& a) {
    return norm((a.matrix() - model.a1.matrix()) * model.dot_domain.basis());
}

/// Von Neumann coordinates: v = Bm^* (-C_A^{-1}) Bp.
inline ExtensionParameter parameter_of(const RestrictionModel& model, const Extension& a,
                                       double tol = kDefaultCheckTolerance) {
    if (a.dim() != model.dim)
        throw Error(ErrorKind::BadDimensions, "extension dimension differs from model");
    if (extension_defect(model, a) > tol * (1.0 + norm(a.matrix())))
        throw Error(ErrorKind::NotAnExtension, "matrix does not agree with A1 on D(dot A)");
    return {-(model.nminus.basis().adjoint() * a.cayley_inverse() * model.nplus.basis())};
}

/// Builds C^{-1} = C1^{-1} on N+^perp and -U_p on N+, then inverts the Cayley
/// transform.
inline Extension extension_from_parameter(const RestrictionModel& model, const ExtensionParameter& p,
                                          double tol = kDefaultCheckTolerance) {
    if (p.v.rows() != model.n || p.v.cols() != model.n)
        throw Error(ErrorKind::BadDimensions, "parameter must be n x n");
    require_finite(p.v, "extension parameter");
    if (unitary_defect(p.v) > tol * std::max<double>(1.0, static_cast<double>(model.n)))
        throw Error(ErrorKind::NotUnitary, "extension parameter is not unitary");

    const ComplexMatrix& bp = model.nplus.basis();
    const ComplexMatrix& bm = model.nminus.basis();
    const ComplexMatrix pp = projector(model.nplus);
    const ComplexMatrix c_inv =
        model.a1.cayley_inverse() * (identity(model.dim) - pp) - bm * p.v * bp.adjoint();
    const ComplexMatrix c = c_inv.adjoint();
    return Extension(inverse_cayley(c, tol));
}

/// (C_{A1} C_{A2}^{-1}) restricted to N+, in the N+ frame.
inline ComplexMatrix restricted_cayley_product(const RestrictionModel& model, const Extension& a1ext,
                                               const Extension& a2ext) {
    return compress(a1ext.cayley_transform() * a2ext.cayley_inverse(), model.nplus);
}

/// min |lambda - 1| over the spectrum of (C_{A1} C_{A2}^{-1})|N+.
inline double primeness_margin(const RestrictionModel& model, const Extension& a1ext,
                               const Extension& a2ext) {
    Tolerances loose;
    loose.ortho = 1e-9;
    const SpectralDecomposition d =
        unitary_eig(restricted_cayley_product(model, a1ext, a2ext), loose);
    double margin = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < d.eigenvalues.size(); ++i)
        margin = std::min(margin, std::abs(d.eigenvalues(i) - 1.0));
    return margin;
}

inline bool is_relatively_prime(const RestrictionModel& model, const Extension& a1ext,
                                const Extension& a2ext, double tol = kDefaultCheckTolerance) {
    return primeness_margin(model, a1ext, a2ext) > tol;
}

/// R(z) = (A - z)^{-1}; SpectralParameter if z is within tol of sigma(A).
inline ComplexMatrix resolvent(const Extension& a, Complex z, double tol = 1e-12) {
    const double scale = 1.0 + norm(a.matrix());
    for (Index i = 0; i < a.eigenvalues().size(); ++i)
        if (std::abs(a.eigenvalues()(i) - z) <= tol * scale)
            throw Error(ErrorKind::SpectralParameter, "z lies in the spectrum of the extension");
    try {
        return solve_linear(a.matrix() - z * identity(a.dim()), identity(a.dim()), 1e-14);
    } catch (const Error& e) {
        throw Error(ErrorKind::SpectralParameter, e.what());
    }
}

/// (A2 - i)^{-1} - (A1 - i)^{-1}.
inline ComplexMatrix resolvent_difference_at_i(const Extension& a1ext, const Extension& a2ext) {
    return resolvent(a2ext, kI) - resolvent(a1ext, kI);
}

/// N_{1,2,+}: closed range of the resolvent difference at i.
inline Subspace common_plus_subspace(const Extension& a1ext, const Extension& a2ext,
                                     double tol = Tolerances{}.rank) {
    if (a1ext.dim() != a2ext.dim())
        throw Error(ErrorKind::BadDimensions, "extensions act in different spaces");
    return orthonormal_range(resolvent_difference_at_i(a1ext, a2ext), tol);
}

struct Lemma1Report {
    double deficiency_map = 0.0;     ///< ||P_{N+} - C_A P_{N-} C_A^{-1}||
    double resolvent_identity = 0.0; ///< max ||(A-i)^{-1} C_A^{-1} f - (i/2)(C_A^{-1} - I) f||
    Index direct_sum_rank = 0;       ///< rank of [D(dot A) | (I - C_A^{-1}) N+]
    bool direct_sum_exhausts = false;
};

inline Lemma1Report check_lemma1(const RestrictionModel& model, const Extension& a) {
    const ComplexMatrix& c = a.cayley_transform();
    const ComplexMatrix& c_inv = a.cayley_inverse();
    const ComplexMatrix& bp = model.nplus.basis();
    const ComplexMatrix id = identity(model.dim);

    Lemma1Report r;
    r.deficiency_map = norm(projector(model.nplus) - c * projector(model.nminus) * c_inv);

    const ComplexMatrix lhs = resolvent(a, kI) * c_inv * bp;
    const ComplexMatrix rhs = (0.5 * kI) * (c_inv - id) * bp;
    for (Index j = 0; j < bp.cols(); ++j)
        r.resolvent_identity = std::max(r.resolvent_identity, (lhs.col(j) - rhs.col(j)).norm());

    ComplexMatrix stacked(model.dim, model.dot_domain.rank() + model.n);
    stacked << model.dot_domain.basis(), (id - c_inv) * bp;
    r.direct_sum_rank = numerical_rank(stacked);
    r.direct_sum_exhausts = r.direct_sum_rank == model.dim;
    return r;
}

} // namespace krein
