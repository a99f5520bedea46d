#pragma once

// Dense complex linear algebra used by the extension and Krein modules:
// Hermitian/unitary spectral decompositions, range and kernel bases by
// singular-value cutoff, spectral calculus for normal matrices, and a guarded
// linear solve. Everything is a pure function of its inputs.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "krein/error.hpp"

namespace krein {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Tolerance policy shared by the numerical kernel.
struct Tolerances {
    double ortho = 1e-12; ///< orthonormality / unitarity, scaled by dimension
    double herm = 1e-11;  ///< Hermitian symmetry, relative to 1 + ||H||
    double rank = 1e-9;   ///< relative singular-value cutoff
    double recon = 1e-10; ///< spectral reconstruction, relative to ||M||
};

/// Frobenius norm; zero for empty matrices.
inline double norm(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.norm();
}

inline ComplexMatrix identity(Index n) {
    return ComplexMatrix::Identity(n, n);
}

inline ComplexMatrix adjoint(const ComplexMatrix& m) {
    return m.adjoint();
}

/// (T + T*)/2
inline ComplexMatrix real_part(const ComplexMatrix& t) {
    return (t + t.adjoint()) * 0.5;
}

/// (T - T*)/(2i)
inline ComplexMatrix imag_part(const ComplexMatrix& t) {
    return (t - t.adjoint()) / (2.0 * kI);
}

inline bool all_finite(const ComplexMatrix& m) {
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                return false;
    return true;
}

inline void require_finite(const ComplexMatrix& m, const std::string& what) {
    if (!all_finite(m))
        throw Error(ErrorKind::InvalidInput, what + " has non-finite entries");
}

inline void require_square(const ComplexMatrix& m, const std::string& what) {
    if (m.rows() != m.cols())
        throw Error(ErrorKind::BadDimensions, what + " is not square");
}

inline double hermitian_defect(const ComplexMatrix& h) {
    return norm(h - h.adjoint());
}

inline double unitary_defect(const ComplexMatrix& u) {
    return norm(u.adjoint() * u - identity(u.cols()));
}

/// Max-norm distance on (re, im) parts.
inline double scalar_distance(Complex a, Complex b) {
    return std::max(std::abs(a.real() - b.real()), std::abs(a.imag() - b.imag()));
}

/// An orthonormal column basis of a subspace of C^N.
class Subspace {
public:
    explicit Subspace(ComplexMatrix basis, double tol_ortho = Tolerances{}.ortho)
        : basis_(std::move(basis)) {
        require_finite(basis_, "subspace basis");
        if (basis_.cols() > basis_.rows())
            throw Error(ErrorKind::BadDimensions, "subspace rank exceeds ambient dimension");
        const double defect = unitary_defect(basis_);
        if (defect > tol_ortho * std::max<double>(1.0, static_cast<double>(basis_.cols())))
            throw Error(ErrorKind::InvalidInput,
                        "subspace basis not orthonormal (defect " + std::to_string(defect) + ")");
    }

    static Subspace zero(Index ambient) { return Subspace(ComplexMatrix(ambient, 0)); }
    static Subspace full(Index ambient) { return Subspace(identity(ambient)); }

    [[nodiscard]] Index ambient() const noexcept { return basis_.rows(); }
    [[nodiscard]] Index rank() const noexcept { return basis_.cols(); }
    [[nodiscard]] const ComplexMatrix& basis() const noexcept { return basis_; }

private:
    ComplexMatrix basis_;
};

struct SpectralDecomposition {
    ComplexVector eigenvalues;
    ComplexMatrix eigenvectors; // unitary, column j belongs to eigenvalues(j)

    [[nodiscard]] ComplexMatrix reconstruct() const {
        return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
    }
};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending and real.
inline SpectralDecomposition hermitian_eig(const ComplexMatrix& h, const Tolerances& tol = {}) {
    require_square(h, "hermitian_eig input");
    require_finite(h, "hermitian_eig input");
    const Index n = h.rows();
    if (hermitian_defect(h) > tol.herm * (1.0 + norm(h)))
        throw Error(ErrorKind::NotHermitian, "matrix is not Hermitian");
    if (n == 0)
        return {ComplexVector(0), ComplexMatrix(0, 0)};

    const ComplexMatrix sym = real_part(h);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::NumericalFailure, "Hermitian eigensolver did not converge");
    SpectralDecomposition d;
    d.eigenvalues = solver.eigenvalues().cast<Complex>();
    d.eigenvectors = solver.eigenvectors();
    return d;
}

/// Eigen-decomposition of a unitary matrix. Eigenvalues lie on the unit circle
/// and are sorted by principal argument.
///
/// The matrix is mapped to the Hermitian matrix i(U + w)(U - w)^{-1}, where the
/// phase w sits in the widest gap of the spectrum, so that the eigenvectors come
/// from a Hermitian solver and stay orthonormal under clustering.
inline SpectralDecomposition unitary_eig(const ComplexMatrix& u, const Tolerances& tol = {}) {
    require_square(u, "unitary_eig input");
    require_finite(u, "unitary_eig input");
    const Index n = u.rows();
    if (unitary_defect(u) > tol.ortho * std::max<double>(1.0, static_cast<double>(n)))
        throw Error(ErrorKind::NotUnitary, "matrix is not unitary");
    if (n == 0)
        return {ComplexVector(0), ComplexMatrix(0, 0)};

    Eigen::ComplexEigenSolver<ComplexMatrix> estimates(u, false);
    if (estimates.info() != Eigen::Success)
        throw Error(ErrorKind::NumericalFailure, "eigenvalue estimate did not converge");
    std::vector<double> phases;
    phases.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        phases.push_back(std::arg(estimates.eigenvalues()(i)));
    std::sort(phases.begin(), phases.end());

    double gap_start = phases.back();
    double widest = phases.front() + 2.0 * std::numbers::pi - phases.back();
    for (std::size_t i = 1; i < phases.size(); ++i) {
        if (phases[i] - phases[i - 1] > widest) {
            widest = phases[i] - phases[i - 1];
            gap_start = phases[i - 1];
        }
    }
    const Complex w = std::polar(1.0, gap_start + 0.5 * widest);

    const ComplexMatrix shifted = u - w * identity(n);
    const ComplexMatrix k = kI * shifted.partialPivLu().solve(u + w * identity(n));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(real_part(k));
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::NumericalFailure, "unitary eigensolver did not converge");

    const ComplexMatrix& q = solver.eigenvectors();
    std::vector<std::pair<double, Index>> order;
    ComplexVector lambda(n);
    for (Index j = 0; j < n; ++j) {
        const Complex rq = q.col(j).dot(u * q.col(j));
        lambda(j) = std::abs(rq) > 0.0 ? rq / std::abs(rq) : Complex{1.0, 0.0};
        order.emplace_back(std::arg(lambda(j)), j);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    SpectralDecomposition d;
    d.eigenvalues.resize(n);
    d.eigenvectors.resize(n, n);
    for (Index j = 0; j < n; ++j) {
        d.eigenvalues(j) = lambda(order[static_cast<std::size_t>(j)].second);
        d.eigenvectors.col(j) = q.col(order[static_cast<std::size_t>(j)].second);
    }
    return d;
}

/// Singular values, descending.
inline Eigen::VectorXd singular_values(const ComplexMatrix& m) {
    if (m.size() == 0)
        return Eigen::VectorXd(0);
    return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues();
}

/// Number of singular values above tol_rank * max(1, sigma_max). The absolute
/// floor keeps a roundoff-sized matrix at rank zero.
inline Index numerical_rank(const Eigen::VectorXd& sigma, double tol_rank) {
    if (sigma.size() == 0)
        return 0;
    const double cutoff = tol_rank * std::max(1.0, sigma(0));
    Index r = 0;
    while (r < sigma.size() && sigma(r) > cutoff)
        ++r;
    return r;
}

inline Index numerical_rank(const ComplexMatrix& m, double tol_rank = Tolerances{}.rank) {
    return numerical_rank(singular_values(m), tol_rank);
}

/// Orthonormal basis of the column space of m.
inline Subspace orthonormal_range(const ComplexMatrix& m, double tol_rank = Tolerances{}.rank) {
    require_finite(m, "orthonormal_range input");
    if (m.rows() == 0 || m.cols() == 0)
        return Subspace::zero(m.rows());
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU);
    const Index r = numerical_rank(svd.singularValues(), tol_rank);
    return Subspace(svd.matrixU().leftCols(r));
}

/// Orthonormal basis of ker(m); rank + nullity = cols.
inline Subspace null_space(const ComplexMatrix& m, double tol_rank = Tolerances{}.rank) {
    require_finite(m, "null_space input");
    if (m.rows() == 0 || m.cols() == 0)
        return Subspace::full(m.cols());
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
    const Index r = numerical_rank(svd.singularValues(), tol_rank);
    return Subspace(svd.matrixV().rightCols(m.cols() - r));
}

/// Spectral calculus: sum_i f(lambda_i) u_i u_i^*.
template <class F>
ComplexMatrix apply_function_normal(const SpectralDecomposition& d, F&& f,
                                    double overflow_guard = 1e13) {
    const Index n = d.eigenvalues.size();
    ComplexVector values(n);
    for (Index i = 0; i < n; ++i) {
        const Complex v = f(d.eigenvalues(i));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) > overflow_guard)
            throw Error(ErrorKind::SingularFunctionValue,
                        "function value at eigenvalue " + std::to_string(d.eigenvalues(i).real()) +
                            (d.eigenvalues(i).imag() < 0 ? "" : "+") +
                            std::to_string(d.eigenvalues(i).imag()) + "i exceeds guard");
        values(i) = v;
    }
    return d.eigenvectors * values.asDiagonal() * d.eigenvectors.adjoint();
}

/// Solves m x = b. Throws SingularMatrix when the reciprocal condition estimate
/// falls below tol_rank.
inline ComplexMatrix solve_linear(const ComplexMatrix& m, const ComplexMatrix& b,
                                  double tol_rank = Tolerances{}.rank) {
    require_square(m, "solve_linear matrix");
    if (b.rows() != m.rows())
        throw Error(ErrorKind::BadDimensions, "solve_linear right-hand side has wrong row count");
    if (m.rows() == 0)
        return b;
    Eigen::PartialPivLU<ComplexMatrix> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond >= tol_rank))
        throw Error(ErrorKind::SingularMatrix,
                    "matrix is numerically singular (rcond " + std::to_string(rcond) + ")");
    return lu.solve(b);
}

inline ComplexMatrix inverse(const ComplexMatrix& m, double tol_rank = Tolerances{}.rank) {
    return solve_linear(m, identity(m.rows()), tol_rank);
}

/// Orthogonal projection onto s.
inline ComplexMatrix projector(const Subspace& s) {
    return s.basis() * s.basis().adjoint();
}

/// Coordinates of P_S m P_S in the basis of s.
inline ComplexMatrix compress(const ComplexMatrix& m, const Subspace& s) {
    return s.basis().adjoint() * m * s.basis();
}

/// Smallest eigenvalue of a Hermitian matrix (+inf for empty input).
inline double min_eigenvalue(const ComplexMatrix& h, const Tolerances& tol = {}) {
    if (h.rows() == 0)
        return std::numeric_limits<double>::infinity();
    return hermitian_eig(h, tol).eigenvalues(0).real();
}

} // namespace krein
