#pragma once

// Closed-form deficiency-(1,1) example: -d^2/dx^2 on the half-line with the
// Dirichlet (Friedrichs) extension A1 as reference and the Robin family
//   g'(0) + c g(0) = 0,  c = 2^{-1/2} (1 - tan alpha2),
// as A2. Scalar M-functions, P(z), the rank-one resolvent coefficient, and a
// quadrature solver for the Dirichlet resolvent.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "krein/error.hpp"
#include "krein/krein.hpp"
#include "krein/report.hpp"

namespace krein::halfline {

inline constexpr double kBranchTolerance = 1e-12;
inline constexpr double kScalarSingularity = 1e-12;

class HalflineScenario {
public:
    explicit HalflineScenario(double alpha2, double branch_guard = 1e-8) : alpha2_(alpha2) {
        if (!std::isfinite(alpha2) || alpha2 < 0.0 || alpha2 >= std::numbers::pi)
            throw Error(ErrorKind::InvalidInput, "alpha2 must lie in [0, pi)");
        if (std::abs(alpha2 - 0.5 * std::numbers::pi) <= branch_guard)
            throw Error(ErrorKind::InvalidInput,
                        "alpha2 = pi/2 is the Friedrichs extension itself");
        c_ = (1.0 - std::tan(alpha2)) / std::numbers::sqrt2;
    }

    [[nodiscard]] double alpha2() const noexcept { return alpha2_; }
    /// Robin coefficient 2^{-1/2}(1 - tan alpha2).
    [[nodiscard]] double c() const noexcept { return c_; }
    [[nodiscard]] double tan_alpha2() const { return std::tan(alpha2_); }

private:
    double alpha2_;
    double c_;
};

/// Square root with Im > 0, cut along [0, inf).
inline Complex sqrt_upper(Complex z, double tol = kBranchTolerance) {
    if (std::abs(z.imag()) <= tol * (1.0 + std::abs(z)) && z.real() >= -tol)
        throw Error(ErrorKind::BranchCut, "z lies on [0, inf)");
    return kI * std::sqrt(-z);
}

/// M_{A1,N+}(z) = i sqrt(2z) + 1.
inline Complex m1_halfline(Complex z) {
    return kI * sqrt_upper(2.0 * z) + 1.0;
}

namespace detail {
inline Complex guarded_ratio(Complex num, Complex den, const char* what) {
    if (std::abs(den) <= kScalarSingularity * (1.0 + std::abs(num)))
        throw Error(ErrorKind::SingularDenominator, what);
    return num / den;
}
} // namespace detail

/// (cos a + sin a m1) / (sin a - cos a m1).
inline Complex m2_halfline(Complex z, const HalflineScenario& s) {
    const Complex m1 = m1_halfline(z);
    const double c = std::cos(s.alpha2());
    const double sn = std::sin(s.alpha2());
    return detail::guarded_ratio(c + sn * m1, sn - c * m1, "z is an eigenvalue of A2");
}

/// P(z) = -(1 - tan a + i sqrt(2z))^{-1}.
inline Complex p12_halfline(Complex z, const HalflineScenario& s) {
    const Complex den = 1.0 - s.tan_alpha2() + kI * sqrt_upper(2.0 * z);
    return -detail::guarded_ratio(1.0, den, "z is an eigenvalue of A2");
}

/// -(c + i sqrt(z))^{-1}, the coefficient of the rank-one resolvent difference.
/// Its pole at z = -c^2 (present for c > 0) is the Robin bound state.
inline Complex resolvent_coefficient(Complex z, const HalflineScenario& s) {
    const Complex den = s.c() + kI * sqrt_upper(z);
    return -detail::guarded_ratio(1.0, den, "z is the Robin bound state of A2");
}

enum class QuadratureScheme {
    Trapezoid,          ///< plain composite trapezoid, O(h^2)
    CorrectedTrapezoid, ///< trapezoid plus the leading Euler-Maclaurin end correction, O(h^4)
};

struct GridSpec {
    double length = 40.0;
    Index nodes = 4000;
    QuadratureScheme scheme = QuadratureScheme::CorrectedTrapezoid;
    double tolerance = 1e-6; ///< bound on the relative ODE residual

    [[nodiscard]] double step() const { return length / static_cast<double>(nodes - 1); }
    [[nodiscard]] double node(Index j) const { return static_cast<double>(j) * step(); }
};

struct QuadratureResult {
    std::vector<double> x;
    std::vector<Complex> u;
    double residual = 0.0; ///< max |-u'' - z u - f| / max |f| over interior nodes
};

/// Relative residual of -u'' - z u = f using a fourth-order difference stencil.
inline double ode_residual(const std::vector<Complex>& u, const std::vector<Complex>& f, Complex z,
                           double h) {
    double fmax = 0.0;
    for (const Complex& v : f)
        fmax = std::max(fmax, std::abs(v));
    double worst = 0.0;
    const std::size_t n = u.size();
    for (std::size_t j = 2; j + 2 < n; ++j) {
        const Complex upp = (-u[j - 2] + 16.0 * u[j - 1] - 30.0 * u[j] + 16.0 * u[j + 1] - u[j + 2]) /
                            (12.0 * h * h);
        worst = std::max(worst, std::abs(-upp - z * u[j] - f[j]));
    }
    return fmax > 0.0 ? worst / fmax : worst;
}

/// Solves -u'' - z u = f on [0, L] with u(0) = 0 and outgoing decay, by
/// convolution with the Dirichlet Green's function
///   G(x, y) = sin(k min(x,y)) e^{i k max(x,y)} / k,  k = sqrt_upper(z).
inline QuadratureResult dirichlet_resolvent_quadrature(const std::vector<Complex>& f, Complex z,
                                                       const GridSpec& grid = {}) {
    if (grid.nodes < 5 || !(grid.length > 0.0))
        throw Error(ErrorKind::InvalidInput, "grid needs at least 5 nodes and positive length");
    if (static_cast<Index>(f.size()) != grid.nodes)
        throw Error(ErrorKind::BadDimensions, "samples do not match the grid");
    const Complex k = sqrt_upper(z);
    const double h = grid.step();
    const std::size_t n = f.size();

    std::vector<double> x(n);
    std::vector<Complex> sin_kx(n);
    std::vector<Complex> exp_kx(n);
    for (std::size_t j = 0; j < n; ++j) {
        x[j] = grid.node(static_cast<Index>(j));
        sin_kx[j] = std::sin(k * x[j]);
        exp_kx[j] = std::exp(kI * k * x[j]);
    }

    // inner[j] = int_0^{x_j} sin(ky) f(y) dy, outer[j] = int_{x_j}^{L} e^{iky} f(y) dy
    std::vector<Complex> inner(n, 0.0);
    std::vector<Complex> outer(n, 0.0);
    for (std::size_t j = 1; j < n; ++j)
        inner[j] = inner[j - 1] + 0.5 * h * (sin_kx[j - 1] * f[j - 1] + sin_kx[j] * f[j]);
    for (std::size_t j = n - 1; j-- > 0;)
        outer[j] = outer[j + 1] + 0.5 * h * (exp_kx[j] * f[j] + exp_kx[j + 1] * f[j + 1]);

    QuadratureResult out;
    out.x = x;
    out.u.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        Complex u = (exp_kx[j] * inner[j] + sin_kx[j] * outer[j]) / k;
        if (grid.scheme == QuadratureScheme::CorrectedTrapezoid)
            u -= (h * h / 12.0) * (f[j] - exp_kx[j] * f[0]);
        out.u[j] = u;
    }
    out.residual = ode_residual(out.u, f, z, h);
    if (!(out.residual <= grid.tolerance))
        throw Error(ErrorKind::GridTooCoarse,
                    "ODE residual " + std::to_string(out.residual) + " exceeds tolerance");
    return out;
}

inline QuadratureResult dirichlet_resolvent_quadrature(const std::function<Complex(double)>& f,
                                                       Complex z, const GridSpec& grid = {}) {
    std::vector<Complex> samples(static_cast<std::size_t>(std::max<Index>(grid.nodes, 0)));
    for (std::size_t j = 0; j < samples.size(); ++j)
        samples[j] = f(grid.node(static_cast<Index>(j)));
    return dirichlet_resolvent_quadrature(samples, z, grid);
}

/// Residuals of the closed-form identities at one (z, alpha2) point.
struct HalflineRow {
    Complex z;
    double alpha2 = 0.0;
    double lft = 0.0;            ///< displayed M2 vs angle form and P(i) form
    double p_inverse_weyl = 0.0; ///< |P(z)(tan a - M1(z)) - 1|
    double p_at_i = 0.0;         ///< |P(i)^{-1} - (tan a - i)|
    double angle_recovery = 0.0; ///< alpha recovered from P(i) vs alpha2 mod pi
    double herglotz = 0.0;       ///< violation of positivity and of the normalized lower bound
};

inline HalflineRow evaluate_row(Complex z, const HalflineScenario& s) {
    HalflineRow row{z, s.alpha2()};
    const double a = s.alpha2();
    const double ta = s.tan_alpha2();
    const Complex m1 = m1_halfline(z);
    const Complex m2 = m2_halfline(z, s);
    const Complex p = p12_halfline(z, s);
    const Complex p_i = p12_halfline(kI, s);

    const Complex angle_form = std::exp(-kI * a) *
                               detail::guarded_ratio(std::cos(a) + std::sin(a) * m1,
                                                     std::sin(a) - std::cos(a) * m1, "angle form") *
                               std::exp(kI * a);
    const Complex cayley_form =
        detail::guarded_ratio(p_i + (1.0 + kI * p_i) * m1, (1.0 + kI * p_i) - p_i * m1, "P(i) form");
    row.lft = std::max(std::abs(m2 - angle_form), std::abs(m2 - cayley_form)) / (1.0 + std::abs(m2));

    row.p_inverse_weyl = std::abs(p * (ta - m1) - 1.0);
    row.p_at_i = std::abs(1.0 / p_i - (ta - kI)) / (1.0 + std::abs(ta));

    const Complex tan_recovered = 1.0 / p_i + kI;
    const double alpha_recovered = std::atan(tan_recovered.real());
    row.angle_recovery = std::abs(tan_recovered.imag()) / (1.0 + std::abs(ta)) +
                         std::abs(std::remainder(alpha_recovered - a, std::numbers::pi));

    if (z.imag() != 0.0) {
        const double bound = herglotz_lower_bound(z);
        double violation = 0.0;
        violation = std::max(violation, -z.imag() * m1.imag());
        violation = std::max(violation, -z.imag() * m2.imag());
        violation = std::max(violation, bound - m1.imag() / z.imag());
        violation = std::max(violation, bound - m2.imag() / z.imag());
        row.herglotz = std::max(violation, 0.0);
    }
    return row;
}

inline std::vector<Complex> default_z_grid() {
    return {kI, {0, 2}, {-1, 0}, {-1, 1}, {1, 1}, {0, -3}, {2, -2}, {-4, 3}};
}

inline std::vector<double> default_alpha_grid() {
    return {0.0, 0.3, std::numbers::pi / 4, 1.2, 1.8, 2.2, 2.5, 3.0};
}

/// Runs every closed-form identity over the grid; errors become failed checks.
inline std::vector<CheckRecord> verify_halfline(const std::vector<Complex>& z_grid,
                                                const std::vector<double>& alpha_grid,
                                                double tol = 1e-10) {
    ReportBuilder builder(tol);
    const char* names[] = {"halfline.angle_recovery", "halfline.herglotz", "halfline.p_inverse_weyl",
                           "halfline.lft", "halfline.p_at_i"};
    for (const char* name : names)
        builder.record(name, 0.0);
    for (double a : alpha_grid) {
        for (Complex z : z_grid) {
            try {
                const HalflineScenario s(a);
                const HalflineRow row = evaluate_row(z, s);
                builder.record("halfline.lft", row.lft);
                builder.record("halfline.p_inverse_weyl", row.p_inverse_weyl);
                builder.record("halfline.p_at_i", row.p_at_i);
                builder.record("halfline.angle_recovery", row.angle_recovery);
                builder.record("halfline.herglotz", row.herglotz);
            } catch (const Error& e) {
                for (const char* name : names)
                    builder.fail(name, e);
            }
        }
    }
    return builder.finish();
}

} // namespace krein::halfline
