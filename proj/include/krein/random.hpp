#pragma once

// Deterministic pseudo-random matrices. The engine is std::mt19937_64, whose
// output sequence is fixed by the standard; doubles are formed from the top 53
// bits so no implementation-defined distribution is involved.

#include <cstdint>
#include <random>

#include "krein/numerics.hpp"

namespace krein {

class SeededStream {
public:
    explicit SeededStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [-1, 1).
    double uniform() {
        const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return 2.0 * unit - 1.0;
    }

    Complex complex_uniform() {
        const double re = uniform();
        const double im = uniform();
        return {re, im};
    }

    ComplexMatrix complex_matrix(Index rows, Index cols) {
        ComplexMatrix m(rows, cols);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j)
                m(i, j) = complex_uniform();
        return m;
    }

    /// (G + G*)/2 for a random complex G.
    ComplexMatrix hermitian(Index n) {
        return real_part(complex_matrix(n, n));
    }

    /// Q factor of a random complex matrix, phases fixed so diag(R) > 0.
    ComplexMatrix unitary(Index n) {
        const ComplexMatrix g = complex_matrix(n, n);
        Eigen::HouseholderQR<ComplexMatrix> qr(g);
        ComplexMatrix q = qr.householderQ() * identity(n);
        const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Index j = 0; j < n; ++j) {
            const Complex d = r(j, j);
            if (std::abs(d) > 0.0)
                q.col(j) *= d / std::abs(d);
        }
        return q;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace krein
