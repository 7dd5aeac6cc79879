#pragma once

#include <vector>

#include "woa/errors.hpp"

namespace woa {

// Thomas algorithm with partial scaling check; rows may be pure Dirichlet
// (diag 1, off-diagonals 0).  Throws SingularSystem on breakdown.
inline std::vector<double> solve_tridiagonal(std::vector<double> lower,
                                             std::vector<double> diag,
                                             std::vector<double> upper,
                                             std::vector<double> rhs) {
    const size_t n = diag.size();
    for (size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0) fail("SingularSystem", "zero pivot in tridiagonal solve");
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0) fail("SingularSystem", "zero pivot in tridiagonal solve");
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (size_t i = n - 1; i-- > 0;) {
        x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    }
    return x;
}

} // namespace woa
