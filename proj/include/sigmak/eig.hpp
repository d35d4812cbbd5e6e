#pragma once

#include <array>
#include <cmath>

#include "sigmak/symmat.hpp"

namespace sigmak {

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sweeping
/// until the off-diagonal Frobenius norm drops below `tol` (absolute).
/// Returned ascending in the first dim() slots.
inline std::array<double, kMaxDim> jacobi_eigenvalues(const SymMatrix& m, double tol = 1e-14) {
    const int n = m.dim();
    double a[kMaxDim][kMaxDim];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i][j] = m(i, j);

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += 2.0 * a[i][j] * a[i][j];
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 64 && off_norm() > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int l = 0; l < n; ++l) {
                    const double alp = a[l][p], alq = a[l][q];
                    a[l][p] = c * alp - s * alq;
                    a[l][q] = s * alp + c * alq;
                }
                for (int l = 0; l < n; ++l) {
                    const double apl = a[p][l], aql = a[q][l];
                    a[p][l] = c * apl - s * aql;
                    a[q][l] = s * apl + c * aql;
                }
            }
        }
    }

    std::array<double, kMaxDim> ev{};
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a[i][i];
    for (int i = 1; i < n; ++i) {  // insertion sort, n <= 6
        const double v = ev[static_cast<std::size_t>(i)];
        int j = i - 1;
        while (j >= 0 && ev[static_cast<std::size_t>(j)] > v) {
            ev[static_cast<std::size_t>(j + 1)] = ev[static_cast<std::size_t>(j)];
            --j;
        }
        ev[static_cast<std::size_t>(j + 1)] = v;
    }
    return ev;
}

inline double min_eigenvalue(const SymMatrix& m) { return jacobi_eigenvalues(m)[0]; }

inline double max_eigenvalue(const SymMatrix& m) {
    return jacobi_eigenvalues(m)[static_cast<std::size_t>(m.dim() - 1)];
}

}  // namespace sigmak
