#pragma once

#include <array>
#include <cmath>
#include <random>

#include "sigmak/symfun.hpp"
#include "sigmak/symmat.hpp"

// Deterministic random inputs for the property suites. All draws go through a
// caller-owned mt19937_64 so a fixed seed reproduces every sample exactly.
namespace sigmak {

using Rng = std::mt19937_64;

inline SymMatrix random_symmetric(Rng& rng, int n, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    SymMatrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a(i, j) = dist(rng);
    return a;
}

/// Conjugate by a plane rotation in coordinates (p,q): A <- R A R^T.
inline SymMatrix rotate_plane(const SymMatrix& a, int p, int q, double angle) {
    const int n = a.dim();
    const double c = std::cos(angle), s = std::sin(angle);
    double full[kMaxDim][kMaxDim];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) full[i][j] = a(i, j);
    for (int j = 0; j < n; ++j) {  // rows p,q of R A
        const double rp = c * full[p][j] - s * full[q][j];
        const double rq = s * full[p][j] + c * full[q][j];
        full[p][j] = rp;
        full[q][j] = rq;
    }
    for (int i = 0; i < n; ++i) {  // columns p,q of (R A) R^T
        const double cp = c * full[i][p] - s * full[i][q];
        const double cq = s * full[i][p] + c * full[i][q];
        full[i][p] = cp;
        full[i][q] = cq;
    }
    SymMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) r(i, j) = 0.5 * (full[i][j] + full[j][i]);
    return r;
}

inline SymMatrix random_rotation_of(Rng& rng, SymMatrix a) {
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    const int n = a.dim();
    for (int p = 0; p < n - 1; ++p)
        for (int q = p + 1; q < n; ++q) a = rotate_plane(a, p, q, angle(rng));
    return a;
}

inline SymMatrix from_eigenvalues(Rng& rng, std::span<const double> lambda) {
    return random_rotation_of(rng, SymMatrix::diagonal(lambda));
}

/// Elementary symmetric polynomials of a list of reals (recurrence, exact).
inline std::array<double, kMaxDim + 1> esp_of(std::span<const double> lambda) {
    std::array<double, kMaxDim + 1> e{};
    e[0] = 1.0;
    int m = 0;
    for (double l : lambda) {
        ++m;
        for (int j = m; j >= 1; --j) e[static_cast<std::size_t>(j)] += l * e[static_cast<std::size_t>(j - 1)];
    }
    return e;
}

inline SymMatrix random_positive_semidefinite(Rng& rng, int n, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(0.0, scale);
    std::array<double, kMaxDim> lambda{};
    for (int i = 0; i < n; ++i) lambda[static_cast<std::size_t>(i)] = dist(rng);
    return from_eigenvalues(rng, std::span<const double>(lambda.data(), static_cast<std::size_t>(n)));
}

/// Random element of the positive cone of order k. Half of the draws are
/// positive definite; the rest are rejection-sampled spectra with some
/// negative eigenvalues, exercising the cone away from the definite core.
inline SymMatrix random_cone_sample(Rng& rng, int n, int k, bool positive = true) {
    std::uniform_real_distribution<double> pd(0.05, 2.0);
    std::uniform_real_distribution<double> wide(-1.5, 2.5);
    std::uniform_int_distribution<int> coin(0, 1);
    std::array<double, kMaxDim> lambda{};
    const bool try_indefinite = (k < n) && coin(rng) == 1;
    bool found = false;
    if (try_indefinite) {
        for (int attempt = 0; attempt < 200 && !found; ++attempt) {
            for (int i = 0; i < n; ++i) lambda[static_cast<std::size_t>(i)] = wide(rng);
            const auto e = esp_of(std::span<const double>(lambda.data(), static_cast<std::size_t>(n)));
            found = true;
            for (int j = 1; j <= k; ++j)
                if (!(e[static_cast<std::size_t>(j)] > 1e-6)) found = false;
        }
    }
    if (!found)
        for (int i = 0; i < n; ++i) lambda[static_cast<std::size_t>(i)] = pd(rng);
    if (!positive)
        for (int i = 0; i < n; ++i) lambda[static_cast<std::size_t>(i)] = -lambda[static_cast<std::size_t>(i)];
    return from_eigenvalues(rng, std::span<const double>(lambda.data(), static_cast<std::size_t>(n)));
}

}  // namespace sigmak
