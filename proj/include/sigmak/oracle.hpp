#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sigmak/eig.hpp"
#include "sigmak/symfun.hpp"
#include "sigmak/symmat.hpp"

// Brute-force reference implementations. Everything here is deliberately
// independent of the fast characteristic-polynomial path in symfun.hpp:
// sigma comes from an eigendecomposition plus explicit subset sums, and the
// Newton transformation from the generalized Kronecker delta evaluated by
// permutation enumeration.
namespace sigmak::oracle {

/// sigma_k as the explicit sum of k-fold eigenvalue products.
inline double sigma_eig(const SymMatrix& a, int k) {
    const int n = a.dim();
    detail::check_order(n, k, "sigma_eig");
    if (k == 0) return 1.0;
    const auto ev = jacobi_eigenvalues(a);
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != k) continue;
        double prod = 1.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) prod *= ev[static_cast<std::size_t>(i)];
        total += prod;
    }
    return total;
}

namespace delta_detail {

// Generalized Kronecker delta by literal permutation enumeration:
// sum over pi in S_m of sgn(pi) prod_a delta(upper[a], lower[pi(a)]).
inline double generalized_delta(const int* upper, const int* lower, int m) {
    std::array<int, kMaxDim> perm{};
    std::iota(perm.begin(), perm.begin() + m, 0);
    double total = 0.0;
    do {
        int inversions = 0;
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b)
                if (perm[static_cast<std::size_t>(a)] > perm[static_cast<std::size_t>(b)]) ++inversions;
        double prod = (inversions % 2 == 0) ? 1.0 : -1.0;
        for (int a = 0; a < m && prod != 0.0; ++a)
            if (upper[a] != lower[perm[static_cast<std::size_t>(a)]]) prod = 0.0;
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.begin() + m));
    return total;
}

inline bool advance_tuple(std::array<int, kMaxDim>& t, int q, int n) {
    for (int p = 0; p < q; ++p) {
        if (++t[static_cast<std::size_t>(p)] < n) return true;
        t[static_cast<std::size_t>(p)] = 0;
    }
    return false;
}

inline bool has_duplicate_or(const std::array<int, kMaxDim>& t, int q, int extra) {
    for (int a = 0; a < q; ++a) {
        if (t[static_cast<std::size_t>(a)] == extra) return true;
        for (int b = a + 1; b < q; ++b)
            if (t[static_cast<std::size_t>(a)] == t[static_cast<std::size_t>(b)]) return true;
    }
    return false;
}

inline bool same_index_set(const std::array<int, kMaxDim>& s, int i,
                           const std::array<int, kMaxDim>& t, int j, int q) {
    unsigned ms = 1u << i, mt = 1u << j;
    for (int a = 0; a < q; ++a) {
        ms |= 1u << s[static_cast<std::size_t>(a)];
        mt |= 1u << t[static_cast<std::size_t>(a)];
    }
    return ms == mt;
}

}  // namespace delta_detail

/// T_q(A)^i_j = (1/q!) delta^{i1..iq i}_{j1..jq j} A_{i1}^{j1} ... A_{iq}^{jq},
/// summed over all index tuples. Factorial cost; guarded to n <= 5.
inline SymMatrix newton_delta(const SymMatrix& a, int q) {
    using namespace delta_detail;
    const int n = a.dim();
    detail::check_order(n, q, "newton_delta");
    if (n > 5) throw std::domain_error("newton_delta: guarded to dim <= 5");
    SymMatrix result(n);
    if (q == 0) return SymMatrix::identity(n);

    double qfact = 1.0;
    for (int p = 2; p <= q; ++p) qfact *= p;

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j < i) continue;  // symmetric output, fill upper triangle
            double entry = 0.0;
            std::array<int, kMaxDim> iu{};
            do {
                // terms with a repeated upper index vanish by antisymmetry
                if (has_duplicate_or(iu, q, i)) continue;
                std::array<int, kMaxDim> jl{};
                do {
                    if (has_duplicate_or(jl, q, j)) continue;
                    if (!same_index_set(iu, i, jl, j, q)) continue;
                    int upper[kMaxDim], lower[kMaxDim];
                    for (int a2 = 0; a2 < q; ++a2) {
                        upper[a2] = iu[static_cast<std::size_t>(a2)];
                        lower[a2] = jl[static_cast<std::size_t>(a2)];
                    }
                    upper[q] = i;
                    lower[q] = j;
                    const double d = generalized_delta(upper, lower, q + 1);
                    if (d == 0.0) continue;
                    double prod = 1.0;
                    for (int a2 = 0; a2 < q; ++a2)
                        prod *= a(iu[static_cast<std::size_t>(a2)], jl[static_cast<std::size_t>(a2)]);
                    entry += d * prod;
                } while (advance_tuple(jl, q, n));
            } while (advance_tuple(iu, q, n));
            result(i, j) = entry / qfact;
        }
    }
    return result;
}

/// Exact coefficients of a polynomial g of known degree from degree+1
/// samples, by Gaussian elimination on the Vandermonde system. Reconstructs
/// h |-> sigma_k(A + hB) exactly, which pins down both the directional
/// derivative (coefficient 1) and the full truncation error of any central
/// difference.
inline std::vector<double> polynomial_from_samples(const std::function<double(double)>& g, int degree) {
    const int m = degree + 1;
    std::vector<std::vector<double>> a(static_cast<std::size_t>(m),
                                       std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
    for (int r = 0; r < m; ++r) {
        const double h = -0.5 * degree + r;  // integer-spaced nodes centered at 0
        double p = 1.0;
        for (int c = 0; c < m; ++c) {
            a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = p;
            p *= h;
        }
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(m)] = g(h);
    }
    for (int col = 0; col < m; ++col) {  // partial pivoting
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                std::abs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
                piv = r;
        std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(piv)]);
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                             a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
            for (int c = col; c <= m; ++c)
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
        }
    }
    std::vector<double> coeff(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r)
        coeff[static_cast<std::size_t>(r)] = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(m)] /
                                             a[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
    return coeff;
}

}  // namespace sigmak::oracle
