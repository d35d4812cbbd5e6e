#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace sigmak {

struct KrylovResult {
    bool converged = false;
    int iterations = 0;
    double relResidual = 0.0;
};

/// Restarted GMRES with diagonal left preconditioning, matrix-free.
/// `matvec(x, y)` computes y = A x; `invDiag` holds 1/diag(A). Nonsymmetric-
/// safe (the linearized operator carries first-order terms). Solves to a
/// relative tolerance in the preconditioned residual norm; `x` is both the
/// initial guess and the result.
template <class MatVec>
KrylovResult gmres(const MatVec& matvec, std::span<const double> b, std::span<double> x,
                   std::span<const double> invDiag, double rtol, int restart, int maxIter) {
    const std::size_t n = b.size();
    const int m = restart;
    std::vector<std::vector<double>> basis(static_cast<std::size_t>(m + 1), std::vector<double>(n));
    std::vector<double> h(static_cast<std::size_t>((m + 1) * m), 0.0);
    std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m));
    std::vector<double> gvec(static_cast<std::size_t>(m + 1));
    std::vector<double> scratch(n), precon(n);

    auto hat = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(i * m + j)]; };
    auto norm = [&](std::span<const double> v) {
        double s = 0.0;
        for (double vi : v) s += vi * vi;
        return std::sqrt(s);
    };

    // preconditioned initial residual: M^{-1}(b - A x)
    matvec(x, std::span<double>(scratch));
    for (std::size_t i = 0; i < n; ++i) precon[i] = (b[i] - scratch[i]) * invDiag[i];
    double beta0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double bi = b[i] * invDiag[i];
        beta0 += bi * bi;
    }
    beta0 = std::sqrt(beta0);
    if (beta0 == 0.0) beta0 = 1.0;

    KrylovResult result;
    double beta = norm(precon);
    result.relResidual = beta / beta0;
    if (result.relResidual <= rtol) {
        result.converged = true;
        return result;
    }

    int total = 0;
    while (total < maxIter) {
        for (std::size_t i = 0; i < n; ++i) basis[0][i] = precon[i] / beta;
        gvec.assign(gvec.size(), 0.0);
        gvec[0] = beta;

        int j = 0;
        for (; j < m && total < maxIter; ++j, ++total) {
            matvec(std::span<const double>(basis[static_cast<std::size_t>(j)]), std::span<double>(scratch));
            for (std::size_t i = 0; i < n; ++i) scratch[i] *= invDiag[i];
            // modified Gram-Schmidt
            for (int r = 0; r <= j; ++r) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += scratch[i] * basis[static_cast<std::size_t>(r)][i];
                hat(r, j) = dot;
                for (std::size_t i = 0; i < n; ++i) scratch[i] -= dot * basis[static_cast<std::size_t>(r)][i];
            }
            const double hnext = norm(scratch);
            hat(j + 1, j) = hnext;
            if (hnext > 0.0)
                for (std::size_t i = 0; i < n; ++i) basis[static_cast<std::size_t>(j + 1)][i] = scratch[i] / hnext;

            // apply accumulated Givens rotations, then the new one
            for (int r = 0; r < j; ++r) {
                const double t = cs[static_cast<std::size_t>(r)] * hat(r, j) + sn[static_cast<std::size_t>(r)] * hat(r + 1, j);
                hat(r + 1, j) = -sn[static_cast<std::size_t>(r)] * hat(r, j) + cs[static_cast<std::size_t>(r)] * hat(r + 1, j);
                hat(r, j) = t;
            }
            const double denom = std::hypot(hat(j, j), hat(j + 1, j));
            cs[static_cast<std::size_t>(j)] = denom == 0.0 ? 1.0 : hat(j, j) / denom;
            sn[static_cast<std::size_t>(j)] = denom == 0.0 ? 0.0 : hat(j + 1, j) / denom;
            hat(j, j) = denom;
            hat(j + 1, j) = 0.0;
            gvec[static_cast<std::size_t>(j + 1)] = -sn[static_cast<std::size_t>(j)] * gvec[static_cast<std::size_t>(j)];
            gvec[static_cast<std::size_t>(j)] = cs[static_cast<std::size_t>(j)] * gvec[static_cast<std::size_t>(j)];

            result.relResidual = std::abs(gvec[static_cast<std::size_t>(j + 1)]) / beta0;
            if (result.relResidual <= rtol || hnext == 0.0) {
                ++j;
                break;
            }
        }

        // back-substitute and update x
        std::vector<double> y(static_cast<std::size_t>(j));
        for (int r = j - 1; r >= 0; --r) {
            double s = gvec[static_cast<std::size_t>(r)];
            for (int c = r + 1; c < j; ++c) s -= hat(r, c) * y[static_cast<std::size_t>(c)];
            y[static_cast<std::size_t>(r)] = s / hat(r, r);
        }
        for (int r = 0; r < j; ++r)
            for (std::size_t i = 0; i < n; ++i) x[i] += y[static_cast<std::size_t>(r)] * basis[static_cast<std::size_t>(r)][i];

        matvec(x, std::span<double>(scratch));
        for (std::size_t i = 0; i < n; ++i) precon[i] = (b[i] - scratch[i]) * invDiag[i];
        beta = norm(precon);
        result.relResidual = beta / beta0;
        result.iterations = total;
        if (result.relResidual <= rtol) {
            result.converged = true;
            return result;
        }
    }
    result.iterations = total;
    result.converged = result.relResidual <= rtol;
    return result;
}

}  // namespace sigmak
