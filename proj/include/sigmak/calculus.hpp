#pragma once

#include "sigmak/grid.hpp"
#include "sigmak/symmat.hpp"

namespace sigmak {

/// Centered second-order gradient with periodic wrap:
/// (u_{i+1} - u_{i-1}) / (2 h) per axis.
inline VectorField grad(const ScalarField& u) {
    const Grid& g = u.grid();
    VectorField out(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        for (int a = 0; a < g.dim; ++a) {
            const double up = u[g.neighbor(i, a, +1)];
            const double dn = u[g.neighbor(i, a, -1)];
            out.at(i, a) = (up - dn) / (2.0 * g.spacing[static_cast<std::size_t>(a)]);
        }
    }
    return out;
}

/// Coordinate Hessian: second differences on the diagonal, centered cross
/// differences off it. The flat Laplacian used everywhere else is the trace
/// of this stencil; there is no second Laplacian implementation.
inline TensorField hess_flat(const ScalarField& u) {
    const Grid& g = u.grid();
    TensorField out(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        SymMatrix& h = out[i];
        for (int a = 0; a < g.dim; ++a) {
            const double ha = g.spacing[static_cast<std::size_t>(a)];
            h(a, a) = (u[g.neighbor(i, a, +1)] - 2.0 * u[i] + u[g.neighbor(i, a, -1)]) / (ha * ha);
            for (int b = a + 1; b < g.dim; ++b) {
                const double hb = g.spacing[static_cast<std::size_t>(b)];
                const std::size_t pp = g.neighbor(g.neighbor(i, a, +1), b, +1);
                const std::size_t pm = g.neighbor(g.neighbor(i, a, +1), b, -1);
                const std::size_t mp = g.neighbor(g.neighbor(i, a, -1), b, +1);
                const std::size_t mm = g.neighbor(g.neighbor(i, a, -1), b, -1);
                h(a, b) = (u[pp] - u[pm] - u[mp] + u[mm]) / (4.0 * ha * hb);
            }
        }
    }
    return out;
}

}  // namespace sigmak
