#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "sigmak/calculus.hpp"
#include "sigmak/grid.hpp"
#include "sigmak/symmat.hpp"

namespace sigmak {

/// Conformally flat background geometry g = e^{2 phi} * delta on the torus,
/// together with the Schouten-role tensor S (lower indices) and the curvature
/// parameter t <= 1. Gradient of phi and the conformal factors are cached at
/// construction; fields are immutable afterwards.
struct Background {
    Grid grid;
    ScalarField phi;
    TensorField S;
    double t = 0.0;
    double coneMargin = 0.0;

    VectorField phiGrad;
    ScalarField exp2phi;
    ScalarField expNeg2phi;

    Background() = default;

    Background(Grid g, ScalarField phiIn, TensorField SIn, double tIn, double margin = 0.0)
        : grid(g), phi(std::move(phiIn)), S(std::move(SIn)), t(tIn), coneMargin(margin) {
        check_same_grid(grid, phi.grid(), "Background(phi)");
        check_same_grid(grid, S.grid(), "Background(S)");
        if (!(t <= 1.0)) throw std::invalid_argument("Background: t must satisfy t <= 1");
        if (!(coneMargin >= 0.0)) throw std::invalid_argument("Background: coneMargin must be >= 0");
        phiGrad = grad(phi);
        exp2phi = ScalarField(grid);
        expNeg2phi = ScalarField(grid);
        for (std::size_t i = 0; i < grid.node_count(); ++i) {
            exp2phi[i] = std::exp(2.0 * phi[i]);
            expNeg2phi[i] = std::exp(-2.0 * phi[i]);
        }
    }

    static Background flat(const Grid& g, double t, double margin = 0.0) {
        return Background(g, ScalarField(g), TensorField(g), t, margin);
    }
};

/// g_{ab} = e^{2 phi} delta_{ab} as a tensor field.
inline TensorField metric_tensor(const Background& bg) {
    TensorField out(bg.grid);
    for (std::size_t i = 0; i < bg.grid.node_count(); ++i)
        for (int a = 0; a < bg.grid.dim; ++a) out[i](a, a) = bg.exp2phi[i];
    return out;
}

/// Covariant Hessian of a scalar for the conformal metric:
/// (grad^2 u)_{ab} = d_a d_b u - Gamma^l_{ab} d_l u with
/// Gamma^l_{ab} = delta_a^l phi_b + delta_b^l phi_a - delta_{ab} phi_l.
inline TensorField covariant_hessian(const ScalarField& u, const Background& bg) {
    check_same_grid(u.grid(), bg.grid, "covariant_hessian");
    const Grid& g = bg.grid;
    TensorField out = hess_flat(u);
    const VectorField du = grad(u);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double dot = 0.0;
        for (int l = 0; l < g.dim; ++l) dot += bg.phiGrad.at(i, l) * du.at(i, l);
        for (int a = 0; a < g.dim; ++a) {
            out[i](a, a) -= 2.0 * bg.phiGrad.at(i, a) * du.at(i, a) - dot;
            for (int b = a + 1; b < g.dim; ++b)
                out[i](a, b) -= bg.phiGrad.at(i, a) * du.at(i, b) + bg.phiGrad.at(i, b) * du.at(i, a);
        }
    }
    return out;
}

/// Schouten-role tensor of the conformally flat metric e^{2 phi} delta,
/// from the transformation law applied to the flat base (all operators flat):
/// A = -hess(phi) - ((1-t)/(n-2)) lap(phi) I + dphi (x) dphi - ((2-t)/2) |dphi|^2 I.
inline TensorField schouten_from_phi(const ScalarField& phi, double t) {
    const Grid& g = phi.grid();
    const double c1 = (1.0 - t) / static_cast<double>(g.dim - 2);
    const double c2 = 0.5 * (2.0 - t);
    TensorField out(g);
    const TensorField hess = hess_flat(phi);
    const VectorField dphi = grad(phi);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double lap = 0.0, grad2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            lap += hess[i](a, a);
            grad2 += dphi.at(i, a) * dphi.at(i, a);
        }
        SymMatrix m = -hess[i] + outer(dphi.node_span(i));
        const double diag = -c1 * lap - c2 * grad2;
        for (int a = 0; a < g.dim; ++a) m(a, a) += diag;
        out[i] = m;
    }
    return out;
}

/// Full transformation under the conformal change e^{2w} g: covariant
/// operators of bg, lower indices. The e^{2phi} factors in (lap_g w) g and
/// |grad w|_g^2 g cancel exactly and are folded out.
inline TensorField transform_schouten(const TensorField& S, const ScalarField& w, const Background& bg) {
    check_same_grid(S.grid(), bg.grid, "transform_schouten(S)");
    check_same_grid(w.grid(), bg.grid, "transform_schouten(w)");
    const Grid& g = bg.grid;
    const double c1 = (1.0 - bg.t) / static_cast<double>(g.dim - 2);
    const double c2 = 0.5 * (2.0 - bg.t);
    const TensorField hess = covariant_hessian(w, bg);
    const VectorField dw = grad(w);
    TensorField out(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double lapFlat = 0.0, grad2Flat = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            lapFlat += hess[i](a, a);
            grad2Flat += dw.at(i, a) * dw.at(i, a);
        }
        SymMatrix m = S[i] - hess[i] + outer(dw.node_span(i));
        const double diag = -c1 * lapFlat - c2 * grad2Flat;
        for (int a = 0; a < g.dim; ++a) m(a, a) += diag;
        out[i] = m;
    }
    return out;
}

/// e^{-2 phi} T per node: one index raised with the inverse metric.
inline TensorField raise_index(const TensorField& T, const Background& bg) {
    check_same_grid(T.grid(), bg.grid, "raise_index");
    TensorField out = T;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bg.expNeg2phi[i];
    return out;
}

}  // namespace sigmak
