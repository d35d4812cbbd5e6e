#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sigmak/eig.hpp"
#include "sigmak/residual.hpp"

namespace sigmak {

/// Linearization of the power-form residual at an iterate w. Everything the
/// operator application needs is cached per node:
///   - Qfield: (Q_{k-1})_{ij} = (T_{k-1})_{ij} + ((1-t)/(n-2)) tr(T_{k-1}) delta_{ij},
///     the second-order coefficient (times e^{-2phi});
///   - gradientCoeffs: the full first-order coefficient on the flat partials
///     of the direction, i.e. the (2-t)<dw,dphi~> g - 2 dw (x) dphi~ terms
///     contracted with T_{k-1}, plus the Christoffel part of Q : grad^2;
///   - zeroOrder: -2k rho^k e^{2kw}.
struct LinearizationState {
    int k = 0;
    double t = 0.0;
    ScalarField w;
    VectorField wGrad;
    TensorField barRaised;
    TensorField Tfield;
    TensorField Qfield;
    ScalarField zeroOrder;
    VectorField gradientCoeffs;
    ScalarField scale;  // e^{-2 phi}
    double coneMargin = 0.0;  // min over nodes of min_{j<=k} sigma_j(barRaised)

    /// Full linearized operator, second- and first-order terms included.
    [[nodiscard]] ScalarField apply(const ScalarField& direction) const {
        check_same_grid(direction.grid(), w.grid(), "LinearizationState::apply");
        const Grid& g = w.grid();
        const TensorField hess = hess_flat(direction);
        const VectorField dd = grad(direction);
        ScalarField out(g);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            double v = scale[i] * frobenius_product(Qfield[i], hess[i]);
            for (int a = 0; a < g.dim; ++a) v += gradientCoeffs.at(i, a) * dd.at(i, a);
            out[i] = v + zeroOrder[i] * direction[i];
        }
        return out;
    }
};

inline LinearizationState build_state(const ScalarField& w, const TensorField& Heff,
                                      const ScalarField& rho, const ProblemSpec& p) {
    if (p.sign != CaseSign::Negative)
        throw std::invalid_argument("build_state: linearization is provided for the negative case only");
    const Grid& g = p.bg.grid;
    const double c1 = (1.0 - p.bg.t) / static_cast<double>(g.dim - 2);

    LinearizationState st;
    st.k = p.k;
    st.t = p.bg.t;
    st.w = w;
    st.wGrad = grad(w);
    st.barRaised = bar_raised(w, Heff, p);
    st.Tfield = TensorField(g);
    st.Qfield = TensorField(g);
    st.zeroOrder = ScalarField(g);
    st.gradientCoeffs = VectorField(g);
    st.scale = p.bg.expNeg2phi;

    bool first = true;
    double wa[kMaxDim], tw[kMaxDim], qp[kMaxDim], pg[kMaxDim];
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const NewtonChain chain = newton_chain(st.barRaised[i]);
        const SymMatrix& T = chain.transform[static_cast<std::size_t>(p.k - 1)];
        st.Tfield[i] = T;
        const double trT = T.trace();
        SymMatrix Q = T;
        for (int a = 0; a < g.dim; ++a) Q(a, a) += c1 * trT;
        st.Qfield[i] = Q;

        const double margin = cone_margin(chain, p.k);
        if (first || margin < st.coneMargin) {
            st.coneMargin = margin;
            first = false;
        }

        st.zeroOrder[i] = -2.0 * p.k * std::pow(rho[i], p.k) * std::exp(2.0 * p.k * w[i]);

        // first-order coefficients on d_a(direction), Christoffels folded in:
        //   e^{-2phi} [ (2-t) tr(T) w_a - 2 (T w')_a - 2 (Q phi')_a + tr(Q) phi'_a ]
        const double trQ = Q.trace();
        for (int a = 0; a < g.dim; ++a) {
            wa[a] = st.wGrad.at(i, a);
            pg[a] = p.bg.phiGrad.at(i, a);
        }
        T.mat_vec(std::span<const double>(wa, static_cast<std::size_t>(g.dim)),
                  std::span<double>(tw, static_cast<std::size_t>(g.dim)));
        Q.mat_vec(std::span<const double>(pg, static_cast<std::size_t>(g.dim)),
                  std::span<double>(qp, static_cast<std::size_t>(g.dim)));
        for (int a = 0; a < g.dim; ++a)
            st.gradientCoeffs.at(i, a) =
                st.scale[i] * ((2.0 - p.bg.t) * trT * wa[a] - 2.0 * tw[a] - 2.0 * qp[a] + trQ * pg[a]);
    }
    return st;
}

struct EllipticityReport {
    double minQEigenvalue = 0.0;  // over all nodes
    double maxZeroOrder = 0.0;
    bool elliptic = false;
    bool zeroOrderNegative = false;
};

inline EllipticityReport ellipticity_certificate(const LinearizationState& st) {
    EllipticityReport rep;
    bool first = true;
    for (std::size_t i = 0; i < st.Qfield.size(); ++i) {
        const double mn = min_eigenvalue(st.Qfield[i]);
        const double z = st.zeroOrder[i];
        if (first) {
            rep.minQEigenvalue = mn;
            rep.maxZeroOrder = z;
            first = false;
        } else {
            rep.minQEigenvalue = std::min(rep.minQEigenvalue, mn);
            rep.maxZeroOrder = std::max(rep.maxZeroOrder, z);
        }
    }
    rep.elliptic = rep.minQEigenvalue > 0.0;
    rep.zeroOrderNegative = rep.maxZeroOrder < 0.0;
    return rep;
}

/// Column-by-column assembly of the operator for small grids; the dense
/// oracle behind the iterative solver and the invertibility certificate.
inline Eigen::MatrixXd dense_assemble(const LinearizationState& st) {
    const std::size_t n = st.w.grid().node_count();
    if (n > 4096) throw std::length_error("dense_assemble: grid too large (node count > 4096)");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    ScalarField e(st.w.grid());
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const ScalarField col = st.apply(e);
        for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
        e[j] = 0.0;
    }
    return m;
}

/// Diagonal of the operator: the center-node stencil weight
/// -2 sum_a e^{-2phi} Q_aa / h_a^2 plus the zeroth-order term. Strictly
/// negative whenever the state is elliptic, so usable as a preconditioner.
inline std::vector<double> operator_diagonal(const LinearizationState& st) {
    const Grid& g = st.w.grid();
    std::vector<double> d(g.node_count());
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double v = st.zeroOrder[i];
        for (int a = 0; a < g.dim; ++a) {
            const double h = g.spacing[static_cast<std::size_t>(a)];
            v -= 2.0 * st.scale[i] * st.Qfield[i](a, a) / (h * h);
        }
        d[i] = v;
    }
    return d;
}

}  // namespace sigmak
