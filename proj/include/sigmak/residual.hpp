#pragma once

#include <cmath>
#include <sstream>

#include "sigmak/calculus.hpp"
#include "sigmak/conformal.hpp"
#include "sigmak/problem.hpp"
#include "sigmak/symfun.hpp"

namespace sigmak {

/// The augmented Hessian whose sigma_k the equation constrains (lower
/// indices, covariant operators of the background):
///     grad^2 w + c1 (lap_g w) g + c2 |grad w|_g^2 g - dw (x) dw - S_eff
/// with c1 = (1-t)/(n-2), c2 = (2-t)/2. In the positive case the two
/// gradient terms flip sign and S_eff enters with +. The conformal factors
/// in the (lap_g w) g and |grad w|_g^2 g products cancel and are folded out.
inline TensorField bar_hessian(const ScalarField& w, const TensorField& S_eff, const ProblemSpec& p) {
    const Grid& g = p.bg.grid;
    check_same_grid(w.grid(), g, "bar_hessian(w)");
    check_same_grid(S_eff.grid(), g, "bar_hessian(S_eff)");
    const double c1 = (1.0 - p.bg.t) / static_cast<double>(g.dim - 2);
    const double c2 = 0.5 * (2.0 - p.bg.t);
    const double flip = (p.sign == CaseSign::Negative) ? 1.0 : -1.0;

    const TensorField hess = covariant_hessian(w, p.bg);
    const VectorField dw = grad(w);
    TensorField out(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double lapFlat = 0.0, grad2Flat = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            lapFlat += hess[i](a, a);
            grad2Flat += dw.at(i, a) * dw.at(i, a);
        }
        SymMatrix m = hess[i] - flip * outer(dw.node_span(i)) - flip * S_eff[i];
        const double diag = c1 * lapFlat + flip * c2 * grad2Flat;
        for (int a = 0; a < g.dim; ++a) m(a, a) += diag;
        out[i] = m;
    }
    return out;
}

/// Raised augmented Hessian, the matrix sigma_k acts on.
inline TensorField bar_raised(const ScalarField& w, const TensorField& S_eff, const ProblemSpec& p) {
    return raise_index(bar_hessian(w, S_eff, p), p.bg);
}

namespace detail {
/// Exponent of the conformal factor on the right-hand side: e^{2kw} in the
/// negative case, e^{-2kw} in the positive one (the change of metric there
/// is e^{-2w} g, which conjugates the factor).
inline double rhs_exponent_sign(CaseSign sign) {
    return sign == CaseSign::Negative ? 1.0 : -1.0;
}
}  // namespace detail

/// Power-form residual from an already-raised bar tensor.
inline ScalarField residual_power_from_raised(const TensorField& b, const ScalarField& w,
                                              const ScalarField& rho, const ProblemSpec& p) {
    const double es = detail::rhs_exponent_sign(p.sign);
    const int k = p.k;
    ScalarField r(p.bg.grid);
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double rhs = std::pow(rho[i], k) * std::exp(es * 2.0 * k * w[i]);
        r[i] = sigma(b[i], k) - rhs;
    }
    return r;
}

/// Power-form residual sigma_k(raised bar) - rho^k e^{2kw} per node.
/// A polynomial in the unknowns, defined whether or not the cone holds;
/// this is the function Newton iterates on.
inline ScalarField residual_power(const ScalarField& w, const TensorField& Heff,
                                  const ScalarField& rho, const ProblemSpec& p) {
    check_same_grid(rho.grid(), p.bg.grid, "residual_power(rho)");
    return residual_power_from_raised(bar_raised(w, Heff, p), w, rho, p);
}

/// Root-form residual sigma_k^{1/k}(raised bar) - rho e^{2w} per node.
/// Defined only where the raised bar tensor lies in the positive cone;
/// used for reporting and certificates, not for Newton.
inline ScalarField residual_root(const ScalarField& w, const TensorField& Heff,
                                 const ScalarField& rho, const ProblemSpec& p) {
    check_same_grid(rho.grid(), p.bg.grid, "residual_root(rho)");
    const Grid& g = p.bg.grid;
    const TensorField b = bar_raised(w, Heff, p);
    const double es = detail::rhs_exponent_sign(p.sign);
    ScalarField r(g);
    for (std::size_t i = 0; i < b.size(); ++i) {
        const NewtonChain chain = newton_chain(b[i]);
        if (!classify_cone(chain, p.k).positive()) {
            std::ostringstream os;
            os << "residual_root: augmented Hessian left the positive cone at node " << i << " (";
            const auto c = g.coords_of(i);
            for (int a = 0; a < g.dim; ++a) os << (a ? "," : "") << c[static_cast<std::size_t>(a)];
            os << ")";
            throw cone_error(os.str(), chain, p.k);
        }
        r[i] = signed_root(chain, p.k) - rho[i] * std::exp(es * 2.0 * w[i]);
    }
    return r;
}

/// Nodewise cone classification of the raised augmented Hessian.
struct ConeReport {
    bool allPositive = false;
    double minMargin = 0.0;   // min over nodes of min_{j<=k} sigma_j
    std::size_t worstNode = 0;
    std::size_t positiveCount = 0;
    std::size_t negativeCount = 0;
    std::size_t neitherCount = 0;
};

inline ConeReport cone_report_of(const TensorField& raised, int k) {
    ConeReport rep;
    rep.allPositive = true;
    bool first = true;
    for (std::size_t i = 0; i < raised.size(); ++i) {
        const NewtonChain chain = newton_chain(raised[i]);
        const ConeClass c = classify_cone(chain, k);
        if (c.positive()) ++rep.positiveCount;
        else if (c.negative()) ++rep.negativeCount;
        else ++rep.neitherCount;
        if (!c.positive()) rep.allPositive = false;
        const double margin = cone_margin(chain, k);
        if (first || margin < rep.minMargin) {
            rep.minMargin = margin;
            rep.worstNode = i;
            first = false;
        }
    }
    return rep;
}

inline ConeReport cone_certificate(const ScalarField& w, const TensorField& Heff, const ProblemSpec& p) {
    return cone_report_of(bar_raised(w, Heff, p), p.k);
}

}  // namespace sigmak
