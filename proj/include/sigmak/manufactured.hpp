#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "sigmak/residual.hpp"
#include "sigmak/trigfield.hpp"

namespace sigmak::oracle {

/// Rejection raised when a candidate exact potential leaves the cone or
/// produces a right-hand side of the wrong sign; carries the offending nodes.
class manufactured_rejection : public std::runtime_error {
public:
    manufactured_rejection(const std::string& why, std::vector<std::size_t> nodes)
        : std::runtime_error(build(why, nodes)), nodes_(std::move(nodes)) {}

    [[nodiscard]] const std::vector<std::size_t>& offending_nodes() const { return nodes_; }

private:
    static std::string build(const std::string& why, const std::vector<std::size_t>& nodes) {
        std::ostringstream os;
        os << why << " (" << nodes.size() << " offending nodes:";
        for (std::size_t i = 0; i < nodes.size() && i < 8; ++i) os << ' ' << nodes[i];
        if (nodes.size() > 8) os << " ...";
        os << ')';
        return os.str();
    }

    std::vector<std::size_t> nodes_;
};

struct ManufacturedProblem {
    ProblemSpec p;
    ScalarField wExact;
    ScalarField fDerived;
};

/// Inverts the equation for f: given wExact, the right-hand side
///   fDerived = -sigma_k^{1/k}(raised bar(wExact)) e^{-2 wExact}
/// computed with the same discrete operators as the solver, so wExact solves
/// the discrete equation exactly (residual at rounding level).
inline ManufacturedProblem make_manufactured(const Grid& grid, int k, double t,
                                             const ScalarField& phi, const TensorField& S,
                                             const ScalarField& wExact, double coneMargin = 0.0) {
    ManufacturedProblem m{{Background(grid, phi, S, t, coneMargin), k, ScalarField(grid, -1.0),
                           CaseSign::Negative, {}},
                          wExact, ScalarField(grid)};
    const TensorField raised = bar_raised(wExact, S, m.p);

    std::vector<std::size_t> violations;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const NewtonChain chain = newton_chain(raised[i]);
        if (!classify_cone(chain, k).positive()) {
            violations.push_back(i);
            continue;
        }
        m.fDerived[i] = -signed_root(chain, k) * std::exp(-2.0 * wExact[i]);
    }
    if (!violations.empty())
        throw manufactured_rejection("manufactured potential leaves the positive cone", violations);

    for (std::size_t i = 0; i < grid.node_count(); ++i)
        if (!(m.fDerived[i] < 0.0)) violations.push_back(i);
    if (!violations.empty())
        throw manufactured_rejection("derived right-hand side fails f < 0", violations);

    m.p.f = m.fDerived;
    validate_problem(m.p);
    return m;
}

/// Analytic-f variant: the bar tensor is evaluated from closed-form
/// derivatives of the trig specs, so the discrete solve carries an O(h^2)
/// error against wExact instead of recovering it exactly. S = psi * g.
inline ManufacturedProblem make_manufactured_analytic(const Grid& grid, int k, double t,
                                                      const TrigPoly& phiSpec, const TrigPoly& psiSpec,
                                                      const TrigPoly& wSpec, double coneMargin = 0.0) {
    const int n = grid.dim;
    const double c1 = (1.0 - t) / static_cast<double>(n - 2);
    const double c2 = 0.5 * (2.0 - t);

    const ScalarField phi = phiSpec.sample(grid);
    const ScalarField wExact = wSpec.sample(grid);
    const ScalarField psi = psiSpec.sample(grid);

    Background bgTmp(grid, phi, TensorField(grid), t, coneMargin);
    TensorField S = metric_tensor(bgTmp);
    for (std::size_t i = 0; i < grid.node_count(); ++i) S[i] *= psi[i];

    ScalarField fStar(grid);
    std::vector<std::size_t> violations;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const auto xa = grid.position(i);
        const std::span<const double> x(xa.data(), static_cast<std::size_t>(n));
        double dphi[kMaxDim], dw[kMaxDim];
        for (int a = 0; a < n; ++a) {
            dphi[a] = phiSpec.d1(x, a);
            dw[a] = wSpec.d1(x, a);
        }
        double dotPW = 0.0, grad2 = 0.0;
        for (int a = 0; a < n; ++a) {
            dotPW += dphi[a] * dw[a];
            grad2 += dw[a] * dw[a];
        }
        // covariant Hessian of wExact from analytic derivatives
        SymMatrix hess(n);
        for (int a = 0; a < n; ++a) {
            hess(a, a) = wSpec.d2(x, a, a) - (2.0 * dphi[a] * dw[a] - dotPW);
            for (int b = a + 1; b < n; ++b)
                hess(a, b) = wSpec.d2(x, a, b) - (dphi[a] * dw[b] + dphi[b] * dw[a]);
        }
        double lapFlat = 0.0;
        for (int a = 0; a < n; ++a) lapFlat += hess(a, a);

        const double e2phi = std::exp(2.0 * phiSpec.value(x));
        SymMatrix bar = hess - outer(std::span<const double>(dw, static_cast<std::size_t>(n)));
        const double diag = c1 * lapFlat + c2 * grad2 - psiSpec.value(x) * e2phi;
        for (int a = 0; a < n; ++a) bar(a, a) += diag;

        const SymMatrix raised = (1.0 / e2phi) * bar;
        const NewtonChain chain = newton_chain(raised);
        if (!classify_cone(chain, k).positive()) {
            violations.push_back(i);
            continue;
        }
        fStar[i] = -signed_root(chain, k) * std::exp(-2.0 * wExact[i]);
    }
    if (!violations.empty())
        throw manufactured_rejection("analytic manufactured potential leaves the positive cone", violations);

    ManufacturedProblem m{{Background(grid, phi, S, t, coneMargin), k, fStar, CaseSign::Negative, {}},
                          wExact, fStar};
    validate_problem(m.p);
    return m;
}

}  // namespace sigmak::oracle
