#pragma once

#include <sstream>
#include <stdexcept>

#include "sigmak/conformal.hpp"
#include "sigmak/grid.hpp"
#include "sigmak/symfun.hpp"

namespace sigmak {

/// Which branch of the curvature equation is being evaluated. The negative
/// case (S in the negative cone, f < 0) is the one the solver handles; the
/// positive case is supported for residual evaluation only, with the two
/// gradient terms and the conformal-factor exponent flipped.
enum class CaseSign { Negative, Positive };

struct Tolerances {
    double newtonTol = 1e-12;   // residual max-norm, relative to max rho^k
    double krylovTol = 1e-3;    // relative, per Newton step
    int maxNewton = 50;
    int krylovRestart = 60;
    int maxKrylov = 4000;
    double minAlpha = 1e-6;
};

struct ProblemSpec {
    Background bg;
    int k = 0;
    ScalarField f;
    CaseSign sign = CaseSign::Negative;
    Tolerances tol;
};

/// Checks every hypothesis of the problem class and throws with a message
/// naming the violated one.
inline void validate_problem(const ProblemSpec& p) {
    const Grid& g = p.bg.grid;
    if (p.k < 1 || p.k > g.dim) {
        std::ostringstream os;
        os << "k must satisfy 1 <= k <= n: k = " << p.k << ", n = " << g.dim;
        throw std::invalid_argument(os.str());
    }
    check_same_grid(g, p.f.grid(), "ProblemSpec(f)");
    if (!(p.bg.t <= 1.0)) throw std::invalid_argument("t must satisfy t <= 1");

    const bool negative = p.sign == CaseSign::Negative;
    const double worstF = negative ? p.f.max_value() : p.f.min_value();
    if (negative ? !(worstF < 0.0) : !(worstF > 0.0)) {
        std::ostringstream os;
        os << "f must be " << (negative ? "negative" : "positive") << " everywhere: "
           << (negative ? "max f = " : "min f = ") << worstF;
        throw std::invalid_argument(os.str());
    }

    const TensorField raised = raise_index(p.bg.S, p.bg);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const ConeClass c = classify_cone(raised[i], p.k, p.bg.coneMargin);
        const bool ok = negative ? c.negative() : c.positive();
        if (!ok) {
            std::ostringstream os;
            os << "S must lie in the " << (negative ? "negative" : "positive") << " k-cone at every node: "
               << "violated at node " << i << " (k = " << p.k << ")";
            throw std::invalid_argument(os.str());
        }
    }
}

}  // namespace sigmak
