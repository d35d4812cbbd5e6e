#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <utility>
#include <vector>

#include "sigmak/fieldio.hpp"
#include "sigmak/krylov.hpp"
#include "sigmak/linearized.hpp"
#include "sigmak/residual.hpp"

namespace sigmak {

/// One point of the homotopy path:
///   Heff(s) = s S - (1-s) binom(n,k)^{-1/k} g,   rho(s) = s |f| + (1-s).
/// Heff stays in the negative cone nodewise (convex combination), rho > 0,
/// and at s = 0 the zero potential is an exact solution.
struct HomotopyPoint {
    double s = 0.0;
    TensorField Heff;
    ScalarField rho;
};

inline HomotopyPoint make_homotopy_point(const ProblemSpec& p, double s) {
    const Grid& g = p.bg.grid;
    const double c = std::pow(binomial(g.dim, p.k), -1.0 / p.k);
    HomotopyPoint hp{s, TensorField(g), ScalarField(g)};
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        SymMatrix m = s * p.bg.S[i];
        const double diag = -(1.0 - s) * c * p.bg.exp2phi[i];
        for (int a = 0; a < g.dim; ++a) m(a, a) += diag;
        hp.Heff[i] = m;
        hp.rho[i] = s * std::abs(p.f[i]) + (1.0 - s);
    }
    return hp;
}

/// Maximum-principle bounds on any solution: delta_lower < w < delta_upper
/// with delta_{lower,upper} = (1/2) ln (min,max)_x of
/// sigma_k^{1/k}(raised(-S))(x) / (-f(x)), widened by `slack`. The 1/2
/// reconciles the e^{2w} right-hand side of the equation.
inline std::pair<double, double> apriori_bounds(const ProblemSpec& p, double slack = 1e-9) {
    if (p.sign != CaseSign::Negative)
        throw std::invalid_argument("apriori_bounds: negative case only");
    const Grid& g = p.bg.grid;
    const TensorField raisedNegS = raise_index(-1.0 * p.bg.S, p.bg);
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const NewtonChain chain = newton_chain(raisedNegS[i]);
        if (!classify_cone(chain, p.k).positive())
            throw cone_error("apriori_bounds: -S leaves the positive cone", chain, p.k);
        const double ratio = signed_root(chain, p.k) / (-p.f[i]);
        if (i == 0) {
            lo = hi = ratio;
        } else {
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    return {0.5 * std::log(lo) - slack, 0.5 * std::log(hi) + slack};
}

enum class NewtonStatus { Converged, ConeStartViolation, LineSearchStall, IterationCap, KrylovFailure };

inline const char* to_string(NewtonStatus s) {
    switch (s) {
        case NewtonStatus::Converged: return "converged";
        case NewtonStatus::ConeStartViolation: return "cone-start-violation";
        case NewtonStatus::LineSearchStall: return "line-search-stall";
        case NewtonStatus::IterationCap: return "iteration-cap";
        case NewtonStatus::KrylovFailure: return "krylov-failure";
    }
    return "unknown";
}

struct NewtonOutcome {
    NewtonStatus status = NewtonStatus::IterationCap;
    ScalarField w;
    int iterations = 0;
    double residual = 0.0;    // max-norm of the power residual at the final iterate
    double coneMargin = 0.0;  // min over nodes of min_{j<=k} sigma_j at the final iterate
    double ellMargin = 0.0;   // min Q eigenvalue over nodes at the final iterate

    [[nodiscard]] bool ok() const { return status == NewtonStatus::Converged; }
};

namespace detail {

inline void log_newton_line(std::ostream* log, double s, int iter, double res, double alpha,
                            double coneMargin, double ellMargin) {
    if (!log) return;
    char buf[256];
    std::snprintf(buf, sizeof buf, "s=%.6g iter=%d res=%.17g alpha=%.6g cone_margin=%.17g ell_margin=%.17g",
                  s, iter, res, alpha, coneMargin, ellMargin);
    *log << buf << '\n';
}

/// Correction solve: dense LU on small grids (every axis <= 8 nodes),
/// preconditioned restarted GMRES otherwise.
inline bool solve_correction(const LinearizationState& st, const ScalarField& minusResidual,
                             const Tolerances& tol, ScalarField& direction) {
    const Grid& g = st.w.grid();
    bool small = true;
    for (int a = 0; a < g.dim; ++a)
        if (g.sizes[static_cast<std::size_t>(a)] > 8) small = false;

    const std::size_t n = g.node_count();
    direction = ScalarField(g);
    if (small) {
        const Eigen::MatrixXd m = dense_assemble(st);
        Eigen::VectorXd b(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) b(static_cast<Eigen::Index>(i)) = minusResidual[i];
        const Eigen::VectorXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(m).solve(b);
        for (std::size_t i = 0; i < n; ++i) direction[i] = x(static_cast<Eigen::Index>(i));
        return x.allFinite();
    }

    const std::vector<double> diag = operator_diagonal(st);
    std::vector<double> invDiag(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (diag[i] == 0.0) return false;
        invDiag[i] = 1.0 / diag[i];
    }
    std::vector<double> b(n), x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) b[i] = minusResidual[i];
    auto matvec = [&](std::span<const double> xin, std::span<double> yout) {
        ScalarField xf(g);
        for (std::size_t i = 0; i < n; ++i) xf[i] = xin[i];
        const ScalarField y = st.apply(xf);
        for (std::size_t i = 0; i < n; ++i) yout[i] = y[i];
    };
    const KrylovResult kr = gmres(matvec, std::span<const double>(b), std::span<double>(x),
                                  std::span<const double>(invDiag), tol.krylovTol,
                                  tol.krylovRestart, tol.maxKrylov);
    if (!kr.converged) return false;
    for (std::size_t i = 0; i < n; ++i) direction[i] = x[i];
    return true;
}

}  // namespace detail

/// Damped Newton on the power-form residual with a mandatory cone safeguard:
/// a step is accepted only if the residual max-norm decreases and the raised
/// bar tensor stays strictly inside the positive cone.
inline NewtonOutcome newton_solve(const HomotopyPoint& hp, const ProblemSpec& p,
                                  const ScalarField& w0, std::ostream* log = nullptr) {
    const Grid& g = p.bg.grid;
    NewtonOutcome out;
    out.w = w0;

    double scale = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i)
        scale = std::max(scale, std::pow(hp.rho[i], p.k));
    const double tolAbs = p.tol.newtonTol * scale;

    TensorField raised = bar_raised(out.w, hp.Heff, p);
    ConeReport rep = cone_report_of(raised, p.k);
    ScalarField r = residual_power_from_raised(raised, out.w, hp.rho, p);
    double res = r.max_abs();
    out.residual = res;
    out.coneMargin = rep.minMargin;
    if (!(rep.minMargin > p.bg.coneMargin)) {
        out.status = NewtonStatus::ConeStartViolation;
        return out;
    }

    for (int iter = 0;; ++iter) {
        const LinearizationState st = build_state(out.w, hp.Heff, hp.rho, p);
        out.ellMargin = ellipticity_certificate(st).minQEigenvalue;
        detail::log_newton_line(log, hp.s, iter, res, iter == 0 ? 0.0 : 1.0, rep.minMargin, out.ellMargin);
        if (res <= tolAbs) {
            out.status = NewtonStatus::Converged;
            out.iterations = iter;
            return out;
        }
        if (iter >= p.tol.maxNewton) {
            out.status = NewtonStatus::IterationCap;
            out.iterations = iter;
            return out;
        }

        ScalarField direction;
        if (!detail::solve_correction(st, -1.0 * r, p.tol, direction)) {
            out.status = NewtonStatus::KrylovFailure;
            out.iterations = iter;
            return out;
        }

        double alpha = 1.0;
        bool accepted = false;
        while (alpha >= p.tol.minAlpha) {
            const ScalarField wTry = out.w + alpha * direction;
            const TensorField raisedTry = bar_raised(wTry, hp.Heff, p);
            const ConeReport repTry = cone_report_of(raisedTry, p.k);
            if (repTry.minMargin > p.bg.coneMargin) {
                const ScalarField rTry = residual_power_from_raised(raisedTry, wTry, hp.rho, p);
                const double resTry = rTry.max_abs();
                if (resTry < res) {
                    out.w = wTry;
                    raised = raisedTry;
                    rep = repTry;
                    r = rTry;
                    res = resTry;
                    out.residual = res;
                    out.coneMargin = rep.minMargin;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            out.status = NewtonStatus::LineSearchStall;
            out.iterations = iter;
            return out;
        }
    }
}

struct PathEntry {
    double s = 0.0;
    int newtonIterations = 0;
    double finalResidual = 0.0;
    double coneMargin = 0.0;
    double ellipticityMargin = 0.0;
    bool accepted = false;
};

struct Certificates {
    bool residual = false;
    bool cone = false;
    bool bounds = false;
    double residualMax = 0.0;
    double residualTol = 0.0;
    double coneMarginMin = 0.0;

    [[nodiscard]] bool all() const { return residual && cone && bounds; }
};

struct SolveReport {
    bool success = false;
    double lastGoodS = 0.0;
    ScalarField w;
    std::vector<PathEntry> path;
    std::pair<double, double> bounds{0.0, 0.0};
    Certificates certified;
};

/// Homotopy continuation from the trivial solution at s = 0 to the target
/// problem at s = 1, with adaptive step control: start 0.25, halve on
/// failure, double after two consecutive successes, cap 0.25, floor 1e-4.
/// Every certificate of the accepted solution is recomputed at the end.
inline SolveReport continuation_solve(const ProblemSpec& p, std::ostream* log = nullptr) {
    validate_problem(p);
    if (p.sign != CaseSign::Negative)
        throw std::invalid_argument("continuation_solve: negative case only");
    if (!(p.bg.t < 1.0))
        throw std::invalid_argument("t must satisfy t < 1 for the continuation solver");
    const Grid& g = p.bg.grid;
    for (int a = 0; a < g.dim; ++a)
        if (g.sizes[static_cast<std::size_t>(a)] < 8)
            throw std::invalid_argument("continuation_solve: need at least 8 nodes per axis");

    SolveReport report;
    report.bounds = apriori_bounds(p);

    auto record = [&](double s, const NewtonOutcome& o) {
        report.path.push_back({s, o.iterations, o.residual, o.coneMargin, o.ellMargin, o.ok()});
    };

    ScalarField w(g);
    {
        const NewtonOutcome start = newton_solve(make_homotopy_point(p, 0.0), p, w, log);
        record(0.0, start);
        if (!start.ok()) return report;  // cannot happen for valid problems; defensive exit
        w = start.w;
    }

    double s = 0.0, ds = 0.25;
    int consecutive = 0;
    while (s < 1.0) {
        const double sNext = std::min(s + ds, 1.0);
        const NewtonOutcome o = newton_solve(make_homotopy_point(p, sNext), p, w, log);
        record(sNext, o);
        if (o.ok()) {
            s = sNext;
            w = o.w;
            if (++consecutive >= 2) {
                ds = std::min(2.0 * ds, 0.25);
                consecutive = 0;
            }
        } else {
            ds *= 0.5;
            consecutive = 0;
            if (ds < 1e-4) {
                report.lastGoodS = s;
                report.w = w;
                return report;
            }
        }
    }

    report.success = true;
    report.lastGoodS = 1.0;
    report.w = w;

    const HomotopyPoint target = make_homotopy_point(p, 1.0);
    const TensorField raised = bar_raised(w, target.Heff, p);
    const ConeReport cone = cone_report_of(raised, p.k);
    report.certified.cone = cone.allPositive;
    report.certified.coneMarginMin = cone.minMargin;

    report.certified.residualTol = 1e-10 * target.rho.max_value();
    if (cone.allPositive) {
        const ScalarField root = residual_root(w, target.Heff, target.rho, p);
        report.certified.residualMax = root.max_abs();
        report.certified.residual = report.certified.residualMax <= report.certified.residualTol;
    }

    report.certified.bounds = true;
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (!(report.bounds.first < w[i] && w[i] < report.bounds.second)) report.certified.bounds = false;

    return report;
}

struct ProbeResult {
    double maxDistance = 0.0;
    bool allConverged = false;
    std::vector<NewtonOutcome> outcomes;
};

/// Uniqueness probe: direct damped Newton at s = 1 from every seed (after a
/// short amplitude-damping pre-phase when a seed starts outside the cone);
/// returns the maximum pairwise max-norm distance between the solutions.
inline ProbeResult uniqueness_probe(const ProblemSpec& p, const std::vector<ScalarField>& seeds,
                                    std::ostream* log = nullptr) {
    validate_problem(p);
    const HomotopyPoint target = make_homotopy_point(p, 1.0);
    ProbeResult result;
    result.allConverged = true;
    for (const ScalarField& seed : seeds) {
        ScalarField start = seed;
        double beta = 1.0;
        while (beta >= 1.0 / 1024.0) {
            const ConeReport rep = cone_certificate(start, target.Heff, p);
            if (rep.minMargin > p.bg.coneMargin) break;
            beta *= 0.5;
            start = beta * seed;
        }
        const NewtonOutcome o = newton_solve(target, p, start, log);
        if (!o.ok()) result.allConverged = false;
        result.outcomes.push_back(o);
    }
    for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
        if (!result.outcomes[i].ok()) continue;
        for (std::size_t j = i + 1; j < result.outcomes.size(); ++j) {
            if (!result.outcomes[j].ok()) continue;
            result.maxDistance = std::max(result.maxDistance,
                                          max_abs_diff(result.outcomes[i].w, result.outcomes[j].w));
        }
    }
    return result;
}

struct TSweepRow {
    double t = 0.0;
    bool converged = false;
    double maxW = 0.0;
    double maxGradW = 0.0;
    double maxBarEigenvalue = 0.0;
    double ellipticityMargin = 0.0;
};

/// Re-solves the problem for each t and reports the solution statistics the
/// limiting-behaviour study cares about. Failed rows are marked, not fatal.
inline std::vector<TSweepRow> t_sweep(const ProblemSpec& p, const std::vector<double>& ts,
                                      std::ostream* log = nullptr) {
    std::vector<TSweepRow> rows;
    for (double t : ts) {
        if (!(t < 1.0)) throw std::invalid_argument("t_sweep: every t must satisfy t < 1");
        ProblemSpec pt = p;
        pt.bg = Background(p.bg.grid, p.bg.phi, p.bg.S, t, p.bg.coneMargin);
        TSweepRow row;
        row.t = t;
        const SolveReport sr = continuation_solve(pt, log);
        row.converged = sr.success && sr.certified.all();
        if (sr.success) {
            const Grid& g = pt.bg.grid;
            row.maxW = sr.w.max_abs();
            const VectorField dw = grad(sr.w);
            for (std::size_t i = 0; i < g.node_count(); ++i) {
                double g2 = 0.0;
                for (int a = 0; a < g.dim; ++a) g2 += dw.at(i, a) * dw.at(i, a);
                row.maxGradW = std::max(row.maxGradW, std::sqrt(pt.bg.expNeg2phi[i] * g2));
            }
            const HomotopyPoint hp = make_homotopy_point(pt, 1.0);
            const TensorField raised = bar_raised(sr.w, hp.Heff, pt);
            const LinearizationState st = build_state(sr.w, hp.Heff, hp.rho, pt);
            row.ellipticityMargin = ellipticity_certificate(st).minQEigenvalue;
            bool first = true;
            for (std::size_t i = 0; i < g.node_count(); ++i) {
                const double mx = max_eigenvalue(raised[i]);
                row.maxBarEigenvalue = first ? mx : std::max(row.maxBarEigenvalue, mx);
                first = false;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace sigmak
