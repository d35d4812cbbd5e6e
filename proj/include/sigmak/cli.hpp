#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sigmak/config.hpp"
#include "sigmak/continuation.hpp"
#include "sigmak/fieldio.hpp"
#include "sigmak/identities.hpp"

namespace sigmak::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertificate = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitUsage = 64;

struct Overrides {
    std::optional<double> tol;
    std::optional<int> maxNewton;
    std::optional<unsigned long> seed;
    std::optional<std::string> outPrefix;
    bool detRicci = false;  // preset: k = n, t = 0
};

namespace detail {

inline void apply_overrides(RunConfig& cfg, const Overrides& o) {
    if (o.tol) cfg.tol.newtonTol = *o.tol;
    if (o.maxNewton) cfg.tol.maxNewton = *o.maxNewton;
    if (o.seed) cfg.seed = *o.seed;
    if (o.outPrefix) cfg.outPrefix = *o.outPrefix;
    if (o.detRicci) {
        cfg.k = cfg.n;
        cfg.t = 0.0;
    }
}

inline std::optional<RunConfig> load_config(const std::string& path, const Overrides& o,
                                            std::ostream& out) {
    try {
        RunConfig cfg = parse_config_file(path);
        apply_overrides(cfg, o);
        return cfg;
    } catch (const std::exception& e) {
        out << "config error: " << e.what() << '\n';
        return std::nullopt;
    }
}

inline std::string fmt(double v) { return fieldio::format_double(v); }

}  // namespace detail

/// Runs the eight identity families; exit 0 iff all pass. `trials = 0` is a
/// vacuous pass. Counterexamples are dumped on failure.
inline int cmd_check_identities(long trials, unsigned long seed, int nmax, std::ostream& out) {
    if (trials < 0 || nmax < 2 || nmax > kMaxDim) {
        out << "usage error: trials must be >= 0 and 2 <= nmax <= 6\n";
        return kExitUsage;
    }
    const std::vector<FamilyResult> results = run_identity_suite(trials, seed, nmax);
    out << "identity family                 checks    result\n";
    bool allPass = true;
    for (const FamilyResult& fr : results) {
        out << std::left << std::setw(32) << fr.name << std::setw(10) << fr.checks
            << (fr.pass ? "PASS" : "FAIL") << '\n';
        if (!fr.pass) {
            out << "  " << fr.detail << '\n';
            allPass = false;
        }
    }
    return allPass ? kExitOk : kExitCertificate;
}

namespace detail {

struct VerifyOutcome {
    bool residual = false, cone = false, bounds = false;
    double residualMax = 0.0, residualTol = 0.0, coneMargin = 0.0;
    std::pair<double, double> boundsPair{0.0, 0.0};

    [[nodiscard]] bool all() const { return residual && cone && bounds; }
};

inline VerifyOutcome verify_field(const ScalarField& w, const ProblemSpec& p) {
    VerifyOutcome v;
    const HomotopyPoint target = make_homotopy_point(p, 1.0);
    const TensorField raised = bar_raised(w, target.Heff, p);
    const ConeReport cone = cone_report_of(raised, p.k);
    v.cone = cone.allPositive;
    v.coneMargin = cone.minMargin;
    v.residualTol = 1e-10 * target.rho.max_value();
    if (cone.allPositive) {
        v.residualMax = residual_root(w, target.Heff, target.rho, p).max_abs();
        v.residual = v.residualMax <= v.residualTol;
    }
    v.boundsPair = apriori_bounds(p);
    v.bounds = true;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (!(v.boundsPair.first < w[i] && w[i] < v.boundsPair.second)) v.bounds = false;
    return v;
}

inline void print_verify(std::ostream& out, const VerifyOutcome& v) {
    out << "certified_residual=" << (v.residual ? 1 : 0) << '\n'
        << "certified_cone=" << (v.cone ? 1 : 0) << '\n'
        << "certified_bounds=" << (v.bounds ? 1 : 0) << '\n'
        << "residual_max=" << fmt(v.residualMax) << '\n'
        << "residual_tol=" << fmt(v.residualTol) << '\n'
        << "cone_margin=" << fmt(v.coneMargin) << '\n'
        << "delta_lower=" << fmt(v.boundsPair.first) << '\n'
        << "delta_upper=" << fmt(v.boundsPair.second) << '\n';
}

}  // namespace detail

/// Solves the configured problem; writes <prefix>_solution.csv,
/// <prefix>_report.txt and <prefix>_log.txt. Exit 0 iff the residual, cone
/// and bounds certificates all pass; 2 on solver failure (last good s in the
/// report); 64 on config/hypothesis errors.
inline int cmd_solve(const std::string& configPath, const Overrides& o, std::ostream& out) {
    const auto cfg = detail::load_config(configPath, o, out);
    if (!cfg) return kExitUsage;
    BuiltProblem built;
    try {
        built = build_problem(*cfg);
    } catch (const std::exception& e) {
        out << "config error: " << e.what() << '\n';
        return kExitUsage;
    }

    std::ofstream log(cfg->outPrefix + "_log.txt");
    SolveReport report;
    try {
        report = continuation_solve(built.p, &log);
    } catch (const std::exception& e) {
        out << "solver error: " << e.what() << '\n';
        return kExitSolver;
    }

    {
        std::ofstream sol(cfg->outPrefix + "_solution.csv");
        fieldio::dump_scalar(sol, report.w);
    }
    std::ofstream rep(cfg->outPrefix + "_report.txt");
    auto emit = [&](std::ostream& os) {
        os << "success=" << (report.success ? 1 : 0) << '\n'
           << "last_good_s=" << detail::fmt(report.lastGoodS) << '\n'
           << "n=" << cfg->n << '\n'
           << "k=" << cfg->k << '\n'
           << "t=" << detail::fmt(cfg->t) << '\n'
           << "seed=" << cfg->seed << '\n'
           << "certified_residual=" << (report.certified.residual ? 1 : 0) << '\n'
           << "certified_cone=" << (report.certified.cone ? 1 : 0) << '\n'
           << "certified_bounds=" << (report.certified.bounds ? 1 : 0) << '\n'
           << "residual_max=" << detail::fmt(report.certified.residualMax) << '\n'
           << "residual_tol=" << detail::fmt(report.certified.residualTol) << '\n'
           << "cone_margin=" << detail::fmt(report.certified.coneMarginMin) << '\n'
           << "delta_lower=" << detail::fmt(report.bounds.first) << '\n'
           << "delta_upper=" << detail::fmt(report.bounds.second) << '\n'
           << "max_w=" << detail::fmt(report.w.max_abs()) << '\n'
           << "path_points=" << report.path.size() << '\n';
        if (built.wExact)
            os << "w_exact_error=" << detail::fmt(max_abs_diff(report.w, *built.wExact)) << '\n';
    };
    emit(rep);
    emit(out);

    if (!report.success) return kExitSolver;
    return report.certified.all() ? kExitOk : kExitCertificate;
}

/// Recomputes the three certificates for a stored solution field.
inline int cmd_verify(const std::string& solutionCsv, const std::string& configPath,
                      const Overrides& o, std::ostream& out) {
    const auto cfg = detail::load_config(configPath, o, out);
    if (!cfg) return kExitUsage;
    BuiltProblem built;
    ScalarField w;
    try {
        built = build_problem(*cfg);
        std::ifstream is(solutionCsv);
        if (!is) throw parse_error("cannot open solution file '" + solutionCsv + "'");
        w = fieldio::load_scalar(is);
    } catch (const std::exception& e) {
        out << "config error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (!(w.grid() == built.p.bg.grid)) {
        out << "config error: solution grid does not match the configured grid\n";
        return kExitUsage;
    }
    const detail::VerifyOutcome v = detail::verify_field(w, built.p);
    detail::print_verify(out, v);
    return v.all() ? kExitOk : kExitCertificate;
}

/// Manufactured-solution study over a list of cubic grids. Analytic mode
/// reports (h, max error, observed order); residual-consistent mode instead
/// requires max error <= 1e-9 on every grid.
inline int cmd_mms(const std::string& configPath, const std::vector<int>& grids,
                   const Overrides& o, std::ostream& out) {
    const auto cfg = detail::load_config(configPath, o, out);
    if (!cfg) return kExitUsage;
    if (!cfg->hasWExact()) {
        out << "config error: mms requires w_exact\n";
        return kExitUsage;
    }
    if (grids.empty()) {
        out << "usage error: mms requires at least one grid size\n";
        return kExitUsage;
    }

    const bool analytic = cfg->mmsMode == "analytic";
    const bool withOrder = grids.size() > 1;
    out << (withOrder ? "h,max_error,observed_order\n" : "h,max_error\n");

    bool anyFailed = false, boundViolated = false;
    double prevErr = 0.0, prevH = 0.0;
    bool havePrev = false;
    for (int nodes : grids) {
        RunConfig sub = *cfg;
        sub.sizes.assign(static_cast<std::size_t>(cfg->n), nodes);
        BuiltProblem built;
        try {
            built = build_problem(sub);
        } catch (const std::exception& e) {
            out << "config error: " << e.what() << '\n';
            return kExitUsage;
        }
        const double h = built.p.bg.grid.spacing[0];
        const SolveReport report = continuation_solve(built.p);
        if (!report.success) {
            out << detail::fmt(h) << ",failed" << (withOrder ? "," : "") << '\n';
            anyFailed = true;
            havePrev = false;
            continue;
        }
        const double err = max_abs_diff(report.w, *built.wExact);
        out << detail::fmt(h) << ',' << detail::fmt(err);
        if (withOrder) {
            out << ',';
            if (havePrev && err > 0.0)
                out << detail::fmt(std::log(prevErr / err) / std::log(prevH / h));
        }
        out << '\n';
        if (!analytic && err > 1e-9) boundViolated = true;
        prevErr = err;
        prevH = h;
        havePrev = true;
    }
    if (anyFailed) return kExitSolver;
    return boundViolated ? kExitCertificate : kExitOk;
}

/// Limiting-behaviour sweep over t values; exit 0 if at least one row
/// converged. Failure rows are marked in the table.
inline int cmd_sweep_t(const std::string& configPath, const std::vector<double>& ts,
                       const Overrides& o, std::ostream& out) {
    const auto cfg = detail::load_config(configPath, o, out);
    if (!cfg) return kExitUsage;
    for (double t : ts)
        if (!(t < 1.0)) {
            out << "usage error: every t must satisfy t < 1\n";
            return kExitUsage;
        }
    BuiltProblem built;
    try {
        built = build_problem(*cfg);
    } catch (const std::exception& e) {
        out << "config error: " << e.what() << '\n';
        return kExitUsage;
    }

    std::vector<TSweepRow> rows;
    try {
        rows = t_sweep(built.p, ts);
    } catch (const std::exception& e) {
        out << "solver error: " << e.what() << '\n';
        return kExitSolver;
    }
    out << "t,converged,max_w,max_grad_w,max_bar_eig,ell_margin\n";
    bool anyConverged = ts.empty();
    for (const TSweepRow& r : rows) {
        if (r.converged) anyConverged = true;
        out << detail::fmt(r.t) << ',' << (r.converged ? 1 : 0) << ',' << detail::fmt(r.maxW) << ','
            << detail::fmt(r.maxGradW) << ',' << detail::fmt(r.maxBarEigenvalue) << ','
            << detail::fmt(r.ellipticityMargin) << '\n';
    }
    return anyConverged ? kExitOk : kExitSolver;
}

}  // namespace sigmak::cli
