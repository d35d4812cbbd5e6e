#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "sigmak/krylov.hpp"
#include "sigmak/linearized.hpp"
#include "sigmak/problem.hpp"
#include "sigmak/residual.hpp"
#include "sigmak/sampling.hpp"
#include "sigmak/trigfield.hpp"
#include "test_support.hpp"

using namespace sigmak;

namespace {

struct Setup {
    ProblemSpec p;
    TensorField Heff;
    ScalarField rho;
};

// The s = 0 end of the homotopy path: Heff = -binom(n,k)^{-1/k} g, rho = 1.
Setup trivial_setup(int n, int k, int nodes, double t = 0.0) {
    const Grid g = Grid::cube(n, nodes);
    Setup s{{Background::flat(g, t), k, ScalarField(g, -1.0), CaseSign::Negative, {}},
            TensorField(g), ScalarField(g, 1.0)};
    const double c = std::pow(binomial(n, k), -1.0 / k);
    s.Heff = (-c) * metric_tensor(s.p.bg);
    return s;
}

Setup problem_setup(int n, int k, int nodes, double t, const std::string& phiSpec,
                    const std::string& sSpec, const std::string& fSpec) {
    const Grid g = Grid::cube(n, nodes);
    const ScalarField phi = TrigPoly::parse(phiSpec, n).sample(g);
    const ScalarField psi = TensorSpec::parse(sSpec, n).psi.sample(g);
    Background bg(g, phi, TensorField(g), t);
    TensorField S = metric_tensor(bg);
    for (std::size_t i = 0; i < g.node_count(); ++i) S[i] *= psi[i];
    bg = Background(g, phi, S, t);
    const ScalarField f = TrigPoly::parse(fSpec, n).sample(g);
    ScalarField rho(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) rho[i] = std::abs(f[i]);
    return {{bg, k, f, CaseSign::Negative, {}}, bg.S, rho};
}

}  // namespace

TEST_CASE("bar_hessian of a constant potential is minus the effective tensor", "[residual]") {
    Rng rng(61);
    const Grid g = Grid::cube(3, 8);
    TensorField s(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) s[i] = random_symmetric(rng, 3);
    ProblemSpec p{Background::flat(g, 0.4), 2, ScalarField(g, -1.0), CaseSign::Negative, {}};
    CHECK(max_abs_diff(bar_hessian(ScalarField(g), s, p), -1.0 * s) == 0.0);
    CHECK(max_abs_diff(bar_hessian(ScalarField(g, 0.8), s, p), -1.0 * s) == 0.0);
}

TEST_CASE("bar_hessian matches direct stencil arithmetic at a node", "[residual]") {
    const Grid g = Grid::cube(3, 16);
    const ScalarField w = ScalarField::sample(g, [](const auto& x) { return 0.05 * std::sin(x[0]); });
    ProblemSpec p{Background::flat(g, 0.0), 2, ScalarField(g, -1.0), CaseSign::Negative, {}};
    const TensorField bar = bar_hessian(w, TensorField(g), p);

    const std::size_t node = g.index_of(std::array{4, 0, 0});  // x1 = pi/2
    const double h = g.spacing[0];
    const double up = w[g.neighbor(node, 0, +1)], dn = w[g.neighbor(node, 0, -1)];
    const double d2 = (up - 2.0 * w[node] + dn) / (h * h);
    const double g1 = (up - dn) / (2.0 * h);
    // t = 0, phi = 0, S = 0: bar = hess + (lap) I + |grad|^2 I - dw x dw
    CHECK(std::abs(bar[node](0, 0) - 2.0 * d2) <= 1e-15);
    CHECK(std::abs(bar[node](1, 1) - (d2 + g1 * g1)) <= 1e-15);
    CHECK(std::abs(bar[node](2, 2) - (d2 + g1 * g1)) <= 1e-15);
    CHECK(std::abs(bar[node](0, 1)) <= 1e-15);
    CHECK(std::abs(g1) <= 1e-15);  // centered difference of sin at its extremum
}

TEST_CASE("residual_power vanishes on the trivial homotopy start", "[residual]") {
    for (const auto& [n, k] : {std::pair{3, 1}, {3, 2}, {3, 3}, {4, 2}}) {
        const Setup s = trivial_setup(n, k, 8);
        const ScalarField r = residual_power(ScalarField(s.p.bg.grid), s.Heff, s.rho, s.p);
        CHECK(r.max_abs() <= 1e-14);
    }
}

TEST_CASE("residual_power on the zero-data configuration is minus one", "[residual]") {
    const Grid g = Grid::cube(3, 8);
    ProblemSpec p{Background::flat(g, 0.0), 2, ScalarField(g, -1.0), CaseSign::Negative, {}};
    const ScalarField r = residual_power(ScalarField(g), TensorField(g), ScalarField(g, 1.0), p);
    for (std::size_t i = 0; i < g.node_count(); ++i) CHECK(r[i] == -1.0);
}

TEST_CASE("residual_root values and cone rejection", "[residual]") {
    const Setup s = trivial_setup(3, 2, 8);
    CHECK(residual_root(ScalarField(s.p.bg.grid), s.Heff, s.rho, s.p).max_abs() <= 1e-14);

    const Grid g = Grid::cube(3, 8);
    ProblemSpec p{Background::flat(g, 0.0), 2, ScalarField(g, -1.0), CaseSign::Negative, {}};
    const Background& bg = p.bg;
    const TensorField minusG = -1.0 * metric_tensor(bg);
    const ScalarField r = residual_root(ScalarField(g), minusG, ScalarField(g, 1.0), p);
    for (std::size_t i = 0; i < g.node_count(); ++i)
        CHECK(r[i] == Catch::Approx(std::sqrt(3.0) - 1.0).epsilon(1e-14));

    // S = 0 puts sigma_k at zero everywhere: outside the cone, with coordinates reported
    try {
        residual_root(ScalarField(g), TensorField(g), ScalarField(g, 1.0), p);
        FAIL("expected cone_error");
    } catch (const cone_error& e) {
        CHECK(std::string(e.what()).find("node 0 (0,0,0)") != std::string::npos);
    }
}

TEST_CASE("power and root residuals vanish together", "[residual]") {
    const Setup s = trivial_setup(3, 2, 8);
    const Grid& g = s.p.bg.grid;
    const ScalarField zero(g);
    CHECK(residual_power(zero, s.Heff, s.rho, s.p).max_abs() <= 1e-14);
    CHECK(residual_root(zero, s.Heff, s.rho, s.p).max_abs() <= 1e-14);

    const ScalarField off = ScalarField::sample(g, [](const auto& x) { return 0.05 * std::sin(x[1]); });
    CHECK(residual_power(off, s.Heff, s.rho, s.p).max_abs() > 1e-3);
    CHECK(residual_root(off, s.Heff, s.rho, s.p).max_abs() > 1e-3);
}

TEST_CASE("cone_certificate classifies the trivial state and the degenerate one", "[residual]") {
    const Setup s = trivial_setup(3, 2, 8);
    const ConeReport good = cone_certificate(ScalarField(s.p.bg.grid), s.Heff, s.p);
    CHECK(good.allPositive);
    // raised bar = binom(3,2)^{-1/2} I: sigma_1 = sqrt(3), sigma_2 = 1
    CHECK(good.minMargin == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(good.positiveCount == s.p.bg.grid.node_count());

    const Grid g = Grid::cube(3, 8);
    ProblemSpec p{Background::flat(g, 0.0), 2, ScalarField(g, -1.0), CaseSign::Negative, {}};
    const ConeReport bad = cone_certificate(ScalarField(g), TensorField(g), p);
    CHECK_FALSE(bad.allPositive);
    CHECK(bad.neitherCount == g.node_count());
    CHECK(bad.minMargin == 0.0);
}

TEST_CASE("adding a positive semidefinite tensor never decreases sigma_k", "[residual]") {
    const Setup s = problem_setup(3, 2, 8, 0.0, "0", "uniform(-1)", "const(-1)");
    const Grid& g = s.p.bg.grid;
    const ScalarField w = ScalarField::sample(g, [](const auto& x) {
        return 0.05 * std::sin(x[0]) + 0.03 * std::cos(x[1]);
    });
    const TensorField b = bar_raised(w, s.Heff, s.p);
    REQUIRE(cone_report_of(b, s.p.k).allPositive);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        SymMatrix shifted = b[i];
        for (int a = 0; a < g.dim; ++a) shifted(a, a) += 0.1;
        CHECK(sigma(shifted, s.p.k) >= sigma(b[i], s.p.k) - 1e-15);
    }
}

TEST_CASE("negative and positive case residuals agree on constants", "[residual]") {
    const Setup neg = problem_setup(3, 2, 8, 0.3, "0", "const(-1) - 0.2*sin(1,1)", "const(-1) - 0.1*cos(2,1)");
    const Grid& g = neg.p.bg.grid;

    ProblemSpec pos = neg.p;
    pos.sign = CaseSign::Positive;
    pos.f = -1.0 * neg.p.f;
    pos.bg = Background(g, neg.p.bg.phi, -1.0 * neg.p.bg.S, neg.p.bg.t);
    const TensorField& HeffPos = pos.bg.S;

    const double c = 0.17;
    const ScalarField wneg(g, c), wpos(g, -c);
    const ScalarField rn = residual_power(wneg, neg.Heff, neg.rho, neg.p);
    const ScalarField rp = residual_power(wpos, HeffPos, neg.rho, pos);
    CHECK(max_abs_diff(rn, rp) <= 1e-14);

    const ScalarField rrn = residual_root(wneg, neg.Heff, neg.rho, neg.p);
    const ScalarField rrp = residual_root(wpos, HeffPos, neg.rho, pos);
    CHECK(max_abs_diff(rrn, rrp) <= 1e-14);
}

TEST_CASE("problem validation names the violated hypothesis", "[residual]") {
    const Grid g = Grid::cube(3, 8);
    const Background bg(g, ScalarField(g), -1.0 * metric_tensor(Background::flat(g, 0.0)), 0.0);

    ProblemSpec ok{bg, 2, ScalarField(g, -1.0), CaseSign::Negative, {}};
    CHECK_NOTHROW(validate_problem(ok));

    ProblemSpec badF = ok;
    badF.f = ScalarField::sample(g, [](const auto& x) { return -1.0 + 1.2 * std::sin(x[0]); });
    CHECK_THROWS_WITH(validate_problem(badF), Catch::Matchers::ContainsSubstring("f must be negative"));

    ProblemSpec badK = ok;
    badK.k = 5;
    CHECK_THROWS_WITH(validate_problem(badK), Catch::Matchers::ContainsSubstring("k must satisfy"));

    ProblemSpec badS = ok;
    badS.bg = Background(g, ScalarField(g), TensorField(g), 0.0);
    CHECK_THROWS_WITH(validate_problem(badS), Catch::Matchers::ContainsSubstring("negative k-cone"));

    CHECK_THROWS_AS(Background(g, ScalarField(g), TensorField(g), 1.5), std::invalid_argument);
}

TEST_CASE("build_state caches the trivial-path coefficients", "[linearized]") {
    for (const auto& [n, k] : {std::pair{3, 2}, {4, 3}}) {
        const Setup s = trivial_setup(n, k, 8);
        const Grid& g = s.p.bg.grid;
        const LinearizationState st = build_state(ScalarField(g), s.Heff, s.rho, s.p);

        const double c = std::pow(binomial(n, k), -1.0 / k);
        const SymMatrix expectedT = binomial(n - 1, k - 1) * std::pow(c, k - 1) * SymMatrix::identity(n);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            CHECK(testutil::max_entry_diff(st.Tfield[i], expectedT) <= 1e-14);
            CHECK(st.zeroOrder[i] == Catch::Approx(-2.0 * k).epsilon(1e-14));
        }
        CHECK(st.gradientCoeffs.max_abs() == 0.0);
        CHECK(st.coneMargin > 0.0);
    }
}

TEST_CASE("apply is linear and acts as the zero-order term on constants", "[linearized]") {
    const Setup s = trivial_setup(3, 2, 8);
    const Grid& g = s.p.bg.grid;
    const LinearizationState st = build_state(ScalarField(g), s.Heff, s.rho, s.p);

    CHECK(st.apply(ScalarField(g)).max_abs() == 0.0);

    const ScalarField onConst = st.apply(ScalarField(g, 0.7));
    for (std::size_t i = 0; i < g.node_count(); ++i)
        CHECK(onConst[i] == Catch::Approx(-2.0 * s.p.k * 0.7).epsilon(1e-14));

    Rng rng(404);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField u(g), v(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        u[i] = dist(rng);
        v[i] = dist(rng);
    }
    const double a = 1.3, b = -0.6;
    const ScalarField combined = st.apply(a * u + b * v);
    ScalarField separate = a * st.apply(u) + b * st.apply(v);
    CHECK(max_abs_diff(combined, separate) <= 1e-12 * std::max(1.0, combined.max_abs()));
}

TEST_CASE("apply matches the directional derivative of residual_power", "[linearized]") {
    const Setup s = problem_setup(3, 2, 8, 0.5, "0.05*cos(2,1)", "const(-1) - 0.2*sin(3,1)",
                                  "const(-1) - 0.1*cos(1,1)");
    const Grid& g = s.p.bg.grid;
    const ScalarField w = TrigPoly::parse("0.08*sin(1,1) + 0.05*cos(2,1)", 3).sample(g);
    const ScalarField dir = TrigPoly::parse("0.1*cos(3,1) + 0.07*sin(2,1) + const(0.02)", 3).sample(g);
    const LinearizationState st = build_state(w, s.Heff, s.rho, s.p);
    const ScalarField lin = st.apply(dir);

    auto fd_mismatch = [&](double eps) {
        const ScalarField plus = residual_power(w + eps * dir, s.Heff, s.rho, s.p);
        const ScalarField minus = residual_power(w + (-eps) * dir, s.Heff, s.rho, s.p);
        double m = 0.0;
        for (std::size_t i = 0; i < g.node_count(); ++i)
            m = std::max(m, std::abs((plus[i] - minus[i]) / (2.0 * eps) - lin[i]));
        return m;
    };
    const double m3 = fd_mismatch(1e-3);
    const double m4 = fd_mismatch(1e-4);
    CHECK(m4 <= 1e-5);
    const double order = std::log10(m3 / m4);
    CHECK(order >= 1.7);
    CHECK(order <= 2.3);
}

TEST_CASE("Q is the trace-augmented Newton transformation pointwise", "[linearized]") {
    const Setup s = problem_setup(3, 3, 8, 0.25, "0.04*sin(3,1)", "uniform(-1.2)", "const(-0.8)");
    const Grid& g = s.p.bg.grid;
    const ScalarField w = TrigPoly::parse("0.06*cos(1,1)", 3).sample(g);
    const LinearizationState st = build_state(w, s.Heff, s.rho, s.p);
    const double c1 = (1.0 - s.p.bg.t) / static_cast<double>(g.dim - 2);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        SymMatrix expected = st.Tfield[i];
        const double tr = st.Tfield[i].trace();
        for (int a = 0; a < g.dim; ++a) expected(a, a) += c1 * tr;
        CHECK(testutil::max_entry_diff(st.Qfield[i], expected) <= 1e-14);
    }
}

TEST_CASE("ellipticity certificate on trivial and mirrored states", "[linearized]") {
    const int n = 3, k = 2;
    const Setup s = trivial_setup(n, k, 8);
    const Grid& g = s.p.bg.grid;
    const LinearizationState st = build_state(ScalarField(g), s.Heff, s.rho, s.p);
    const EllipticityReport rep = ellipticity_certificate(st);
    const double c = std::pow(binomial(n, k), -1.0 / k);
    const double expected = (1.0 + n * 1.0 / (n - 2.0)) * binomial(n - 1, k - 1) * std::pow(c, k - 1);
    CHECK(rep.elliptic);
    CHECK(rep.zeroOrderNegative);
    CHECK(rep.minQEigenvalue == Catch::Approx(expected).epsilon(1e-12));
    CHECK(rep.maxZeroOrder == Catch::Approx(-2.0 * k).epsilon(1e-12));

    // flipping the homotopy tensor puts the bar field in the negative cone;
    // for even k its Q is negative definite
    Setup mirror = s;
    mirror.Heff *= -1.0;
    const LinearizationState stm = build_state(ScalarField(g), mirror.Heff, mirror.rho, mirror.p);
    const EllipticityReport repm = ellipticity_certificate(stm);
    CHECK_FALSE(repm.elliptic);
    CHECK(repm.minQEigenvalue < 0.0);
    CHECK(min_eigenvalue(-1.0 * stm.Qfield[0]) > 0.0);
}

TEST_CASE("dense assembly reproduces apply and exposes the matrix structure", "[linearized]") {
    const Setup s = trivial_setup(3, 2, 8);
    const Grid& g = s.p.bg.grid;
    const LinearizationState st = build_state(ScalarField(g), s.Heff, s.rho, s.p);
    const Eigen::MatrixXd m = dense_assemble(st);
    const auto nn = static_cast<Eigen::Index>(g.node_count());

    Rng rng(777);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField x(g);
    Eigen::VectorXd xe(nn);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        x[i] = dist(rng);
        xe(static_cast<Eigen::Index>(i)) = x[i];
    }
    const ScalarField ax = st.apply(x);
    const Eigen::VectorXd axe = m * xe;
    double diff = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i)
        diff = std::max(diff, std::abs(ax[i] - axe(static_cast<Eigen::Index>(i))));
    CHECK(diff <= 1e-12);

    // row sums act on constants: A 1 = -2k
    const Eigen::VectorXd rowSums = m * Eigen::VectorXd::Ones(nn);
    CHECK((rowSums.array() + 2.0 * s.p.k).abs().maxCoeff() <= 1e-10);

    // isotropic Q: nonnegative off-diagonal entries, so a discrete maximum
    // principle holds; its inverse-nonpositivity form is testable directly
    double minOff = 0.0;
    for (Eigen::Index r = 0; r < nn; ++r)
        for (Eigen::Index c2 = 0; c2 < nn; ++c2)
            if (r != c2) minOff = std::min(minOff, m(r, c2));
    CHECK(minOff >= -1e-12);

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    for (int rep = 0; rep < 3; ++rep) {
        Eigen::VectorXd rhs(nn);
        for (Eigen::Index i = 0; i < nn; ++i) rhs(i) = std::abs(dist(rng));
        const Eigen::VectorXd sol = lu.solve(rhs);
        CHECK(sol.maxCoeff() <= 1e-12);
    }

    const Setup big = trivial_setup(3, 2, 17);
    CHECK_THROWS_AS(dense_assemble(build_state(ScalarField(big.p.bg.grid), big.Heff, big.rho, big.p)),
                    std::length_error);
}

TEST_CASE("smallest singular value of the dense operator is positive", "[linearized]") {
    const Setup s = trivial_setup(3, 2, 4);
    const Grid& g = s.p.bg.grid;
    const LinearizationState st = build_state(ScalarField(g), s.Heff, s.rho, s.p);
    const Eigen::MatrixXd m = dense_assemble(st);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    CHECK(svd.singularValues().minCoeff() > 0.0);
}

TEST_CASE("gmres with diagonal preconditioning matches the dense solve", "[krylov]") {
    const Setup s = trivial_setup(3, 2, 8);
    const Grid& g = s.p.bg.grid;
    const LinearizationState st = build_state(ScalarField(g), s.Heff, s.rho, s.p);
    const Eigen::MatrixXd m = dense_assemble(st);
    const std::size_t n = g.node_count();

    Rng rng(2718);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> b(n);
    for (auto& v : b) v = dist(rng);

    const std::vector<double> diag = operator_diagonal(st);
    std::vector<double> invDiag(n);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(diag[i] < 0.0);
        invDiag[i] = 1.0 / diag[i];
    }

    auto matvec = [&](std::span<const double> xin, std::span<double> yout) {
        ScalarField xf(g);
        for (std::size_t i = 0; i < n; ++i) xf[i] = xin[i];
        const ScalarField y = st.apply(xf);
        for (std::size_t i = 0; i < n; ++i) yout[i] = y[i];
    };

    std::vector<double> x(n, 0.0);
    const KrylovResult kr = gmres(matvec, std::span<const double>(b), std::span<double>(x),
                                  std::span<const double>(invDiag), 1e-12, 60, 2000);
    CHECK(kr.converged);

    Eigen::VectorXd be(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) be(static_cast<Eigen::Index>(i)) = b[i];
    const Eigen::VectorXd xd = Eigen::PartialPivLU<Eigen::MatrixXd>(m).solve(be);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        diff = std::max(diff, std::abs(x[i] - xd(static_cast<Eigen::Index>(i))));
    CHECK(diff <= 1e-8);
}
