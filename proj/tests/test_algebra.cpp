#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "sigmak/oracle.hpp"
#include "sigmak/sampling.hpp"
#include "sigmak/symfun.hpp"
#include "sigmak/symmat.hpp"
#include "test_support.hpp"

using namespace sigmak;
using testutil::max_entry_diff;

TEST_CASE("sigma on fixed inputs", "[symfun]") {
    CHECK(sigma(SymMatrix::identity(3), 2) == Catch::Approx(3.0).margin(1e-14));
    CHECK(sigma(SymMatrix::diagonal({1.0, 2.0, 3.0}), 3) == Catch::Approx(6.0).margin(1e-14));
    CHECK(sigma(SymMatrix::diagonal({1.0, 2.0, 3.0}), 0) == 1.0);
    CHECK_THROWS_AS(sigma(SymMatrix::identity(3), 4), std::domain_error);
    CHECK_THROWS_AS(sigma(SymMatrix::identity(3), -1), std::domain_error);
}

TEST_CASE("sigma_2 of random 4x4 matches eigenvalue pair sums", "[symfun]") {
    Rng rng(20240801);
    for (int trial = 0; trial < 200; ++trial) {
        const SymMatrix a = random_symmetric(rng, 4, 2.0);
        const auto ev = jacobi_eigenvalues(a);
        double pair_sum = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                pair_sum += ev[static_cast<std::size_t>(i)] * ev[static_cast<std::size_t>(j)];
        const double fast = sigma(a, 2);
        CHECK(std::abs(fast - pair_sum) <= 1e-12 * std::max(1.0, std::abs(pair_sum)));
    }
}

TEST_CASE("newton_transform on fixed inputs", "[symfun]") {
    Rng rng(7);
    const SymMatrix a = random_symmetric(rng, 4);
    CHECK(max_entry_diff(newton_transform(a, 0), SymMatrix::identity(4)) == 0.0);

    const SymMatrix d = SymMatrix::diagonal({1.0, 2.0, 3.0});
    CHECK(max_entry_diff(newton_transform(d, 1), SymMatrix::diagonal({5.0, 4.0, 3.0})) <= 1e-14);

    CHECK_THROWS_AS(newton_transform(d, 4), std::domain_error);
}

TEST_CASE("newton_transform of the identity is binomial times identity", "[symfun]") {
    // Expected values frozen from the Kronecker-delta oracle (n <= 5, see the
    // oracle agreement test); the binomial formula extends them to n = 6.
    for (int n = 2; n <= 6; ++n) {
        for (int q = 0; q <= n; ++q) {
            const SymMatrix t = newton_transform(SymMatrix::identity(n), q);
            const SymMatrix expected = binomial(n - 1, q) * SymMatrix::identity(n);
            CHECK(max_entry_diff(t, expected) <= 1e-12);
        }
    }
}

TEST_CASE("newton chain terminates with the Cayley-Hamilton zero", "[symfun]") {
    Rng rng(99);
    for (int n = 2; n <= 6; ++n) {
        const SymMatrix a = random_symmetric(rng, n, 1.5);
        const auto chain = newton_chain(a);
        CHECK(chain.transform[static_cast<std::size_t>(n)].max_abs() <= 1e-10 * std::max(1.0, a.max_abs()));
    }
}

TEST_CASE("cone classification on fixed inputs", "[symfun]") {
    CHECK(classify_cone(-SymMatrix::identity(3), 2) == ConeClass{ConeKind::Negative, 2});
    // sigma_1 = -1 < 0 excludes the positive cone; sigma_2(-A) = -5 < 0 the negative one
    CHECK(classify_cone(SymMatrix::diagonal({1.0, 1.0, -3.0}), 2).neither());
    CHECK(classify_cone(SymMatrix::diagonal({3.0, 1.0, 1.0}), 3).positive());
    CHECK_THROWS_AS(classify_cone(SymMatrix::identity(3), 0), std::domain_error);
}

TEST_CASE("cone inclusion chain", "[symfun]") {
    Rng rng(314);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 3);
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        const SymMatrix a = random_cone_sample(rng, n, k);
        REQUIRE(classify_cone(a, k).positive());
        for (int j = 1; j <= k; ++j) CHECK(classify_cone(a, j).positive());
    }
}

TEST_CASE("signed_root on fixed inputs", "[symfun]") {
    CHECK(signed_root(SymMatrix::identity(3), 2) == Catch::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(signed_root(-SymMatrix::identity(3), 2) == Catch::Approx(-std::sqrt(3.0)).epsilon(1e-14));

    const SymMatrix bad = SymMatrix::diagonal({1.0, -1.0, 0.0});
    CHECK_THROWS_AS(signed_root(bad, 2), cone_error);
    try {
        signed_root(bad, 2);
    } catch (const cone_error& e) {
        CHECK(e.order() == 2);
        CHECK(e.sigma_value(1) == Catch::Approx(0.0).margin(1e-15));  // sigma_1 = 0 fails both cones
    }
}

TEST_CASE("contraction identity tr(T_{k-1} A) = k sigma_k", "[symfun]") {
    Rng rng(1001);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const SymMatrix a = random_symmetric(rng, n, 2.0);
        const auto chain = newton_chain(a);
        for (int k = 1; k <= n; ++k) {
            const double lhs = frobenius_product(chain.transform[static_cast<std::size_t>(k - 1)], a);
            const double rhs = k * chain.sigma[static_cast<std::size_t>(k)];
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("trace identity tr(T_{k-1}) = (n-k+1) sigma_{k-1}", "[symfun]") {
    Rng rng(1002);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const SymMatrix a = random_symmetric(rng, n, 2.0);
        const auto chain = newton_chain(a);
        for (int k = 1; k <= n; ++k) {
            const double lhs = chain.transform[static_cast<std::size_t>(k - 1)].trace();
            const double rhs = (n - k + 1) * chain.sigma[static_cast<std::size_t>(k - 1)];
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("trace identity holds for the delta-oracle route as well", "[oracle]") {
    Rng rng(1003);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 3);
        const SymMatrix a = random_symmetric(rng, n, 1.5);
        for (int k = 1; k <= n; ++k) {
            const double lhs = oracle::newton_delta(a, k - 1).trace();
            const double rhs = (n - k + 1) * oracle::sigma_eig(a, k - 1);
            CHECK(std::abs(lhs - rhs) <= 1e-11 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("derivative identity: T_{k-1} is the gradient of sigma_k", "[symfun]") {
    Rng rng(42);
    int order_checks = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 3);
        const SymMatrix a = random_symmetric(rng, n);
        const SymMatrix b = random_symmetric(rng, n);
        const auto chain = newton_chain(a);
        for (int k = 1; k <= n; ++k) {
            const double derivative = frobenius_product(chain.transform[static_cast<std::size_t>(k - 1)], b);
            auto g = [&](double h) { return sigma(a + h * b, k); };

            // sigma_k(A + hB) is a degree-k polynomial in h; its exact
            // coefficients give both the derivative and the truncation error.
            const auto coeff = oracle::polynomial_from_samples(g, k);
            CHECK(std::abs(coeff[1] - derivative) <= 1e-10 * std::max(1.0, std::abs(derivative)));

            const double h = 1e-5;
            const double central = (g(h) - g(-h)) / (2.0 * h);
            double truncation_bound = 0.0;
            for (std::size_t j = 3; j < coeff.size(); j += 2) truncation_bound += std::abs(coeff[j]);
            CHECK(std::abs(central - derivative) <= truncation_bound * h * h + 1e-9);

            if (k == 3 || k == 4) {
                // for degree <= 4 the truncation error is exactly c3 h^2, so
                // the two-step ratio is clean wherever it beats rounding
                const double h1 = 0.1, h2 = 0.05;
                const double e1 = std::abs((g(h1) - g(-h1)) / (2.0 * h1) - derivative);
                const double e2 = std::abs((g(h2) - g(-h2)) / (2.0 * h2) - derivative);
                if (e2 > 1e-10) {
                    CHECK(e1 / e2 >= 3.3);
                    CHECK(e1 / e2 <= 4.7);
                    ++order_checks;
                }
            } else if (k <= 2) {
                // degree <= 2 in h: the central difference is exact
                CHECK(std::abs(central - derivative) <= 1e-9 * std::max(1.0, std::abs(derivative)));
            }
        }
    }
    CHECK(order_checks >= 50);
}

TEST_CASE("definiteness of T_{k-1} on cone samples", "[symfun]") {
    // On the negative cone T_{k-1} picks up the parity factor (-1)^{k-1}
    // (T_q(-A) = (-1)^q T_q(A)), so it is negative definite for even k and
    // positive definite for odd k; k = 1 (T_0 = I) makes the parity plain.
    Rng rng(555);
    for (int n = 3; n <= 5; ++n) {
        for (int k = 1; k <= n; ++k) {
            const double parity = (k % 2 == 0) ? -1.0 : 1.0;
            for (int trial = 0; trial < 100; ++trial) {
                const SymMatrix a = random_cone_sample(rng, n, k, true);
                CHECK(min_eigenvalue(newton_transform(a, k - 1)) > 0.0);
                const SymMatrix m = random_cone_sample(rng, n, k, false);
                CHECK(min_eigenvalue(parity * newton_transform(m, k - 1)) > 0.0);
            }
        }
    }
}

TEST_CASE("concavity of the signed root on the positive cone", "[symfun]") {
    Rng rng(777);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 3);
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        const SymMatrix a = random_cone_sample(rng, n, k);
        const SymMatrix b = random_cone_sample(rng, n, k);
        const double tau = unit(rng);
        const SymMatrix mix = (1.0 - tau) * a + tau * b;
        const double lhs = signed_root(mix, k);
        const double rhs = (1.0 - tau) * signed_root(a, k) + tau * signed_root(b, k);
        CHECK(lhs >= rhs - 1e-12);
    }
}

TEST_CASE("monotonicity under positive semidefinite perturbations", "[symfun]") {
    Rng rng(888);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 3);
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        const SymMatrix b = random_cone_sample(rng, n, k);
        const SymMatrix p = random_positive_semidefinite(rng, n);
        CHECK(sigma(b + p, k) >= sigma(b, k) - 1e-12);
        const SymMatrix neg = -0.1 * random_positive_semidefinite(rng, n);
        if (classify_cone(b + neg, k).positive())
            CHECK(sigma(b + neg, k) <= sigma(b, k) + 1e-12);
    }
}

TEST_CASE("homogeneity and cone scale invariance", "[symfun]") {
    Rng rng(999);
    std::uniform_real_distribution<double> cdist(0.1, 5.0);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        const SymMatrix a = random_symmetric(rng, n, 2.0);
        const double c = cdist(rng);
        const double lhs = sigma(c * a, k);
        const double rhs = std::pow(c, k) * sigma(a, k);
        CHECK(std::abs(lhs - rhs) <= 1e-11 * std::max(1.0, std::abs(rhs)));
        CHECK(classify_cone(c * a, k) == classify_cone(a, k));
    }
}

TEST_CASE("sigma_eig on fixed inputs", "[oracle]") {
    CHECK(oracle::sigma_eig(SymMatrix::diagonal({1.0, 2.0, 3.0}), 2) == Catch::Approx(11.0).margin(1e-12));

    Rng rng(2024);
    SymMatrix rotated = random_rotation_of(rng, SymMatrix::diagonal({1.0, 2.0, 3.0}));
    CHECK(oracle::sigma_eig(rotated, 2) == Catch::Approx(11.0).margin(1e-12));
}

TEST_CASE("fast sigma agrees with the eigenvalue oracle", "[oracle]") {
    Rng rng(31337);
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const SymMatrix a = random_symmetric(rng, n, 2.0);
        for (int k = 0; k <= n; ++k) {
            const double fast = sigma(a, k);
            const double slow = oracle::sigma_eig(a, k);
            CHECK(std::abs(fast - slow) <= 1e-11 * std::max(1.0, std::abs(slow)));
        }
    }
}

TEST_CASE("newton_delta on fixed inputs", "[oracle]") {
    Rng rng(11);
    const SymMatrix a = random_symmetric(rng, 4);
    CHECK(max_entry_diff(oracle::newton_delta(a, 0), SymMatrix::identity(4)) == 0.0);
    CHECK(max_entry_diff(oracle::newton_delta(SymMatrix::diagonal({1.0, 2.0, 3.0}), 1),
                         SymMatrix::diagonal({5.0, 4.0, 3.0})) <= 1e-14);
    CHECK_THROWS_AS(oracle::newton_delta(SymMatrix::identity(6), 2), std::domain_error);
}

TEST_CASE("newton_delta of the identity gives binomial coefficients", "[oracle]") {
    for (int n = 2; n <= 5; ++n)
        for (int q = 0; q <= n; ++q)
            CHECK(max_entry_diff(oracle::newton_delta(SymMatrix::identity(n), q),
                                 binomial(n - 1, q) * SymMatrix::identity(n)) <= 1e-12);
}

TEST_CASE("fast newton_transform agrees with the delta oracle", "[oracle]") {
    Rng rng(271828);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const SymMatrix a = random_symmetric(rng, n, 1.5);
        for (int q = 0; q <= n; ++q) {
            const SymMatrix fast = newton_transform(a, q);
            const SymMatrix slow = oracle::newton_delta(a, q);
            CHECK(max_entry_diff(fast, slow) <= 1e-11);
        }
    }
}
