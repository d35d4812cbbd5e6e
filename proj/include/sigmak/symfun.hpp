#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sigmak/symmat.hpp"

namespace sigmak {

/// Binomial coefficient as a double (exact for the small arguments used here).
inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * static_cast<double>(n - k + j) / static_cast<double>(j);
    return r;
}

/// All elementary symmetric functions sigma_0..sigma_n of the eigenvalues of A
/// together with the Newton transformations T_0..T_n, from the coupled
/// characteristic-polynomial recursion
///     T_0 = I,   sigma_q = tr(A T_{q-1}) / q,   T_q = sigma_q I - A T_{q-1}.
/// No eigensolver is involved; T_n vanishes by Cayley-Hamilton (checked in tests).
struct NewtonChain {
    int dim = 0;
    std::array<double, kMaxDim + 1> sigma{};
    std::array<SymMatrix, kMaxDim + 1> transform{};
};

inline NewtonChain newton_chain(const SymMatrix& a) {
    const int n = a.dim();
    NewtonChain c;
    c.dim = n;
    c.sigma[0] = 1.0;
    c.transform[0] = SymMatrix::identity(n);
    for (int q = 1; q <= n; ++q) {
        const SymMatrix prod = sym_product(a, c.transform[q - 1]);
        c.sigma[q] = prod.trace() / static_cast<double>(q);
        SymMatrix t = -prod;
        for (int i = 0; i < n; ++i) t(i, i) += c.sigma[q];
        c.transform[q] = t;
    }
    return c;
}

namespace detail {
inline void check_order(int n, int k, const char* what) {
    if (k < 0 || k > n) {
        std::ostringstream os;
        os << what << ": order " << k << " out of range for dim " << n;
        throw std::domain_error(os.str());
    }
}
}  // namespace detail

/// k-th elementary symmetric function of the eigenvalues of A (sigma_0 = 1).
inline double sigma(const SymMatrix& a, int k) {
    detail::check_order(a.dim(), k, "sigma");
    if (k == 0) return 1.0;
    return newton_chain(a).sigma[static_cast<std::size_t>(k)];
}

/// q-th Newton transformation T_q(A) = sigma_q I - sigma_{q-1} A + ... + (-1)^q A^q.
inline SymMatrix newton_transform(const SymMatrix& a, int q) {
    detail::check_order(a.dim(), q, "newton_transform");
    if (q == 0) return SymMatrix::identity(a.dim());
    return newton_chain(a).transform[static_cast<std::size_t>(q)];
}

enum class ConeKind { Positive, Negative, Neither };

/// Classification of a symmetric matrix against the Garding cones of order k.
struct ConeClass {
    ConeKind kind = ConeKind::Neither;
    int k = 0;

    [[nodiscard]] bool positive() const { return kind == ConeKind::Positive; }
    [[nodiscard]] bool negative() const { return kind == ConeKind::Negative; }
    [[nodiscard]] bool neither() const { return kind == ConeKind::Neither; }

    friend bool operator==(const ConeClass&, const ConeClass&) = default;
};

/// sigma_j(-A) = (-1)^j sigma_j(A), so one chain decides both cones.
inline ConeClass classify_cone(const NewtonChain& chain, int k, double margin = 0.0) {
    detail::check_order(chain.dim, k, "classify_cone");
    if (k < 1) throw std::domain_error("classify_cone: k must be >= 1");
    bool pos = true, neg = true;
    double sign = 1.0;
    for (int j = 1; j <= k; ++j) {
        sign = -sign;  // (-1)^j
        const double sj = chain.sigma[static_cast<std::size_t>(j)];
        if (!(sj > margin)) pos = false;
        if (!(sign * sj > margin)) neg = false;
    }
    if (pos) return {ConeKind::Positive, k};
    if (neg) return {ConeKind::Negative, k};
    return {ConeKind::Neither, k};
}

inline ConeClass classify_cone(const SymMatrix& a, int k, double margin = 0.0) {
    return classify_cone(newton_chain(a), k, margin);
}

/// Smallest sigma_j, 1 <= j <= k: positive exactly when A lies strictly inside
/// the positive cone of order k.
inline double cone_margin(const NewtonChain& chain, int k) {
    detail::check_order(chain.dim, k, "cone_margin");
    double m = chain.sigma[1];
    for (int j = 2; j <= k; ++j) m = std::min(m, chain.sigma[static_cast<std::size_t>(j)]);
    return m;
}

/// Raised when an operand required to lie in a Garding cone does not.
/// Carries the sigma_j values that decided the rejection.
class cone_error : public std::runtime_error {
public:
    cone_error(std::string message, const NewtonChain& chain, int k)
        : std::runtime_error(build_message(std::move(message), chain, k)), k_(k) {
        for (int j = 0; j <= chain.dim; ++j) sigmas_[static_cast<std::size_t>(j)] = chain.sigma[static_cast<std::size_t>(j)];
        dim_ = chain.dim;
    }

    [[nodiscard]] int order() const { return k_; }
    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] double sigma_value(int j) const { return sigmas_[static_cast<std::size_t>(j)]; }

private:
    static std::string build_message(std::string message, const NewtonChain& chain, int k) {
        std::ostringstream os;
        os << message << " (k=" << k << "; sigma_j =";
        for (int j = 1; j <= chain.dim; ++j) os << ' ' << chain.sigma[static_cast<std::size_t>(j)];
        os << ')';
        return os.str();
    }

    std::array<double, kMaxDim + 1> sigmas_{};
    int k_ = 0;
    int dim_ = 0;
};

/// Signed k-th root: {sigma_k(A)}^{1/k} on the positive cone,
/// -|sigma_k(A)|^{1/k} on the negative cone; rejects everything else.
inline double signed_root(const NewtonChain& chain, int k) {
    const ConeClass c = classify_cone(chain, k);
    if (c.neither()) throw cone_error("signed_root: matrix lies in neither cone", chain, k);
    const double sk = chain.sigma[static_cast<std::size_t>(k)];
    const double root = std::pow(std::abs(sk), 1.0 / static_cast<double>(k));
    return c.positive() ? root : -root;
}

inline double signed_root(const SymMatrix& a, int k) {
    return signed_root(newton_chain(a), k);
}

}  // namespace sigmak
