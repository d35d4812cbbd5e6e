#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>

namespace sigmak {

inline constexpr int kMaxDim = 6;
inline constexpr int kMaxPacked = kMaxDim * (kMaxDim + 1) / 2;

/// Dense symmetric n x n matrix, n in [2,6], packed upper-triangle storage
/// (row-major: (0,0),(0,1),...,(0,n-1),(1,1),...). Value type, no allocation.
class SymMatrix {
public:
    SymMatrix() = default;

    explicit SymMatrix(int n) : dim_(n) {
        check_dim(n);
        entries_.fill(0.0);
    }

    static SymMatrix identity(int n) {
        SymMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static SymMatrix diagonal(std::span<const double> d) {
        SymMatrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.dim_; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        return m;
    }

    static SymMatrix diagonal(std::initializer_list<double> d) {
        return diagonal(std::span<const double>(d.begin(), d.size()));
    }

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] int packed_size() const { return dim_ * (dim_ + 1) / 2; }

    double& operator()(int i, int j) { return entries_[packed_index(i, j)]; }
    double operator()(int i, int j) const { return entries_[packed_index(i, j)]; }

    [[nodiscard]] double* packed() { return entries_.data(); }
    [[nodiscard]] const double* packed() const { return entries_.data(); }

    SymMatrix& operator+=(const SymMatrix& o) {
        for (int p = 0; p < packed_size(); ++p) entries_[p] += o.entries_[p];
        return *this;
    }
    SymMatrix& operator-=(const SymMatrix& o) {
        for (int p = 0; p < packed_size(); ++p) entries_[p] -= o.entries_[p];
        return *this;
    }
    SymMatrix& operator*=(double c) {
        for (int p = 0; p < packed_size(); ++p) entries_[p] *= c;
        return *this;
    }

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(double c, SymMatrix a) { return a *= c; }
    friend SymMatrix operator*(SymMatrix a, double c) { return a *= c; }
    friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }

    [[nodiscard]] double trace() const {
        double t = 0.0;
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (int p = 0; p < packed_size(); ++p) m = std::max(m, std::abs(entries_[p]));
        return m;
    }

    /// y = A x
    void mat_vec(std::span<const double> x, std::span<double> y) const {
        for (int i = 0; i < dim_; ++i) {
            double s = 0.0;
            for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = s;
        }
    }

    /// x^T A x
    [[nodiscard]] double quadratic_form(std::span<const double> x) const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                s += (*this)(i, j) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
        return s;
    }

private:
    static void check_dim(int n) {
        if (n < 2 || n > kMaxDim) throw std::invalid_argument("SymMatrix: dim must be in [2,6]");
    }

    [[nodiscard]] std::size_t packed_index(int i, int j) const {
        if (i > j) std::swap(i, j);
        return static_cast<std::size_t>(i * dim_ - i * (i - 1) / 2 + (j - i));
    }

    int dim_ = 0;
    std::array<double, kMaxPacked> entries_{};
};

/// tr(A B) for symmetric A, B = sum_ij A_ij B_ij.
inline double frobenius_product(const SymMatrix& a, const SymMatrix& b) {
    double s = 0.0;
    const int n = a.dim();
    for (int i = 0; i < n; ++i) {
        s += a(i, i) * b(i, i);
        for (int j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * b(i, j);
    }
    return s;
}

/// Symmetrized product (AB + BA)/2. Equals AB whenever A and B commute
/// (in particular for B a polynomial in A), and is symmetric always.
inline SymMatrix sym_product(const SymMatrix& a, const SymMatrix& b) {
    const int n = a.dim();
    SymMatrix r(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double sij = 0.0, sji = 0.0;
            for (int l = 0; l < n; ++l) {
                sij += a(i, l) * b(l, j);
                sji += a(j, l) * b(l, i);
            }
            r(i, j) = 0.5 * (sij + sji);
        }
    }
    return r;
}

/// Rank-one symmetric outer product x x^T (scaled).
inline SymMatrix outer(std::span<const double> x, double scale = 1.0) {
    const int n = static_cast<int>(x.size());
    SymMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            r(i, j) = scale * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
    return r;
}

}  // namespace sigmak
