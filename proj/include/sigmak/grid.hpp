#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sigmak/symmat.hpp"

namespace sigmak {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Uniform periodic grid on an n-torus, n in {3,4}. Node-major storage,
/// axis 0 fastest; every axis wraps.
struct Grid {
    int dim = 0;
    std::array<int, kMaxDim> sizes{};
    std::array<double, kMaxDim> lengths{};
    std::array<double, kMaxDim> spacing{};
    std::array<std::size_t, kMaxDim> strides{};
    std::size_t nodes = 0;

    static Grid make(int dim, std::span<const int> sizes, std::span<const double> lengths = {}) {
        if (dim < 3 || dim > 4) throw std::invalid_argument("Grid: dim must be 3 or 4");
        if (static_cast<int>(sizes.size()) != dim)
            throw std::invalid_argument("Grid: need one size per axis");
        if (!lengths.empty() && static_cast<int>(lengths.size()) != dim)
            throw std::invalid_argument("Grid: need one length per axis");
        Grid g;
        g.dim = dim;
        g.nodes = 1;
        for (int a = 0; a < dim; ++a) {
            const int s = sizes[static_cast<std::size_t>(a)];
            if (s < 3) throw std::invalid_argument("Grid: need at least 3 nodes per axis");
            g.sizes[static_cast<std::size_t>(a)] = s;
            g.lengths[static_cast<std::size_t>(a)] =
                lengths.empty() ? kTwoPi : lengths[static_cast<std::size_t>(a)];
            g.spacing[static_cast<std::size_t>(a)] =
                g.lengths[static_cast<std::size_t>(a)] / static_cast<double>(s);
            g.strides[static_cast<std::size_t>(a)] = g.nodes;
            g.nodes *= static_cast<std::size_t>(s);
        }
        return g;
    }

    static Grid cube(int dim, int nodesPerAxis, double length = kTwoPi) {
        std::array<int, kMaxDim> s{};
        std::array<double, kMaxDim> l{};
        for (int a = 0; a < dim; ++a) {
            s[static_cast<std::size_t>(a)] = nodesPerAxis;
            l[static_cast<std::size_t>(a)] = length;
        }
        return make(dim, std::span<const int>(s.data(), static_cast<std::size_t>(dim)),
                    std::span<const double>(l.data(), static_cast<std::size_t>(dim)));
    }

    [[nodiscard]] std::size_t node_count() const { return nodes; }

    [[nodiscard]] int coord_index(std::size_t node, int axis) const {
        return static_cast<int>((node / strides[static_cast<std::size_t>(axis)]) %
                                static_cast<std::size_t>(sizes[static_cast<std::size_t>(axis)]));
    }

    [[nodiscard]] std::array<int, kMaxDim> coords_of(std::size_t node) const {
        std::array<int, kMaxDim> c{};
        for (int a = 0; a < dim; ++a) c[static_cast<std::size_t>(a)] = coord_index(node, a);
        return c;
    }

    [[nodiscard]] std::size_t index_of(std::span<const int> coords) const {
        std::size_t idx = 0;
        for (int a = 0; a < dim; ++a)
            idx += static_cast<std::size_t>(coords[static_cast<std::size_t>(a)]) *
                   strides[static_cast<std::size_t>(a)];
        return idx;
    }

    /// Periodic neighbor `steps` nodes away along `axis`.
    [[nodiscard]] std::size_t neighbor(std::size_t node, int axis, int steps) const {
        const int size = sizes[static_cast<std::size_t>(axis)];
        const int ia = coord_index(node, axis);
        int ja = (ia + steps) % size;
        if (ja < 0) ja += size;
        return node + (static_cast<std::size_t>(ja) - static_cast<std::size_t>(ia)) *
                          strides[static_cast<std::size_t>(axis)];
    }

    [[nodiscard]] std::array<double, kMaxDim> position(std::size_t node) const {
        std::array<double, kMaxDim> x{};
        for (int a = 0; a < dim; ++a)
            x[static_cast<std::size_t>(a)] = coord_index(node, a) * spacing[static_cast<std::size_t>(a)];
        return x;
    }

    friend bool operator==(const Grid&, const Grid&) = default;
};

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid_(g), values_(g.node_count(), fill) {}

    static ScalarField sample(const Grid& g,
                              const std::function<double(const std::array<double, kMaxDim>&)>& f) {
        ScalarField out(g);
        for (std::size_t i = 0; i < g.node_count(); ++i) out.values_[i] = f(g.position(i));
        return out;
    }

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<double> values() { return values_; }

    ScalarField& operator+=(const ScalarField& o) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    ScalarField& operator*=(double c) {
        for (double& v : values_) v *= c;
        return *this;
    }
    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(double c, ScalarField a) { return a *= c; }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }
    [[nodiscard]] double min_value() const {
        double m = values_.empty() ? 0.0 : values_[0];
        for (double v : values_) m = std::min(m, v);
        return m;
    }
    [[nodiscard]] double max_value() const {
        double m = values_.empty() ? 0.0 : values_[0];
        for (double v : values_) m = std::max(m, v);
        return m;
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// One n-vector per node (node-major, component fastest within a node).
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid& g) : grid_(g), values_(g.node_count() * static_cast<std::size_t>(g.dim), 0.0) {}

    [[nodiscard]] const Grid& grid() const { return grid_; }
    double& at(std::size_t node, int axis) {
        return values_[node * static_cast<std::size_t>(grid_.dim) + static_cast<std::size_t>(axis)];
    }
    double at(std::size_t node, int axis) const {
        return values_[node * static_cast<std::size_t>(grid_.dim) + static_cast<std::size_t>(axis)];
    }
    [[nodiscard]] std::span<const double> node_span(std::size_t node) const {
        return {values_.data() + node * static_cast<std::size_t>(grid_.dim), static_cast<std::size_t>(grid_.dim)};
    }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

/// One symmetric matrix (dim = grid.dim) per node.
class TensorField {
public:
    TensorField() = default;
    explicit TensorField(const Grid& g) : grid_(g), values_(g.node_count(), SymMatrix(g.dim)) {}

    [[nodiscard]] const Grid& grid() const { return grid_; }
    SymMatrix& operator[](std::size_t i) { return values_[i]; }
    const SymMatrix& operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    TensorField& operator+=(const TensorField& o) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    TensorField& operator-=(const TensorField& o) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    TensorField& operator*=(double c) {
        for (auto& v : values_) v *= c;
        return *this;
    }
    friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
    friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
    friend TensorField operator*(double c, TensorField a) { return a *= c; }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (const auto& v : values_) m = std::max(m, v.max_abs());
        return m;
    }

private:
    Grid grid_;
    std::vector<SymMatrix> values_;
};

inline double max_abs_diff(const TensorField& a, const TensorField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (int r = 0; r < a[i].dim(); ++r)
            for (int c = r; c < a[i].dim(); ++c) m = std::max(m, std::abs(a[i](r, c) - b[i](r, c)));
    }
    return m;
}

inline void check_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": fields live on different grids");
}

}  // namespace sigmak
