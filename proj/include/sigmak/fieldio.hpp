#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigmak/grid.hpp"

namespace sigmak {

// CSV field dumps. Header: `# dim=<n> sizes=<s1,...> lengths=<l1,...>`, then
// one row per node in layout order (axis 0 fastest): index coordinates, then
// the value columns (scalar: 1; tensor: n(n+1)/2, row-major upper triangle).
namespace fieldio {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_header(std::ostream& os, const Grid& g) {
    os << "# dim=" << g.dim << " sizes=";
    for (int a = 0; a < g.dim; ++a) os << (a ? "," : "") << g.sizes[static_cast<std::size_t>(a)];
    os << " lengths=";
    for (int a = 0; a < g.dim; ++a)
        os << (a ? "," : "") << format_double(g.lengths[static_cast<std::size_t>(a)]);
    os << '\n';
}

inline void write_indices(std::ostream& os, const Grid& g, std::size_t node) {
    for (int a = 0; a < g.dim; ++a) os << (a ? "," : "") << g.coord_index(node, a);
}

inline void dump_scalar(std::ostream& os, const ScalarField& f) {
    const Grid& g = f.grid();
    write_header(os, g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        write_indices(os, g, i);
        os << ',' << format_double(f[i]) << '\n';
    }
}

inline void dump_tensor(std::ostream& os, const TensorField& f) {
    const Grid& g = f.grid();
    write_header(os, g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        write_indices(os, g, i);
        for (int r = 0; r < g.dim; ++r)
            for (int c = r; c < g.dim; ++c) os << ',' << format_double(f[i](r, c));
        os << '\n';
    }
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline Grid parse_header(const std::string& line) {
    int dim = 0;
    std::vector<int> sizes;
    std::vector<double> lengths;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        if (tok.rfind("dim=", 0) == 0) dim = std::stoi(tok.substr(4));
        else if (tok.rfind("sizes=", 0) == 0)
            for (const auto& p : split(tok.substr(6), ',')) sizes.push_back(std::stoi(p));
        else if (tok.rfind("lengths=", 0) == 0)
            for (const auto& p : split(tok.substr(8), ',')) lengths.push_back(std::stod(p));
    }
    if (dim == 0 || sizes.empty())
        throw std::runtime_error("field dump: malformed header: " + line);
    return Grid::make(dim, sizes, lengths);
}

}  // namespace detail

inline ScalarField load_scalar(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
        throw std::runtime_error("field dump: missing header line");
    const Grid g = detail::parse_header(line.substr(2));
    ScalarField f(g);
    std::vector<int> coords(static_cast<std::size_t>(g.dim));
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto parts = detail::split(line, ',');
        if (parts.size() != static_cast<std::size_t>(g.dim) + 1)
            throw std::runtime_error("field dump: bad row: " + line);
        for (int a = 0; a < g.dim; ++a) coords[static_cast<std::size_t>(a)] = std::stoi(parts[static_cast<std::size_t>(a)]);
        f[g.index_of(coords)] = std::stod(parts[static_cast<std::size_t>(g.dim)]);
        ++rows;
    }
    if (rows != g.node_count()) throw std::runtime_error("field dump: row count does not match grid");
    return f;
}

inline TensorField load_tensor(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
        throw std::runtime_error("field dump: missing header line");
    const Grid g = detail::parse_header(line.substr(2));
    TensorField f(g);
    const std::size_t ncols = static_cast<std::size_t>(g.dim) +
                              static_cast<std::size_t>(g.dim * (g.dim + 1) / 2);
    std::vector<int> coords(static_cast<std::size_t>(g.dim));
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto parts = detail::split(line, ',');
        if (parts.size() != ncols) throw std::runtime_error("field dump: bad row: " + line);
        for (int a = 0; a < g.dim; ++a) coords[static_cast<std::size_t>(a)] = std::stoi(parts[static_cast<std::size_t>(a)]);
        SymMatrix& m = f[g.index_of(coords)];
        std::size_t p = static_cast<std::size_t>(g.dim);
        for (int r = 0; r < g.dim; ++r)
            for (int c = r; c < g.dim; ++c) m(r, c) = std::stod(parts[p++]);
        ++rows;
    }
    if (rows != g.node_count()) throw std::runtime_error("field dump: row count does not match grid");
    return f;
}

}  // namespace fieldio
}  // namespace sigmak
