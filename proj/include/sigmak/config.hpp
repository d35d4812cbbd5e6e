#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sigmak/manufactured.hpp"
#include "sigmak/problem.hpp"
#include "sigmak/trigfield.hpp"

namespace sigmak {

/// Flat `key = value` run configuration. Order-insensitive, duplicate keys
/// rejected, `#` starts a comment. Field-valued keys use the trig
/// mini-language; S additionally accepts uniform(c).
struct RunConfig {
    int n = 0;
    int k = 0;
    std::vector<int> sizes;
    std::vector<double> lengths;
    double t = 0.0;
    std::string phiSpec = "0";
    std::string sSpec;
    std::string fSpec;
    std::string wExactSpec;
    std::string mmsMode = "consistent";  // or "analytic"
    CaseSign sign = CaseSign::Negative;
    Tolerances tol;
    double coneMargin = 0.0;
    unsigned long seed = 12345;
    std::string outPrefix = "sigmak";

    [[nodiscard]] bool hasWExact() const { return !wExactSpec.empty(); }
};

namespace configio {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace configio

inline RunConfig parse_config(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineNo = 0;
    while (std::getline(is, line)) {
        ++lineNo;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string stripped = configio::trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw parse_error("config line " + std::to_string(lineNo) + ": expected key = value");
        const std::string key = configio::trim(stripped.substr(0, eq));
        const std::string value = configio::trim(stripped.substr(eq + 1));
        if (key.empty()) throw parse_error("config line " + std::to_string(lineNo) + ": empty key");
        if (kv.count(key)) throw parse_error("config: duplicate key '" + key + "'");
        kv[key] = value;
    }

    RunConfig cfg;
    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto require = [&](const char* key) {
        auto v = take(key);
        if (!v) throw parse_error(std::string("config: missing required key '") + key + "'");
        return *v;
    };
    auto to_int = [](const std::string& s, const char* what) {
        try {
            std::size_t pos = 0;
            const int v = std::stoi(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw parse_error(std::string("config: ") + what + " is not an integer: " + s);
        }
    };
    auto to_double = [](const std::string& s, const char* what) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw parse_error(std::string("config: ") + what + " is not a number: " + s);
        }
    };

    cfg.n = to_int(require("n"), "n");
    cfg.k = to_int(require("k"), "k");
    for (const auto& p : configio::split_csv(require("sizes"))) cfg.sizes.push_back(to_int(p, "sizes"));
    if (auto v = take("lengths"))
        for (const auto& p : configio::split_csv(*v)) cfg.lengths.push_back(to_double(p, "lengths"));
    if (auto v = take("t")) cfg.t = to_double(*v, "t");
    if (auto v = take("phi")) cfg.phiSpec = *v;
    if (auto v = take("S")) cfg.sSpec = *v;
    if (auto v = take("f")) cfg.fSpec = *v;
    if (auto v = take("w_exact")) cfg.wExactSpec = *v;
    if (auto v = take("mms_mode")) {
        if (*v != "consistent" && *v != "analytic")
            throw parse_error("config: mms_mode must be 'consistent' or 'analytic'");
        cfg.mmsMode = *v;
    }
    if (auto v = take("case")) {
        if (*v == "negative") cfg.sign = CaseSign::Negative;
        else if (*v == "positive") cfg.sign = CaseSign::Positive;
        else throw parse_error("config: case must be 'negative' or 'positive'");
    }
    if (auto v = take("tol")) cfg.tol.newtonTol = to_double(*v, "tol");
    if (auto v = take("krylov_tol")) cfg.tol.krylovTol = to_double(*v, "krylov_tol");
    if (auto v = take("max_newton")) cfg.tol.maxNewton = to_int(*v, "max_newton");
    if (auto v = take("cone_margin")) cfg.coneMargin = to_double(*v, "cone_margin");
    if (auto v = take("seed")) cfg.seed = static_cast<unsigned long>(to_double(*v, "seed"));
    if (auto v = take("out_prefix")) cfg.outPrefix = *v;

    if (!kv.empty()) throw parse_error("config: unknown key '" + kv.begin()->first + "'");
    if (static_cast<int>(cfg.sizes.size()) != cfg.n)
        throw parse_error("config: sizes must list one entry per axis");
    if (!cfg.lengths.empty() && static_cast<int>(cfg.lengths.size()) != cfg.n)
        throw parse_error("config: lengths must list one entry per axis");
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw parse_error("config: cannot open '" + path + "'");
    return parse_config(is);
}

/// A validated problem plus the exact potential when the configuration is a
/// manufactured one (w_exact given instead of f).
struct BuiltProblem {
    ProblemSpec p;
    std::optional<ScalarField> wExact;
};

inline BuiltProblem build_problem(const RunConfig& cfg) {
    const Grid grid = Grid::make(cfg.n, cfg.sizes, cfg.lengths);
    if (cfg.sSpec.empty()) throw parse_error("config: missing required key 'S'");
    const TrigPoly phiPoly = TrigPoly::parse(cfg.phiSpec, cfg.n);
    const TrigPoly psiPoly = TensorSpec::parse(cfg.sSpec, cfg.n).psi;

    if (cfg.hasWExact()) {
        const TrigPoly wPoly = TrigPoly::parse(cfg.wExactSpec, cfg.n);
        if (!cfg.fSpec.empty())
            throw parse_error("config: give either f or w_exact, not both");
        oracle::ManufacturedProblem m =
            cfg.mmsMode == "analytic"
                ? oracle::make_manufactured_analytic(grid, cfg.k, cfg.t, phiPoly, psiPoly, wPoly,
                                                     cfg.coneMargin)
                : [&] {
                      const ScalarField phi = phiPoly.sample(grid);
                      const ScalarField psi = psiPoly.sample(grid);
                      Background tmp(grid, phi, TensorField(grid), cfg.t, cfg.coneMargin);
                      TensorField S = metric_tensor(tmp);
                      for (std::size_t i = 0; i < grid.node_count(); ++i) S[i] *= psi[i];
                      return oracle::make_manufactured(grid, cfg.k, cfg.t, phi, S,
                                                       wPoly.sample(grid), cfg.coneMargin);
                  }();
        m.p.sign = cfg.sign;
        m.p.tol = cfg.tol;
        validate_problem(m.p);
        return {m.p, m.wExact};
    }

    if (cfg.fSpec.empty()) throw parse_error("config: missing required key 'f' (or w_exact)");
    const ScalarField phi = phiPoly.sample(grid);
    const ScalarField psi = psiPoly.sample(grid);
    Background tmp(grid, phi, TensorField(grid), cfg.t, cfg.coneMargin);
    TensorField S = metric_tensor(tmp);
    for (std::size_t i = 0; i < grid.node_count(); ++i) S[i] *= psi[i];
    BuiltProblem built{{Background(grid, phi, S, cfg.t, cfg.coneMargin), cfg.k,
                        TrigPoly::parse(cfg.fSpec, cfg.n).sample(grid), cfg.sign, cfg.tol},
                       std::nullopt};
    validate_problem(built.p);
    return built;
}

}  // namespace sigmak
