#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sigmak/grid.hpp"

namespace sigmak {

class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Finite sum of single-axis trig monomials and constants:
///     amp*sin(axis,freq) + amp*cos(axis,freq) + const(c) + ...
/// Axes are 1-based in the textual form. Closed-form first and second
/// derivatives make these usable both as grid samplers and as the analytic
/// reference in convergence studies.
class TrigPoly {
public:
    struct Term {
        enum class Kind { Constant, Sin, Cos } kind = Kind::Constant;
        double amp = 0.0;
        int axis = 0;  // 0-based
        double freq = 0.0;
    };

    TrigPoly() = default;
    explicit TrigPoly(std::vector<Term> terms) : terms_(std::move(terms)) {}

    static TrigPoly constant(double c) {
        return TrigPoly({Term{Term::Kind::Constant, c, 0, 0.0}});
    }

    [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
    [[nodiscard]] bool empty() const { return terms_.empty(); }

    [[nodiscard]] double value(std::span<const double> x) const {
        double s = 0.0;
        for (const Term& t : terms_) {
            switch (t.kind) {
                case Term::Kind::Constant: s += t.amp; break;
                case Term::Kind::Sin: s += t.amp * std::sin(t.freq * x[static_cast<std::size_t>(t.axis)]); break;
                case Term::Kind::Cos: s += t.amp * std::cos(t.freq * x[static_cast<std::size_t>(t.axis)]); break;
            }
        }
        return s;
    }

    [[nodiscard]] double d1(std::span<const double> x, int axis) const {
        double s = 0.0;
        for (const Term& t : terms_) {
            if (t.kind == Term::Kind::Constant || t.axis != axis) continue;
            if (t.kind == Term::Kind::Sin)
                s += t.amp * t.freq * std::cos(t.freq * x[static_cast<std::size_t>(t.axis)]);
            else
                s -= t.amp * t.freq * std::sin(t.freq * x[static_cast<std::size_t>(t.axis)]);
        }
        return s;
    }

    /// Terms depend on one axis each, so all cross second derivatives vanish.
    [[nodiscard]] double d2(std::span<const double> x, int axisA, int axisB) const {
        if (axisA != axisB) return 0.0;
        double s = 0.0;
        for (const Term& t : terms_) {
            if (t.kind == Term::Kind::Constant || t.axis != axisA) continue;
            if (t.kind == Term::Kind::Sin)
                s -= t.amp * t.freq * t.freq * std::sin(t.freq * x[static_cast<std::size_t>(t.axis)]);
            else
                s -= t.amp * t.freq * t.freq * std::cos(t.freq * x[static_cast<std::size_t>(t.axis)]);
        }
        return s;
    }

    [[nodiscard]] ScalarField sample(const Grid& g) const {
        ScalarField out(g);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const auto x = g.position(i);
            out[i] = value(std::span<const double>(x.data(), static_cast<std::size_t>(g.dim)));
        }
        return out;
    }

    /// Grammar: expr := term (('+'|'-') term)*
    ///          term := number | number '*' trig | trig | 'const' '(' number ')'
    ///          trig := ('sin'|'cos') '(' axis ',' freq ')'
    static TrigPoly parse(std::string_view text, int dim) {
        Parser p{text, 0, dim};
        std::vector<Term> terms;
        p.skip_ws();
        if (p.done()) return TrigPoly{};  // empty spec means identically zero
        double sign = 1.0;
        if (p.peek() == '+' || p.peek() == '-') sign = (p.take() == '-') ? -1.0 : 1.0;
        terms.push_back(p.parse_term(sign));
        p.skip_ws();
        while (!p.done()) {
            const char op = p.take();
            if (op != '+' && op != '-') p.fail("expected '+' or '-' between terms");
            terms.push_back(p.parse_term(op == '-' ? -1.0 : 1.0));
            p.skip_ws();
        }
        return TrigPoly{std::move(terms)};
    }

private:
    struct Parser {
        std::string_view text;
        std::size_t pos;
        int dim;

        [[noreturn]] void fail(const std::string& why) const {
            throw parse_error("field spec '" + std::string(text) + "': " + why);
        }
        void skip_ws() {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        }
        [[nodiscard]] bool done() const { return pos >= text.size(); }
        [[nodiscard]] char peek() const { return text[pos]; }
        char take() { return text[pos++]; }

        double parse_number() {
            skip_ws();
            const char* begin = text.data() + pos;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("expected a number");
            pos += static_cast<std::size_t>(end - begin);
            return v;
        }

        void expect(char c) {
            skip_ws();
            if (done() || take() != c) fail(std::string("expected '") + c + "'");
        }

        bool try_word(std::string_view w) {
            skip_ws();
            if (text.substr(pos, w.size()) == w) {
                pos += w.size();
                return true;
            }
            return false;
        }

        Term parse_trig(double amp, Term::Kind kind) {
            expect('(');
            const double axisV = parse_number();
            const int axis = static_cast<int>(axisV);
            if (axis < 1 || axis > dim) fail("axis out of range (axes are 1-based)");
            expect(',');
            const double freq = parse_number();
            expect(')');
            return Term{kind, amp, axis - 1, freq};
        }

        Term parse_term(double sign) {
            skip_ws();
            if (try_word("const")) {
                expect('(');
                const double v = parse_number();
                expect(')');
                return Term{Term::Kind::Constant, sign * v, 0, 0.0};
            }
            if (try_word("sin")) return parse_trig(sign, Term::Kind::Sin);
            if (try_word("cos")) return parse_trig(sign, Term::Kind::Cos);
            const double amp = sign * parse_number();
            skip_ws();
            if (!done() && peek() == '*') {
                ++pos;
                if (try_word("sin")) return parse_trig(amp, Term::Kind::Sin);
                if (try_word("cos")) return parse_trig(amp, Term::Kind::Cos);
                fail("expected sin(...) or cos(...) after '*'");
            }
            return Term{Term::Kind::Constant, amp, 0, 0.0};
        }
    };

    std::vector<Term> terms_;
};

/// Tensor data for the background: either uniform(c), meaning c * g, or a
/// scalar trig polynomial psi, meaning psi(x) * g.
struct TensorSpec {
    TrigPoly psi;

    static TensorSpec parse(std::string_view text, int dim) {
        std::string_view s = text;
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        s = s.substr(b, e - b);
        if (s.rfind("uniform(", 0) == 0 && !s.empty() && s.back() == ')') {
            const std::string inner(s.substr(8, s.size() - 9));
            char* end = nullptr;
            const double c = std::strtod(inner.c_str(), &end);
            if (end == inner.c_str() || *end != '\0')
                throw parse_error("tensor spec: malformed uniform(...): " + std::string(text));
            return TensorSpec{TrigPoly::constant(c)};
        }
        return TensorSpec{TrigPoly::parse(s, dim)};
    }
};

}  // namespace sigmak
