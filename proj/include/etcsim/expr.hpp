#pragma once

// Scalar expressions of one variable `y`, used for the plant nonlinearities.
//
// Grammar (left-associative binaries, unary minus binds tightest):
//
//   expr    := term   (('+' | '-') term)*
//   term    := unary  (('*' | '/') unary)*
//   unary   := '-' unary | primary
//   primary := number | 'y' | '(' expr ')'
//            | ('cos' | 'sin' | 'exp') '(' expr ')'
//            | 'pow' '(' expr ',' ['-'] integer ')'

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace etcsim {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}

    /// 0-based offset into the source text.
    std::size_t position() const noexcept { return pos_; }

private:
    std::size_t pos_;
};

class EvalError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class ExprKind { Const, Var, Add, Sub, Mul, Div, Neg, Cos, Sin, Exp, Pow };

class Expr {
public:
    struct Node {
        ExprKind kind;
        double value = 0.0;     // Const
        std::int64_t power = 0; // Pow
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };
    using NodePtr = std::shared_ptr<const Node>;

    Expr() : root_(make(ExprKind::Const)) {}

    static Expr constant(double v) {
        auto n = std::make_shared<Node>(Node{ExprKind::Const, 0.0, 0, nullptr, nullptr});
        n->value = v;
        return Expr(n);
    }
    static Expr variable() { return Expr(make(ExprKind::Var)); }
    static Expr unary(ExprKind k, const Expr& a) { return Expr(make(k, a.root_)); }
    static Expr binary(ExprKind k, const Expr& a, const Expr& b) { return Expr(make(k, a.root_, b.root_)); }
    static Expr pow(const Expr& base, std::int64_t p) {
        auto n = std::make_shared<Node>(Node{ExprKind::Pow, 0.0, 0, nullptr, nullptr});
        n->power = p;
        n->lhs = base.root_;
        return Expr(n);
    }

    const Node& root() const { return *root_; }

    /// Value at y. Throws EvalError if the result is not finite.
    double operator()(double y) const {
        const double v = eval(*root_, y);
        if (!std::isfinite(v)) {
            throw EvalError("expression '" + to_string() + "' is not finite at y=" + fmt(y));
        }
        return v;
    }

    /// Fully parenthesised text that parses back to an identical tree.
    std::string to_string() const { return print(*root_); }

    friend bool operator==(const Expr& a, const Expr& b) { return same(*a.root_, *b.root_); }

private:
    explicit Expr(NodePtr n) : root_(std::move(n)) {}

    static NodePtr make(ExprKind k, NodePtr a = nullptr, NodePtr b = nullptr) {
        auto n = std::make_shared<Node>(Node{k, 0.0, 0, nullptr, nullptr});
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }

    static double ipow(double base, std::int64_t p) {
        const bool neg = p < 0;
        std::uint64_t e = neg ? static_cast<std::uint64_t>(-(p + 1)) + 1u : static_cast<std::uint64_t>(p);
        double acc = 1.0;
        double b = base;
        while (e != 0) {
            if (e & 1u) acc *= b;
            b *= b;
            e >>= 1u;
        }
        return neg ? 1.0 / acc : acc;
    }

    static double eval(const Node& n, double y) {
        switch (n.kind) {
        case ExprKind::Const: return n.value;
        case ExprKind::Var: return y;
        case ExprKind::Add: return eval(*n.lhs, y) + eval(*n.rhs, y);
        case ExprKind::Sub: return eval(*n.lhs, y) - eval(*n.rhs, y);
        case ExprKind::Mul: return eval(*n.lhs, y) * eval(*n.rhs, y);
        case ExprKind::Div: return eval(*n.lhs, y) / eval(*n.rhs, y);
        case ExprKind::Neg: return -eval(*n.lhs, y);
        case ExprKind::Cos: return std::cos(eval(*n.lhs, y));
        case ExprKind::Sin: return std::sin(eval(*n.lhs, y));
        case ExprKind::Exp: return std::exp(eval(*n.lhs, y));
        case ExprKind::Pow: return ipow(eval(*n.lhs, y), n.power);
        }
        return std::nan("");
    }

    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    static std::string print(const Node& n) {
        switch (n.kind) {
        case ExprKind::Const: {
            // Literals are non-negative in the grammar; a negative constant
            // prints as a negation, which evaluates to the same double.
            if (std::signbit(n.value)) return "(-" + fmt(-n.value) + ")";
            return fmt(n.value);
        }
        case ExprKind::Var: return "y";
        case ExprKind::Add: return "(" + print(*n.lhs) + " + " + print(*n.rhs) + ")";
        case ExprKind::Sub: return "(" + print(*n.lhs) + " - " + print(*n.rhs) + ")";
        case ExprKind::Mul: return "(" + print(*n.lhs) + " * " + print(*n.rhs) + ")";
        case ExprKind::Div: return "(" + print(*n.lhs) + " / " + print(*n.rhs) + ")";
        case ExprKind::Neg: return "(-" + print(*n.lhs) + ")";
        case ExprKind::Cos: return "cos(" + print(*n.lhs) + ")";
        case ExprKind::Sin: return "sin(" + print(*n.lhs) + ")";
        case ExprKind::Exp: return "exp(" + print(*n.lhs) + ")";
        case ExprKind::Pow: return "pow(" + print(*n.lhs) + ", " + std::to_string(n.power) + ")";
        }
        return "?";
    }

    static bool same(const Node& a, const Node& b) {
        if (a.kind != b.kind) return false;
        switch (a.kind) {
        case ExprKind::Const: return a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
        case ExprKind::Var: return true;
        case ExprKind::Pow: return a.power == b.power && same(*a.lhs, *b.lhs);
        case ExprKind::Neg:
        case ExprKind::Cos:
        case ExprKind::Sin:
        case ExprKind::Exp: return same(*a.lhs, *b.lhs);
        default: return same(*a.lhs, *b.lhs) && same(*a.rhs, *b.rhs);
        }
    }

    NodePtr root_;
};

namespace detail {

class ExprParser {
public:
    explicit ExprParser(std::string_view src) : src_(src) {}

    Expr parse() {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        return e;
    }

private:
    Expr parse_expr() {
        Expr lhs = parse_term();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                lhs = Expr::binary(ExprKind::Add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = Expr::binary(ExprKind::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        for (;;) {
            skip_ws();
            if (accept('*')) {
                lhs = Expr::binary(ExprKind::Mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = Expr::binary(ExprKind::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_unary() {
        skip_ws();
        if (accept('-')) return Expr::unary(ExprKind::Neg, parse_unary());
        return parse_primary();
    }

    Expr parse_primary() {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::constant(parse_number());
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view id = src_.substr(start, pos_ - start);
            if (id == "y") return Expr::variable();
            if (id == "cos") return call1(ExprKind::Cos);
            if (id == "sin") return call1(ExprKind::Sin);
            if (id == "exp") return call1(ExprKind::Exp);
            if (id == "pow") return call_pow();
            throw ParseError("unknown identifier '" + std::string(id) + "'", start);
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr call1(ExprKind k) {
        expect('(');
        Expr arg = parse_expr();
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == ',') throw ParseError("function takes one argument", pos_);
        expect(')');
        return Expr::unary(k, arg);
    }

    Expr call_pow() {
        expect('(');
        Expr base = parse_expr();
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == ')') throw ParseError("pow takes two arguments", pos_);
        expect(',');
        skip_ws();
        const bool neg = accept('-');
        skip_ws();
        const std::size_t start = pos_;
        std::int64_t p = 0;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            p = p * 10 + (src_[pos_] - '0');
            if (p > 1'000'000) throw ParseError("pow exponent too large", start);
            ++pos_;
        }
        if (pos_ == start) throw ParseError("pow exponent must be an integer literal", pos_);
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == ',') throw ParseError("pow takes two arguments", pos_);
        if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E')) {
            throw ParseError("pow exponent must be an integer literal", pos_);
        }
        expect(')');
        return Expr::pow(base, neg ? -p : p);
    }

    double parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        if (text == ".") throw ParseError("malformed number", start);
        // strtod is locale-sensitive only for the decimal point; config text is always '.'.
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size()) throw ParseError("malformed number", start);
        return v;
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError(std::string("expected '") + c + "'", pos_);
        if (src_[pos_] != c) {
            throw ParseError(std::string("expected '") + c + "' but found '" + src_[pos_] + "'", pos_);
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Expr parse_expr(std::string_view src) { return detail::ExprParser(src).parse(); }

} // namespace etcsim
