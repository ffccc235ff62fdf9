#pragma once

// Scalar expression language for user-supplied nonlinearities and majorants.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('-')? power
//   power  := atom ('^' factor)?
//   atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//
// Variables are restricted to t, x, s and R. Functions: exp, abs, cosh, sinh,
// sqrt (one argument) and min, max (two or more).

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "cfbvp/error.hpp"

namespace cfbvp {

enum class Var : std::uint8_t { t = 0, x = 1, s = 2, R = 3 };

inline constexpr std::string_view var_name(Var v) {
    constexpr std::array<std::string_view, 4> names{"t", "x", "s", "R"};
    return names[static_cast<std::size_t>(v)];
}

inline std::optional<Var> var_from_name(std::string_view name) {
    if (name == "t") return Var::t;
    if (name == "x") return Var::x;
    if (name == "s") return Var::s;
    if (name == "R") return Var::R;
    return std::nullopt;
}

/// Variable assignment for Expr::eval. Unset variables are unbound.
class Bindings {
public:
    Bindings() = default;

    Bindings& set(Var v, double value) {
        values_[index(v)] = value;
        bound_ |= bit(v);
        return *this;
    }
    bool bound(Var v) const { return (bound_ & bit(v)) != 0; }
    double get(Var v) const { return values_[index(v)]; }

private:
    static std::size_t index(Var v) { return static_cast<std::size_t>(v); }
    static std::uint8_t bit(Var v) { return static_cast<std::uint8_t>(1u << index(v)); }

    std::array<double, 4> values_{};
    std::uint8_t bound_ = 0;
};

class Expr {
public:
    enum class Kind : std::uint8_t { constant, variable, negate, add, sub, mul, div, pow, call };
    enum class Func : std::uint8_t { exp, abs, cosh, sinh, sqrt, min, max };

    struct Node {
        Kind kind = Kind::constant;
        double value = 0.0;
        Var var = Var::t;
        Func func = Func::exp;
        std::vector<std::int32_t> children;
    };

    /// Parse text into a tree. Throws ParseError.
    static Expr parse(std::string_view text);

    double eval(const Bindings& b) const { return eval_node(root_, b); }

    /// Canonical text form; parse(unparse()) reproduces the tree.
    std::string unparse() const { return unparse_node(root_); }

    bool uses(Var v) const {
        for (const auto& n : nodes_)
            if (n.kind == Kind::variable && n.var == v) return true;
        return false;
    }

    /// Structural tree equality.
    friend bool operator==(const Expr& a, const Expr& b) {
        return same_subtree(a, a.root_, b, b.root_);
    }

    const Node& root() const { return nodes_[static_cast<std::size_t>(root_)]; }
    const Node& node(std::int32_t i) const { return nodes_[static_cast<std::size_t>(i)]; }

private:
    friend class ExprParser;

    double eval_node(std::int32_t i, const Bindings& b) const;
    std::string unparse_node(std::int32_t i) const;
    [[noreturn]] void domain_error(std::int32_t i, const std::string& what) const {
        throw EvalError(what, unparse_node(i));
    }
    static bool same_subtree(const Expr& a, std::int32_t i, const Expr& b, std::int32_t j);

    std::vector<Node> nodes_;
    std::int32_t root_ = 0;
};

namespace detail {

inline std::string_view func_name(Expr::Func f) {
    switch (f) {
        case Expr::Func::exp: return "exp";
        case Expr::Func::abs: return "abs";
        case Expr::Func::cosh: return "cosh";
        case Expr::Func::sinh: return "sinh";
        case Expr::Func::sqrt: return "sqrt";
        case Expr::Func::min: return "min";
        case Expr::Func::max: return "max";
    }
    return "?";
}

inline std::optional<Expr::Func> func_from_name(std::string_view name) {
    using F = Expr::Func;
    for (F f : {F::exp, F::abs, F::cosh, F::sinh, F::sqrt, F::min, F::max})
        if (func_name(f) == name) return f;
    return std::nullopt;
}

inline bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

}  // namespace detail

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    Expr run() {
        if (text_.find_first_not_of(" \t\r\n") == std::string_view::npos)
            throw ParseError("empty expression", 0);
        Expr e;
        out_ = &e;
        advance();
        e.root_ = parse_expr();
        if (tok_.kind != Tok::end) fail_unexpected();
        return e;
    }

private:
    enum class Tok { number, ident, op, end };
    struct Token {
        Tok kind = Tok::end;
        std::string_view text;
        double number = 0.0;
        std::size_t pos = 0;
    };

    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        tok_ = Token{};
        tok_.pos = pos_;
        if (pos_ >= text_.size()) return;
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            lex_number();
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
                ++end;
            tok_.kind = Tok::ident;
            tok_.text = text_.substr(pos_, end - pos_);
            pos_ = end;
        } else if (std::string_view("+-*/^(),").find(c) != std::string_view::npos) {
            tok_.kind = Tok::op;
            tok_.text = text_.substr(pos_, 1);
            ++pos_;
        } else {
            throw ParseError(fmt::format("unexpected character '{}'", c), pos_);
        }
    }

    void lex_number() {
        std::size_t end = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) {
                ++end;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (end < text_.size() && text_[end] == '.') {
            ++end;
            mantissa += digits();
        }
        if (mantissa == 0) throw ParseError("malformed number", pos_);
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t save = end;
            ++end;
            if (end < text_.size() && (text_[end] == '+' || text_[end] == '-')) ++end;
            if (digits() == 0) end = save;
        }
        const std::string_view lit = text_.substr(pos_, end - pos_);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), v);
        if (ec != std::errc() || ptr != lit.data() + lit.size() || !std::isfinite(v))
            throw ParseError("malformed number", pos_);
        tok_.kind = Tok::number;
        tok_.text = lit;
        tok_.number = v;
        pos_ = end;
    }

    bool at_op(char c) const { return tok_.kind == Tok::op && tok_.text[0] == c; }

    [[noreturn]] void fail_unexpected() const {
        if (tok_.kind == Tok::end) throw ParseError("unexpected end of input", tok_.pos);
        throw ParseError(fmt::format("unexpected '{}'", tok_.text), tok_.pos);
    }

    void expect(char c) {
        if (!at_op(c)) {
            if (tok_.kind == Tok::end)
                throw ParseError(fmt::format("expected '{}' before end of input", c), tok_.pos);
            throw ParseError(fmt::format("expected '{}' but found '{}'", c, tok_.text), tok_.pos);
        }
        advance();
    }

    std::int32_t add(Expr::Node n) {
        out_->nodes_.push_back(std::move(n));
        return static_cast<std::int32_t>(out_->nodes_.size() - 1);
    }

    std::int32_t binary(Expr::Kind k, std::int32_t l, std::int32_t r) {
        Expr::Node n;
        n.kind = k;
        n.children = {l, r};
        return add(std::move(n));
    }

    std::int32_t parse_expr() {
        std::int32_t lhs = parse_term();
        while (at_op('+') || at_op('-')) {
            const auto k = at_op('+') ? Expr::Kind::add : Expr::Kind::sub;
            advance();
            lhs = binary(k, lhs, parse_term());
        }
        return lhs;
    }

    std::int32_t parse_term() {
        std::int32_t lhs = parse_factor();
        while (at_op('*') || at_op('/')) {
            const auto k = at_op('*') ? Expr::Kind::mul : Expr::Kind::div;
            advance();
            lhs = binary(k, lhs, parse_factor());
        }
        return lhs;
    }

    std::int32_t parse_factor() {
        if (at_op('-')) {
            advance();
            Expr::Node n;
            n.kind = Expr::Kind::negate;
            n.children = {parse_power()};
            return add(std::move(n));
        }
        return parse_power();
    }

    std::int32_t parse_power() {
        std::int32_t base = parse_atom();
        if (at_op('^')) {
            advance();
            return binary(Expr::Kind::pow, base, parse_factor());
        }
        return base;
    }

    std::int32_t parse_atom() {
        if (tok_.kind == Tok::number) {
            Expr::Node n;
            n.kind = Expr::Kind::constant;
            n.value = tok_.number;
            advance();
            return add(std::move(n));
        }
        if (tok_.kind == Tok::ident) {
            const Token id = tok_;
            advance();
            if (at_op('(')) return parse_call(id);
            auto v = var_from_name(id.text);
            if (!v) throw ParseError(fmt::format("unknown identifier '{}'", id.text), id.pos);
            Expr::Node n;
            n.kind = Expr::Kind::variable;
            n.var = *v;
            return add(std::move(n));
        }
        if (at_op('(')) {
            advance();
            std::int32_t inner = parse_expr();
            expect(')');
            return inner;
        }
        fail_unexpected();
    }

    std::int32_t parse_call(const Token& id) {
        auto f = detail::func_from_name(id.text);
        if (!f) throw ParseError(fmt::format("unknown function '{}'", id.text), id.pos);
        advance();  // '('
        Expr::Node n;
        n.kind = Expr::Kind::call;
        n.func = *f;
        n.children.push_back(parse_expr());
        while (at_op(',')) {
            advance();
            n.children.push_back(parse_expr());
        }
        expect(')');
        const bool variadic = *f == Expr::Func::min || *f == Expr::Func::max;
        if (variadic ? n.children.size() < 2 : n.children.size() != 1)
            throw ParseError(fmt::format("{}() takes {} but got {} argument(s)", id.text,
                                         variadic ? "at least 2 arguments" : "1 argument",
                                         n.children.size()),
                             id.pos);
        return add(std::move(n));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    Token tok_;
    Expr* out_ = nullptr;
};

inline Expr Expr::parse(std::string_view text) { return ExprParser(text).run(); }

inline double Expr::eval_node(std::int32_t i, const Bindings& b) const {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    auto arg = [&](std::size_t k) { return eval_node(n.children[k], b); };
    double r = 0.0;
    switch (n.kind) {
        case Kind::constant: return n.value;
        case Kind::variable:
            if (!b.bound(n.var)) domain_error(i, "unbound variable");
            return b.get(n.var);
        case Kind::negate: return -arg(0);
        case Kind::add: r = arg(0) + arg(1); break;
        case Kind::sub: r = arg(0) - arg(1); break;
        case Kind::mul: r = arg(0) * arg(1); break;
        case Kind::div: {
            const double num = arg(0);
            const double den = arg(1);
            if (den == 0.0) domain_error(i, "division by zero");
            r = num / den;
            break;
        }
        case Kind::pow: {
            const double base = arg(0);
            const double ex = arg(1);
            if (base < 0.0 && !detail::is_integer(ex))
                domain_error(i, "negative base to a fractional power");
            if (base == 0.0 && ex < 0.0) domain_error(i, "zero to a negative power");
            r = std::pow(base, ex);
            break;
        }
        case Kind::call: {
            switch (n.func) {
                case Func::exp: r = std::exp(arg(0)); break;
                case Func::abs: r = std::abs(arg(0)); break;
                case Func::cosh: r = std::cosh(arg(0)); break;
                case Func::sinh: r = std::sinh(arg(0)); break;
                case Func::sqrt: {
                    const double a = arg(0);
                    if (a < 0.0) domain_error(i, "square root of a negative number");
                    r = std::sqrt(a);
                    break;
                }
                case Func::min:
                case Func::max: {
                    r = arg(0);
                    for (std::size_t k = 1; k < n.children.size(); ++k) {
                        const double a = arg(k);
                        r = n.func == Func::min ? std::min(r, a) : std::max(r, a);
                    }
                    break;
                }
            }
            break;
        }
    }
    if (!std::isfinite(r)) domain_error(i, "non-finite result");
    return r;
}

inline std::string Expr::unparse_node(std::int32_t i) const {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    auto wrapped = [&](std::int32_t c) {
        const Kind k = nodes_[static_cast<std::size_t>(c)].kind;
        std::string s = unparse_node(c);
        if (k == Kind::constant || k == Kind::variable || k == Kind::call) return s;
        return "(" + s + ")";
    };
    auto infix = [&](std::string_view op) {
        return wrapped(n.children[0]) + std::string(op) + wrapped(n.children[1]);
    };
    switch (n.kind) {
        case Kind::constant: return fmt::format("{:.17g}", n.value);
        case Kind::variable: return std::string(var_name(n.var));
        case Kind::negate: return "-" + wrapped(n.children[0]);
        case Kind::add: return infix(" + ");
        case Kind::sub: return infix(" - ");
        case Kind::mul: return infix(" * ");
        case Kind::div: return infix(" / ");
        case Kind::pow: return infix("^");
        case Kind::call: {
            std::string s(detail::func_name(n.func));
            s += '(';
            for (std::size_t k = 0; k < n.children.size(); ++k) {
                if (k) s += ", ";
                s += unparse_node(n.children[k]);
            }
            return s + ')';
        }
    }
    return {};
}

inline bool Expr::same_subtree(const Expr& a, std::int32_t i, const Expr& b, std::int32_t j) {
    const Node& x = a.nodes_[static_cast<std::size_t>(i)];
    const Node& y = b.nodes_[static_cast<std::size_t>(j)];
    if (x.kind != y.kind || x.children.size() != y.children.size()) return false;
    switch (x.kind) {
        case Kind::constant:
            if (x.value != y.value) return false;
            break;
        case Kind::variable:
            if (x.var != y.var) return false;
            break;
        case Kind::call:
            if (x.func != y.func) return false;
            break;
        default: break;
    }
    for (std::size_t k = 0; k < x.children.size(); ++k)
        if (!same_subtree(a, x.children[k], b, y.children[k])) return false;
    return true;
}

}  // namespace cfbvp
