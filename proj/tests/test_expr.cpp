#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <string>

#include "cfbvp/expr.hpp"

using cfbvp::Bindings;
using cfbvp::EvalError;
using cfbvp::Expr;
using cfbvp::ParseError;
using cfbvp::Var;

namespace {

double eval(const std::string& text, Bindings b = {}) { return Expr::parse(text).eval(b); }

std::size_t parse_error_position(const std::string& text) {
    try {
        Expr::parse(text);
    } catch (const ParseError& e) {
        return e.position();
    }
    ADD_FAILURE() << "no parse error for '" << text << "'";
    return std::string::npos;
}

// Random expression text over the full grammar.
std::string random_text(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
    std::uniform_real_distribution<double> num(0.0, 10.0);
    const char* vars[] = {"t", "x", "s", "R"};
    const char* unary[] = {"exp", "abs", "cosh", "sinh", "sqrt"};
    switch (pick(rng)) {
        case 0: return std::to_string(num(rng));
        case 1: return vars[rng() % 4];
        case 2: return "2.5e-3";
        case 3: return random_text(rng, depth - 1) + " + " + random_text(rng, depth - 1);
        case 4: return random_text(rng, depth - 1) + " - " + random_text(rng, depth - 1);
        case 5: return random_text(rng, depth - 1) + " * " + random_text(rng, depth - 1);
        case 6: return "(" + random_text(rng, depth - 1) + ") / " + random_text(rng, depth - 1);
        case 7: return random_text(rng, depth - 1) + "^-(" + random_text(rng, depth - 1) + ")";
        case 8: return "-(" + random_text(rng, depth - 1) + ")";
        default:
            if (rng() % 2) return std::string(unary[rng() % 5]) + "(" + random_text(rng, depth - 1) + ")";
            return "max(" + random_text(rng, depth - 1) + ", " + random_text(rng, depth - 1) + ", " +
                   random_text(rng, depth - 1) + ")";
    }
}

}  // namespace

TEST(ExprParse, SmallestComposite) {
    const Expr e = Expr::parse("t + 1");
    ASSERT_EQ(e.root().kind, Expr::Kind::add);
    const auto& lhs = e.node(e.root().children[0]);
    const auto& rhs = e.node(e.root().children[1]);
    EXPECT_EQ(lhs.kind, Expr::Kind::variable);
    EXPECT_EQ(lhs.var, Var::t);
    EXPECT_EQ(rhs.kind, Expr::Kind::constant);
    EXPECT_EQ(rhs.value, 1.0);
}

TEST(ExprParse, PowerBindsBeforeMultiplication) {
    const Expr e = Expr::parse("abs(t) * (1 - t^2)^(-0.25) * x^(-0.25)");
    EXPECT_EQ(e.unparse(), "(abs(t) * ((1 - (t^2))^(-0.25))) * (x^(-0.25))");
}

TEST(ExprParse, Precedence) {
    EXPECT_EQ(eval("-2^2"), -4.0);
    EXPECT_EQ(eval("2^3^2"), 512.0);
    EXPECT_EQ(eval("2^-1"), 0.5);
    EXPECT_EQ(eval("1 - 2 - 3"), -4.0);
    EXPECT_EQ(eval("8 / 4 / 2"), 1.0);
    EXPECT_EQ(eval("2 + 3 * 4"), 14.0);
    EXPECT_EQ(eval("-(2 + 3) * 2"), -10.0);
    EXPECT_EQ(eval("min(3, 1, 2) + max(1, 5)"), 6.0);
    EXPECT_DOUBLE_EQ(eval("1.5e2 + .5"), 150.5);
}

TEST(ExprParse, SyntaxErrorsCarryPosition) {
    EXPECT_EQ(parse_error_position("2 * * x"), 4u);
    EXPECT_EQ(parse_error_position("(t + 1"), 6u);
    EXPECT_EQ(parse_error_position("t + "), 4u);
    EXPECT_EQ(parse_error_position("t $ 1"), 2u);
    EXPECT_EQ(parse_error_position("   "), 0u);
    EXPECT_EQ(parse_error_position(""), 0u);
}

TEST(ExprParse, UnknownIdentifiersAndArity) {
    EXPECT_EQ(parse_error_position("y + 1"), 0u);
    EXPECT_EQ(parse_error_position("2 * foo(t)"), 4u);
    EXPECT_THROW(Expr::parse("exp(1, 2)"), ParseError);
    EXPECT_THROW(Expr::parse("min(1)"), ParseError);
    EXPECT_THROW(Expr::parse("sqrt()"), ParseError);
}

TEST(ExprEval, Examples) {
    EXPECT_EQ(eval("t + 1", Bindings().set(Var::t, 0.0)), 1.0);
    EXPECT_EQ(eval("x^(-0.25)", Bindings().set(Var::x, 16.0)), 0.5);
    try {
        eval("3 * x^(-0.25)", Bindings().set(Var::x, 0.0));
        FAIL() << "expected a domain error";
    } catch (const EvalError& e) {
        EXPECT_EQ(e.subexpression(), "x^(-0.25)");
    }
}

TEST(ExprEval, DomainErrors) {
    EXPECT_THROW(eval("t + 1"), EvalError);  // unbound
    EXPECT_THROW(eval("1 / (x - 2)", Bindings().set(Var::x, 2.0)), EvalError);
    EXPECT_THROW(eval("(-8)^(1/3)"), EvalError);
    EXPECT_THROW(eval("sqrt(-1)"), EvalError);
    EXPECT_THROW(eval("exp(1000)"), EvalError);
    EXPECT_EQ(eval("(-2)^3"), -8.0);
    EXPECT_EQ(eval("0^2"), 0.0);
}

TEST(ExprEval, UsesReportsVariables) {
    const Expr e = Expr::parse("s * (1 - s^2)^(-0.25) * R^(-0.25)");
    EXPECT_TRUE(e.uses(Var::s));
    EXPECT_TRUE(e.uses(Var::R));
    EXPECT_FALSE(e.uses(Var::t));
    EXPECT_FALSE(e.uses(Var::x));
}

TEST(ExprProperty, UnparseIsIdempotentNormalForm) {
    std::mt19937 rng(20261015);
    for (int i = 0; i < 500; ++i) {
        const std::string text = random_text(rng, 4);
        const Expr e = Expr::parse(text);
        const std::string once = e.unparse();
        const Expr again = Expr::parse(once);
        EXPECT_TRUE(again == e) << text << " -> " << once;
        EXPECT_EQ(again.unparse(), once) << text;
    }
}

TEST(ExprProperty, EvalIsDeterministic) {
    std::mt19937 rng(7);
    Bindings b;
    b.set(Var::t, 0.3).set(Var::x, 1.7).set(Var::s, 0.3).set(Var::R, 4.0);
    for (int i = 0; i < 200; ++i) {
        const Expr e = Expr::parse(random_text(rng, 3));
        double first = 0.0;
        bool ok = true;
        try {
            first = e.eval(b);
        } catch (const EvalError&) {
            ok = false;
        }
        if (!ok) {
            EXPECT_THROW(e.eval(b), EvalError);
            continue;
        }
        const double second = e.eval(b);
        EXPECT_EQ(std::memcmp(&first, &second, sizeof(double)), 0);
    }
}
