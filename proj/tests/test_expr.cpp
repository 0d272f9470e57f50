#include "etcsim/expr.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace etcsim;

TEST(ExprParse, CosOfY) {
    const Expr e = parse_expr("cos(y)");
    ASSERT_EQ(e.root().kind, ExprKind::Cos);
    EXPECT_EQ(e.root().lhs->kind, ExprKind::Var);
}

TEST(ExprParse, YPlusOne) {
    const Expr e = parse_expr("y+1");
    ASSERT_EQ(e.root().kind, ExprKind::Add);
    EXPECT_EQ(e.root().lhs->kind, ExprKind::Var);
    ASSERT_EQ(e.root().rhs->kind, ExprKind::Const);
    EXPECT_EQ(e.root().rhs->value, 1.0);
}

TEST(ExprParse, UnbalancedParenReportsPosition) {
    try {
        parse_expr("cos(");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 4u);
    }
}

TEST(ExprParse, Precedence) {
    EXPECT_DOUBLE_EQ(parse_expr("1 + 2*y")(3.0), 7.0);
    EXPECT_DOUBLE_EQ(parse_expr("(1 + 2)*y")(3.0), 9.0);
    EXPECT_DOUBLE_EQ(parse_expr("-y*y")(3.0), -9.0);
    EXPECT_DOUBLE_EQ(parse_expr("8/2/2")(0.0), 2.0);
    EXPECT_DOUBLE_EQ(parse_expr("y - 1 - 1")(5.0), 3.0);
}

TEST(ExprParse, Pow) {
    EXPECT_DOUBLE_EQ(parse_expr("pow(y, 3)")(2.0), 8.0);
    EXPECT_DOUBLE_EQ(parse_expr("pow(y, -2)")(2.0), 0.25);
    EXPECT_DOUBLE_EQ(parse_expr("pow(y, 0)")(0.0), 1.0);
}

TEST(ExprParse, Rejects) {
    for (const char* bad : {"", "y +", "z", "cos y", "cos(y, y)", "pow(y)", "pow(y, 1.5)", "pow(y, y)", "1..2",
                            "(y", "y)", "sqrt(y)", "."}) {
        EXPECT_THROW(parse_expr(bad), ParseError) << bad;
    }
}

TEST(ExprParse, UnknownIdentifierPosition) {
    try {
        parse_expr("y + tan(y)");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 4u);
    }
}

TEST(ExprEval, Examples) {
    EXPECT_DOUBLE_EQ(parse_expr("cos(y)")(0.0), 1.0);
    EXPECT_DOUBLE_EQ(parse_expr("y+1")(5.0), 6.0);
    EXPECT_NEAR(parse_expr("cos(y)")(5.0), 0.2836621855, 1e-10);
    EXPECT_NEAR(parse_expr("exp(sin(y))")(1.0), std::exp(std::sin(1.0)), 1e-15);
    EXPECT_DOUBLE_EQ(parse_expr("2.5e-1 * y")(4.0), 1.0);
}

TEST(ExprEval, NonFiniteThrows) {
    EXPECT_THROW(parse_expr("1/y")(0.0), EvalError);
    EXPECT_THROW(parse_expr("exp(y)")(1000.0), EvalError);
}

namespace {

Expr random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    std::uniform_real_distribution<double> val(0.0, 10.0);
    switch (pick(rng)) {
    case 0: return Expr::constant(val(rng));
    case 1: return Expr::variable();
    case 2: return Expr::binary(ExprKind::Add, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 3: return Expr::binary(ExprKind::Sub, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 4: return Expr::binary(ExprKind::Mul, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 5: return Expr::binary(ExprKind::Div, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 6: return Expr::unary(ExprKind::Neg, random_expr(rng, depth - 1));
    case 7: return Expr::unary(ExprKind::Cos, random_expr(rng, depth - 1));
    case 8: return Expr::unary(ExprKind::Sin, random_expr(rng, depth - 1));
    default: return Expr::pow(random_expr(rng, depth - 1), std::uniform_int_distribution<int>(-3, 4)(rng));
    }
}

} // namespace

TEST(ExprProperty, PrintParseRoundTrip) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        const Expr e = random_expr(rng, 5);
        const std::string text = e.to_string();
        const Expr back = parse_expr(text);
        ASSERT_TRUE(back == e) << text;
        EXPECT_EQ(back.to_string(), text);
    }
}

TEST(ExprProperty, NegativeConstantPrintsAsNegation) {
    const Expr e = Expr::constant(-2.5);
    const Expr back = parse_expr(e.to_string());
    EXPECT_EQ(back.root().kind, ExprKind::Neg);
    EXPECT_DOUBLE_EQ(back(0.0), -2.5);
}
