#include <catch2/catch_amalgamated.hpp>

#include "lamlab/expression.hpp"
#include "lamlab/rng.hpp"

using namespace lamlab;

TEST_CASE("grammar accepts the basic families") {
    auto constant = parse_family("a1");
    CHECK(constant.z_degree() == 0);
    CHECK(constant.eval({Complex(0.3, 0.1)}, {Complex(0.5, 0)}) == Complex(0.3, 0.1));

    auto shear = parse_family("a1 + 0.3*a1*z1");
    CHECK(shear.z_degree() == 1);
    const Complex a(0.2, -0.1), z(0.4, 0.25);
    CHECK(std::abs(shear.eval({a}, {z}) - (a + 0.3 * a * z)) < 1e-15);

    auto lip = parse_family("a1 + 0.25*abs(a1)*z1");
    CHECK(std::abs(lip.eval({Complex(-0.4, 0)}, {z}) - (Complex(-0.4, 0) + 0.25 * 0.4 * z)) < 1e-15);
}

TEST_CASE("holomorphy guard rejects abs over z at parse time") {
    try {
        parse_family("a1 + abs(z1)");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("z1") != std::string::npos);
        CHECK(e.line == 1);
        CHECK(e.column == 6);
    }
    CHECK_THROWS_AS(parse_family("abs(z2^3)"), ParseError);
    CHECK_NOTHROW(parse_family("abs(a1)*z1"));
}

TEST_CASE("syntax errors carry line and column") {
    try {
        parse_family("a1 + (a2");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
        CHECK(std::string(e.what()).find("')'") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_family("a1 +"), ParseError);
    CHECK_THROWS_AS(parse_family("z"), ParseError);
    CHECK_THROWS_AS(parse_family("a1 ~ a2"), ParseError);
    CHECK_THROWS_AS(parse_family("a1 a2"), ParseError);
}

TEST_CASE("powers, literals and precedence") {
    auto e = parse_family("2*z1^3 + 1.5i");
    const Complex z(0.5, 0.2);
    CHECK(std::abs(e.eval({}, {z}) - (2.0 * z * z * z + Complex(0, 1.5))) < 1e-15);
    CHECK(e.z_degree() == 3);

    auto f = parse_family("(a1 + a2)^2*z1");
    const Complex a1(0.1, 0), a2(0.2, 0);
    CHECK(std::abs(f.eval({a1, a2}, {z}) - (a1 + a2) * (a1 + a2) * z) < 1e-15);
}

namespace {

ExprPtr random_tree(RngStream& rng, int depth, bool inside_abs) {
    const double pick = rng.next_double();
    if (depth <= 0 || pick < 0.3) {
        const double leaf = rng.next_double();
        if (leaf < 0.3) {
            double v = std::round(rng.next_double() * 1000.0) / 128.0;
            return rng.next_double() < 0.5 ? Expr::make_literal(Complex(v, 0))
                                           : Expr::make_literal(Complex(0, v));
        }
        if (leaf < 0.7 && !inside_abs) return Expr::make_var(Expr::Kind::VarZ, 1 + (rng.next_u64() % 2));
        return Expr::make_var(Expr::Kind::VarA, 1 + (rng.next_u64() % 2));
    }
    if (pick < 0.45) return Expr::make_binary(Expr::Kind::Add, random_tree(rng, depth - 1, inside_abs),
                                              random_tree(rng, depth - 1, inside_abs));
    if (pick < 0.6) return Expr::make_binary(Expr::Kind::Sub, random_tree(rng, depth - 1, inside_abs),
                                             random_tree(rng, depth - 1, inside_abs));
    if (pick < 0.8) return Expr::make_binary(Expr::Kind::Mul, random_tree(rng, depth - 1, inside_abs),
                                             random_tree(rng, depth - 1, inside_abs));
    if (pick < 0.9) return Expr::make_pow(random_tree(rng, depth - 1, inside_abs),
                                          1 + static_cast<unsigned>(rng.next_u64() % 4));
    return Expr::make_abs(random_tree(rng, depth - 1, true));
}

}  // namespace

TEST_CASE("parse-print-parse round-trips to an identical tree") {
    RngStream rng(2024, 17);
    for (int it = 0; it < 400; ++it) {
        FamilyExpression original(random_tree(rng, 4, false));
        const std::string text = original.print();
        FamilyExpression reparsed = parse_family(text);
        INFO("expression: " << text);
        CHECK(reparsed == original);
        CHECK(reparsed.print() == text);
    }
}
