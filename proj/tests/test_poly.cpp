#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "limpet/poly.hpp"
#include "limpet/poly_parser.hpp"
#include "limpet/rational.hpp"

using namespace limpet;

static Poly P(const std::string& s) { return parse_poly(s); }

TEST_CASE("evaluation at exact points") {
    Poly f = P("y*(x^2+y^2-1)");
    std::map<int, Rat> at{{VX, Rat(2)}, {VY, Rat(0)}};
    CHECK(f.eval(at) == 0);
    at = {{VX, Rat(0)}, {VY, Rat(2)}};
    CHECK(f.eval(at) == 6);
    CHECK(Poly::zero().eval({}) == 0);

    // missing variable is an error
    CHECK_THROWS_AS(f.eval({{VX, Rat(1)}}), std::invalid_argument);
}

TEST_CASE("formal partial derivatives") {
    Poly f = P("y*(x^2+y^2-1)");
    CHECK(f.partial(VY) == P("x^2+3*y^2-1"));
    CHECK(Poly::constant(Rat(7)).partial(VX).is_zero());
    Poly h = P("(y*(x^2+y^2-1))^2 - l");
    CHECK(h.partial(VL) == P("0-1"));
}

TEST_CASE("evaluation is a ring homomorphism on samples") {
    std::mt19937_64 rng(12345);
    auto rnd_rat = [&] {
        return make_rat(long(rng() % 41) - 20, long(rng() % 7) + 1);
    };
    Poly p = P("x^2*y - 3*y^2 + 1/2*x - 7");
    Poly q = P("2*x*y^2 + y - 5/3");
    Poly sum = p + q, prod = p * q;
    for (int k = 0; k < 100; ++k) {
        std::map<int, Rat> at{{VX, rnd_rat()}, {VY, rnd_rat()}};
        CHECK(sum.eval(at) == p.eval(at) + q.eval(at));
        CHECK(prod.eval(at) == p.eval(at) * q.eval(at));
    }
}

TEST_CASE("parser grammar") {
    CHECK(P("y*(x^2+y^2-1)") == Poly::variable(VY) * (Poly::variable(VX, 2) + Poly::variable(VY, 2) - Poly::constant(Rat(1))));
    CHECK(P("1/2*x") == Rat(1, 2) * Poly::variable(VX));
    CHECK(P("-x^2") == -Poly::variable(VX, 2));
    CHECK(P(" 4 - x ^ 2 - y ^ 2 ") == P("4-x^2-y^2"));
    CHECK(P("a1*a2") == Poly::variable(VA) * Poly::variable(VA + 1));
    CHECK(P("l^3") == Poly::variable(VL, 3));
    CHECK_THROWS_AS(P("x +"), ParseError);
    CHECK_THROWS_AS(P("x^-2"), ParseError);
    CHECK_THROWS_AS(P("z"), ParseError);
    CHECK_THROWS_AS(P("(x"), ParseError);
}

TEST_CASE("printing round-trips and is a fixed point") {
    for (const char* s : {"y*(x^2+y^2-1)", "x^2*y-3*y^2+1/2*x-7", "0", "-x+1", "l*(x^2-1)^2"}) {
        Poly p = P(s);
        std::string printed = p.to_string();
        CHECK(parse_poly(printed) == p);
        CHECK(parse_poly(printed).to_string() == printed);
    }
}

TEST_CASE("linear substitution and homogeneous parts") {
    Poly p = P("x^2 + y");
    // x -> 1 + 2x
    Poly q = p.subst_linear(VX, Rat(1), Rat(2));
    CHECK(q == P("4*x^2 + 4*x + 1 + y"));
    Poly f = P("y - 1");
    CHECK(f.homogeneous_part(1) == P("y"));
    CHECK(f.homogeneous_part(0) == P("0-1"));
}

TEST_CASE("exact division") {
    Poly a = P("(x^2+y^2-1)*(x-y+2)");
    auto q = Poly::exact_div(a, P("x^2+y^2-1"));
    REQUIRE(q.has_value());
    CHECK(*q == P("x-y+2"));
    CHECK_FALSE(Poly::exact_div(P("x^2+1"), P("x+1")).has_value());
}

TEST_CASE("rational snapping recovers simple values") {
    CHECK(snap_rational(2.0000000001) == 2);
    CHECK(snap_rational(-0.24999999993) == Rat(-1, 4));
    CHECK(snap_rational(0.3333333333417) == Rat(1, 3));
    CHECK(rat_from_double(0.5) == Rat(1, 2));
    CHECK(rat_to_string(parse_rat("-6/4")) == "-3/2");
}
