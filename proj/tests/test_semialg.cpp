#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

#include "limpet/poly_parser.hpp"
#include "limpet/semialg.hpp"

using namespace limpet;

static Poly P(const std::string& s) { return parse_poly(s); }

static std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

static SemialgSpec load(const std::string& name) { return SemialgSpec::parse(slurp(std::string(SPECS_DIR) + "/" + name)); }

TEST_CASE("parsing the reference document") {
    auto spec = load("example_fig1.json");
    REQUIRE(spec.clauses().size() == 1);
    CHECK(spec.f_gamma() == P("y*(x^2+y^2-1)"));
    REQUIRE(spec.transition_override().size() == 2);
    CHECK(spec.transition_override()[0] == RatP2{Rat(0), Rat(1)});
    CHECK_FALSE(spec.unbounded());
}

TEST_CASE("duplicate clauses collapse through the square-free product") {
    auto spec = SemialgSpec::from_clauses({Clause{P("y"), {}}, Clause{P("y"), {}}});
    CHECK(spec.f_gamma() == P("y"));
}

TEST_CASE("dimension-zero algebraic set") {
    auto spec = load("point.json");
    CHECK(spec.f_gamma() == P("x^2+y^2"));
    CHECK(spec.member({Rat(0), Rat(0)}) == Membership::IN_GAMMA);
    CHECK(spec.member({Rat(1), Rat(0)}) == Membership::OUTSIDE);
    CHECK_FALSE(spec.unbounded());
}

TEST_CASE("membership trichotomy") {
    auto spec = load("example_fig1.json");
    CHECK(spec.member({Rat(0), Rat(1)}) == Membership::IN_GAMMA);
    // on the axis beyond the disk: algebraic but outside the constraint
    CHECK(spec.member({Rat(3), Rat(0)}) == Membership::ON_ALGEBRAIC_ONLY);
    CHECK(spec.member({Rat(1), Rat(1)}) == Membership::OUTSIDE);
}

TEST_CASE("points in the set satisfy the associated polynomial exactly") {
    auto spec = load("example_fig1.json");
    std::map<int, Rat> at;
    std::mt19937_64 rng(4242);
    int checked = 0;
    while (checked < 1000) {
        // exact rational points of the set: circle via the rational
        // parametrization, segment directly
        RatP2 p;
        if (rng() & 1) {
            Rat t = make_rat(long(rng() % 2001) - 1000, long(rng() % 40) + 1);
            Rat d = 1 + t * t;
            p = {(1 - t * t) / d, 2 * t / d};
        } else {
            p = {make_rat(long(rng() % 4001) - 2000, 1000), Rat(0)};
        }
        REQUIRE(spec.member(p) == Membership::IN_GAMMA);
        at = {{VX, p.x}, {VY, p.y}};
        REQUIRE(spec.f_gamma().eval(at) == 0);
        ++checked;
    }
}

TEST_CASE("associated polynomial invariant under clause order and duplication") {
    Clause a{P("y"), {}}, b{P("x^2+y^2-1"), {}};
    auto f1 = associated_polynomial({a, b});
    auto f2 = associated_polynomial({b, a});
    auto f3 = associated_polynomial({a, b, a});
    CHECK(f1 == f2);
    CHECK(f1 == f3);
    CHECK(f1 == P("y*(x^2+y^2-1)"));
}

TEST_CASE("unbounded detection") {
    CHECK(load("line.json").unbounded());
    CHECK_FALSE(load("circle.json").unbounded());
    CHECK_FALSE(load("triod.json").unbounded());
    // bounded set whose algebraic set is unbounded (axis whiskers)
    CHECK_FALSE(load("example_fig1.json").unbounded());
}

TEST_CASE("spec document errors") {
    CHECK_THROWS_AS(SemialgSpec::parse("{"), SpecError);
    CHECK_THROWS_AS(SemialgSpec::parse(R"({"clauses": []})"), SpecError);
    CHECK_THROWS_AS(SemialgSpec::parse(R"({"clauses": [{"f": "3"}]})"), SpecError);
    CHECK_THROWS_AS(SemialgSpec::parse(R"({"clauses": [{"f": "x +"}]})"), SpecError);
    CHECK_THROWS_AS(SemialgSpec::parse(R"({"clauses": [{"f": "x", "constraints": [{"g": "y", "rel": "<"}]}]})"),
                    SpecError);
}

TEST_CASE("rational literals in documents") {
    auto spec = SemialgSpec::parse(R"({"clauses": [{"f": "y-1/2"}], "transition_points": [["1/3", 0.25]]})");
    // normalization clears denominators
    CHECK(spec.f_gamma() == P("2*y-1"));
    REQUIRE(spec.transition_override().size() == 1);
    CHECK(spec.transition_override()[0].x == Rat(1, 3));
    CHECK(spec.transition_override()[0].y == Rat(1, 4));
}
