#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "limpet/family.hpp"
#include "limpet/poly_parser.hpp"

using namespace limpet;

static Poly P(const std::string& s) { return parse_poly(s); }

static SemialgSpec load(const std::string& name) {
    std::ifstream in(std::string(SPECS_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return SemialgSpec::parse(ss.str());
}

static const std::vector<RatP2> kRefS{{Rat(-2), Rat(0)}, {Rat(2), Rat(0)}, {Rat(0), Rat(1)}, {Rat(0), Rat(-1)}};

TEST_CASE("the reference family matches its closed form") {
    Poly f = P("y*(x^2+y^2-1)");
    auto fam = build_family(f, kRefS);
    Poly expect = P(
        "(y*(x^2+y^2-1))^2 - l*((x+2)^2+y^2-l^2)*((x-2)^2+y^2-l^2)"
        "*(x^2+(y-1)^2-l^2)*(x^2+(y+1)^2-l^2)");
    CHECK(fam.h == expect);
    CHECK(fam.h.subst(VL, Rat(0)) == f * f);
}

TEST_CASE("point family") {
    Poly f = P("x^2+y^2");
    auto fam = build_family(f, {});
    CHECK(fam.h == P("(x^2+y^2)^2 - l"));
}

TEST_CASE("lambda = 0 recovers the square for any family") {
    for (auto& fs : {"y*(x^2+y^2-1)", "x*y", "x^2+y^2-1"}) {
        Poly f = P(fs);
        auto fam = build_family(f, kRefS);
        CHECK(fam.h.subst(VL, Rat(0)) == f * f);
    }
}

TEST_CASE("hamiltonian field basics") {
    CHECK(hamiltonian_field(P("x")).P == P("x"));
    CHECK(hamiltonian_field(P("x")).Q == P("0-1"));
    auto X = hamiltonian_field(P("x^2+y^2"));
    CHECK(X.P == P("2*y + (x^2+y^2)*2*x"));
    CHECK(X.Q == P("0 - 2*x + (x^2+y^2)*2*y"));
}

TEST_CASE("the exact identity holds for constructed fields and detects tampering") {
    Poly f = P("y*(x^2+y^2-1)");
    auto fam = build_family(f, kRefS);
    auto X = hamiltonian_field(fam.h);
    CHECK(lie_identity_check(fam.h, X));
    // degree bookkeeping
    CHECK(X.P.degree() <= 2 * fam.h.degree() - 1);
    CHECK(X.Q.degree() <= 2 * fam.h.degree() - 1);
    // perturbation breaks the identity
    PlanarField bad{X.P + Poly::constant(Rat(1)), X.Q};
    CHECK_FALSE(lie_identity_check(fam.h, bad));
    CHECK(lie_identity_check(P("x"), hamiltonian_field(P("x"))));
}

TEST_CASE("transition point map") {
    CHECK(bendixson_point_map(RatP2{Rat(1), Rat(0)}) == RatP2{Rat(1), Rat(0)});
    CHECK(bendixson_point_map(RatP2{Rat(2), Rat(0)}) == RatP2{Rat(1, 2), Rat(0)});
    CHECK(bendixson_point_map(RatP2{Rat(0), Rat(1)}) == RatP2{Rat(0), Rat(-1)});
    CHECK_THROWS_AS(bendixson_point_map(RatP2{Rat(0), Rat(0)}), FamilyError);
}

TEST_CASE("compactifying the horizontal line") {
    auto spec = load("line.json");
    auto z = compactify_set(spec);
    CHECK(z.f_gamma() == P("x^2+y^2+y"));
    CHECK(z.member({Rat(0), Rat(0)}) == Membership::IN_GAMMA);
    CHECK_FALSE(z.unbounded());

    // mapped samples satisfy the image polynomial exactly
    std::map<int, Rat> at;
    for (int k = -10; k < 10; ++k) {
        RatP2 p{Rat(2 * k + 1, 2), Rat(1)};  // on the line y = 1
        REQUIRE(spec.member(p) == Membership::IN_GAMMA);
        RatP2 q = bendixson_point_map(p);
        at = {{VX, q.x}, {VY, q.y}};
        CHECK(z.f_gamma().eval(at) == 0);
        // image lies within the disk of radius 1/dist(0, set)
        CHECK(q.x * q.x + q.y * q.y <= 1);
    }
}

TEST_CASE("compactification needs an unbounded set") {
    CHECK_THROWS_AS(compactify_set(load("circle.json")), FamilyError);
}

TEST_CASE("line through the origin: translate, then map") {
    auto spec = SemialgSpec::parse(R"({"clauses": [{"f": "x"}]})");
    REQUIRE(spec.unbounded());
    CHECK_THROWS_AS(compactify_set(spec), FamilyError);
    auto moved = translate_spec(spec, {Rat(1), Rat(0)});
    CHECK(moved.f_gamma() == P("x-1"));
    auto z = compactify_set(moved);
    CHECK(z.f_gamma() == P("x^2+y^2-x"));
}

TEST_CASE("pullback of the unit horizontal field") {
    PlanarField Y{P("1"), P("0")};
    auto r = pullback_field(Y);
    CHECK(r.d == 0);
    CHECK(r.field.P == P("y^2-x^2"));
    CHECK(r.field.Q == P("0-2*x*y"));
    // flow lines are the circles v = const through the origin: the pulled
    // field annihilates v = -y/(x^2+y^2); its numerator test is exact
    Poly tangency = r.field.P * P("2*x*y") + r.field.Q * P("y^2-x^2");
    CHECK(tangency.is_zero());
}

TEST_CASE("double pullback is the identity on the example field") {
    PlanarField Y{P("1"), P("0")};
    auto once = pullback_field(Y);
    auto twice = pullback_field(once.field);
    CHECK(twice.field.P == P("1"));
    CHECK(twice.field.Q == P("0"));
    // directions agree with the original at sample points
    DPoly2 p = DPoly2::from(twice.field.P), q = DPoly2::from(twice.field.Q);
    for (int k = 1; k <= 50; ++k) {
        P2 z{0.1 * k - 2.6, 0.07 * k - 1.8};
        V2 v{p.eval(z), q.eval(z)};
        CHECK(v.unit().dot(P2{1, 0}) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("zero field pulls back to the zero field") {
    auto r = pullback_field(PlanarField{Poly::zero(), Poly::zero()});
    CHECK(r.d == 0);
    CHECK(r.field.P.is_zero());
    CHECK(r.field.Q.is_zero());
}

TEST_CASE("damped evaluation of the compactified field") {
    CHECK(compactified_field_eval(PlanarField{P("1"), P("0")}, std::nullopt).x == 0);
    auto v = compactified_field_eval(PlanarField{P("1"), P("0")}, P2{0, 0});
    CHECK(v.x == Catch::Approx(1.0));
    CHECK(v.y == Catch::Approx(0.0));
    auto w = compactified_field_eval(PlanarField{P("x"), P("0-1")}, P2{1, 1});
    CHECK(w.x == Catch::Approx(1.0 / 3));
    CHECK(w.y == Catch::Approx(-1.0 / 3));
}

TEST_CASE("non-generic family on the triod") {
    Poly f = P("x*y");
    std::vector<RatP2> S{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}, {Rat(0), Rat(-1)}};
    std::vector<RatP2> seeds{{Rat(-1, 4), Rat(0)}};
    auto fam = build_family_ng(f, S, seeds, 1e-3);
    Poly expect = P(
        "(x*y)^2 - l*((x-1)^2+y^2-l^2)*(x^2+(y-1)^2-l^2)*(x^2+(y+1)^2-l^2)"
        "*((x+1/4)^2+y^2-l^2)");
    CHECK(fam.h == expect);
    CHECK(fam.h.subst(VL, Rat(0)) == f * f);
    CHECK(lie_identity_check(fam.h, hamiltonian_field(fam.h)));
    // the symbolic form parses and matches the instance after substitution
    Poly sym = parse_poly(fam.h_symbolic_text);
    Poly inst = sym.subst(VA, Rat(-1, 4)).subst(VA + 1, Rat(0));
    CHECK(inst == fam.h);

    SECTION("empty seed list reduces to the generic construction") {
        auto plain = build_family_ng(f, S, {}, 1e-3);
        CHECK(plain.h == build_family(f, S).h);
    }
    SECTION("seed clash with a pinch point is rejected") {
        CHECK_THROWS_AS(build_family_ng(f, S, {{Rat(1), Rat(0)}}, 1e-3), FamilyError);
    }
    SECTION("instance coefficients converge as the seeds approach their limit") {
        auto coeff_gap = [&](int i) {
            auto a = build_family_ng(f, S, {{make_rat(-1, i), Rat(0)}}, 1e-6);
            auto b = build_family_ng(f, S, {{Rat(0), Rat(0)}}, 0);
            Poly gap = a.h - b.h;
            double worst = 0;
            for (auto& [m, c] : gap.terms()) worst = std::max(worst, std::abs(to_double(c)));
            return worst;
        };
        // linear in the seed offset
        CHECK(coeff_gap(64) < coeff_gap(4) / 8);
    }
}
