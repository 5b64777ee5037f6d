#include <catch2/catch_amalgamated.hpp>

#include "limpet/poly_parser.hpp"
#include "limpet/solve2d.hpp"

using namespace limpet;

static Poly P(const std::string& s) { return parse_poly(s); }

namespace {

bool has_root_near(const std::vector<P2>& roots, double x, double y, double tol) {
    for (auto r : roots)
        if (std::abs(r.x - x) < tol && std::abs(r.y - y) < tol) return true;
    return false;
}

// Independent dense-grid sign-change oracle: clusters of cells where both
// polynomials change sign across the corners.
std::vector<P2> grid_zero_clusters(const Poly& p, const Poly& q, const Box& box, int n) {
    DPoly2 dp = DPoly2::from(p), dq = DPoly2::from(q);
    auto changes = [&](const DPoly2& f, double x0, double y0, double dx, double dy) {
        double a = f.eval(x0, y0), b = f.eval(x0 + dx, y0), c = f.eval(x0 + dx, y0 + dy), d = f.eval(x0, y0 + dy);
        double lo = std::min({a, b, c, d}), hi = std::max({a, b, c, d});
        return lo <= 0 && hi >= 0;
    };
    double dx = box.width() / n, dy = box.height() / n;
    std::vector<P2> cells;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double x0 = box.xmin + i * dx, y0 = box.ymin + j * dy;
            if (changes(dp, x0, y0, dx, dy) && changes(dq, x0, y0, dx, dy))
                cells.push_back({x0 + dx / 2, y0 + dy / 2});
        }
    // greedy cluster
    std::vector<P2> reps;
    for (auto c : cells) {
        bool merged = false;
        for (auto& r : reps)
            if (dist(c, r) < 4 * std::hypot(dx, dy)) merged = true;
        if (!merged) reps.push_back(c);
    }
    return reps;
}

}  // namespace

TEST_CASE("circle meets axis") {
    auto roots = solve_system(P("x^2+y^2-1"), P("y"), Box{-2, 2, -2, 2});
    REQUIRE(roots.size() == 2);
    CHECK(has_root_near(roots, -1, 0, 1e-9));
    CHECK(has_root_near(roots, 1, 0, 1e-9));
}

TEST_CASE("coordinate axes") {
    auto roots = solve_system(P("x"), P("y"), Box{-1, 1, -1, 1});
    REQUIRE(roots.size() == 1);
    CHECK(has_root_near(roots, 0, 0, 1e-12));
}

TEST_CASE("clause curve meets constraint boundary") {
    auto roots = solve_system(P("y*(x^2+y^2-1)"), P("x^2+y^2-4"), Box{-3, 3, -3, 3});
    REQUIRE(roots.size() == 2);
    CHECK(has_root_near(roots, -2, 0, 1e-8));
    CHECK(has_root_near(roots, 2, 0, 1e-8));
}

TEST_CASE("residuals within solver contract") {
    Poly p = P("y*(x^2+y^2-1)"), q = P("x^2+y^2-4");
    Box box{-3, 3, -3, 3};
    double tol = 1e-10 * box.diag();
    DPoly2 dp = DPoly2::from(p), dq = DPoly2::from(q);
    for (auto r : solve_system(p, q, box, tol)) {
        CHECK(std::abs(dp.eval(r)) <= 10 * tol * std::max(dp.mag(r), 1.0));
        CHECK(std::abs(dq.eval(r)) <= 10 * tol * std::max(dq.mag(r), 1.0));
    }
}

TEST_CASE("dense-grid oracle finds no missed clusters") {
    struct Case {
        const char *p, *q;
    };
    for (auto [ps, qs] : {Case{"x^2+y^2-1", "y"}, Case{"y*(x^2+y^2-1)", "x^2+y^2-4"},
                          Case{"x^2-y", "y^2-x"}, Case{"x^3-3*x*y^2-1", "3*x^2*y-y^3"}}) {
        Poly p = P(ps), q = P(qs);
        Box box{-3, 3, -3, 3};
        auto roots = solve_system(p, q, box);
        auto clusters = grid_zero_clusters(p, q, box, 2048);
        for (auto c : clusters) {
            bool covered = false;
            for (auto r : roots)
                if (dist(c, r) < 8 * box.diag() / 2048) covered = true;
            CHECK(covered);
        }
    }
}

TEST_CASE("shared component is rejected") {
    CHECK_THROWS_AS(solve_system(P("x*y"), P("x"), Box{-1, 1, -1, 1}), PositiveDimensionalError);
    CHECK_THROWS_AS(solve_system(Poly::zero(), P("x"), Box{-1, 1, -1, 1}), PositiveDimensionalError);
}

TEST_CASE("singular points of curves") {
    SECTION("circle-line product: crossings are singular") {
        auto s = curve_singular_points(P("y*(x^2+y^2-1)"), Box{-3, 3, -3, 3});
        REQUIRE(s.size() == 2);
        CHECK(has_root_near(s, -1, 0, 1e-8));
        CHECK(has_root_near(s, 1, 0, 1e-8));
    }
    SECTION("triod polynomial: origin only") {
        auto s = curve_singular_points(P("x*y"), Box{-2, 2, -2, 2});
        REQUIRE(s.size() == 1);
        CHECK(has_root_near(s, 0, 0, 1e-10));
    }
    SECTION("lemniscate: origin") {
        auto s = curve_singular_points(P("(x^2+y^2)^2-x^2+y^2"), Box{-2, 2, -2, 2});
        REQUIRE(s.size() == 1);
        CHECK(has_root_near(s, 0, 0, 1e-8));
    }
    SECTION("smooth circle: none") {
        CHECK(curve_singular_points(P("x^2+y^2-1"), Box{-2, 2, -2, 2}).empty());
    }
    SECTION("isolated real point") {
        auto s = curve_singular_points(P("x^2+y^2"), Box{-1, 1, -1, 1});
        REQUIRE(s.size() == 1);
        CHECK(has_root_near(s, 0, 0, 1e-10));
    }
}
