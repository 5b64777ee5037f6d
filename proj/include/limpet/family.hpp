#pragma once

#include <optional>
#include <string>
#include <vector>

#include "limpet/gcd.hpp"
#include "limpet/poly.hpp"
#include "limpet/semialg.hpp"

namespace limpet {

struct FamilyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// The perturbation family

struct FamilyH {
    enum class Mode { GENERIC, NON_GENERIC };
    Mode mode = Mode::GENERIC;
    Poly h;                       // in x, y, l (seeds substituted in NON_GENERIC mode)
    std::vector<RatP2> S;         // pinch points used by the product
    std::vector<RatP2> alpha;     // branch seeds of this instance (NON_GENERIC)
    std::string h_symbolic_text;  // factored text over x, y, l, a1.. (NON_GENERIC)
};

namespace detail {

inline Poly pinched_disk_factor(const Poly& cx, const Poly& cy) {
    // ||(x,y) - c||^2 - l^2 with c given as coordinate polynomials
    Poly dx = Poly::variable(VX) - cx, dy = Poly::variable(VY) - cy;
    return dx * dx + dy * dy - Poly::variable(VL, 2);
}

}  // namespace detail

/// h = f^2 - l * prod_{p in S} (||x - p||^2 - l^2), expanded exactly.
inline FamilyH build_family(const Poly& f, const std::vector<RatP2>& S) {
    FamilyH fam;
    fam.mode = FamilyH::Mode::GENERIC;
    fam.S = S;
    Poly prod = Poly::constant(Rat(1));
    for (auto& p : S) prod *= detail::pinched_disk_factor(Poly::constant(p.x), Poly::constant(p.y));
    fam.h = f * f - Poly::variable(VL) * prod;
    return fam;
}

/// Non-generic variant: the pinch product gains one factor per branch seed.
/// The instance polynomial has the seeds substituted; the factored symbolic
/// form over the joint parameter roster (a1, a2, ...) is kept as text.
inline FamilyH build_family_ng(const Poly& f, const std::vector<RatP2>& S, const std::vector<RatP2>& seeds,
                               double min_separation) {
    for (auto& s : seeds)
        for (auto& p : S)
            if (dist(s.approx(), p.approx()) < min_separation)
                throw FamilyError("build_family_ng: seed coincides with a pinch point");
    FamilyH fam;
    fam.mode = FamilyH::Mode::NON_GENERIC;
    fam.S = S;
    fam.alpha = seeds;
    Poly prod = Poly::constant(Rat(1));
    for (auto& p : S) prod *= detail::pinched_disk_factor(Poly::constant(p.x), Poly::constant(p.y));
    for (auto& s : seeds) prod *= detail::pinched_disk_factor(Poly::constant(s.x), Poly::constant(s.y));
    fam.h = f * f - Poly::variable(VL) * prod;

    std::string sym = "(" + f.to_string() + ")^2 - l";
    for (auto& p : S)
        sym += "*((x-(" + rat_to_string(p.x) + "))^2+(y-(" + rat_to_string(p.y) + "))^2-l^2)";
    for (size_t k = 0; k < seeds.size(); ++k) {
        std::string ax = "a" + std::to_string(2 * k + 1), ay = "a" + std::to_string(2 * k + 2);
        sym += "*((x-" + ax + ")^2+(y-" + ay + ")^2-l^2)";
    }
    fam.h_symbolic_text = sym;
    return fam;
}

// ---------------------------------------------------------------------------
// The vector field

struct PlanarField {
    Poly P, Q;
    int degree() const { return std::max(P.degree(), Q.degree()); }
};

/// X = (h_y + h h_x) d/dx + (-h_x + h h_y) d/dy.
inline PlanarField hamiltonian_field(const Poly& h) {
    Poly hx = h.partial(VX), hy = h.partial(VY);
    return {hy + h * hx, -hx + h * hy};
}

/// Exact check of X(h) = h * |grad h|^2 as a polynomial identity.
inline bool lie_identity_check(const Poly& h, const PlanarField& X) {
    Poly hx = h.partial(VX), hy = h.partial(VY);
    Poly residual = X.P * hx + X.Q * hy - h * (hx * hx + hy * hy);
    return residual.is_zero();
}

// ---------------------------------------------------------------------------
// Bendixson compactification

/// (x1, x2) -> (x1/r, -x2/r), r = x1^2 + x2^2; an involution away from 0.
inline RatP2 bendixson_point_map(const RatP2& p) {
    Rat r = p.x * p.x + p.y * p.y;
    if (r == 0) throw FamilyError("bendixson_point_map: origin has no image");
    return {p.x / r, -p.y / r};
}

inline P2 bendixson_point_map(P2 p) {
    double r = p.norm2();
    if (r == 0) throw FamilyError("bendixson_point_map: origin has no image");
    return {p.x / r, -p.y / r};
}

namespace detail {

/// Image of p under the transition map with denominators cleared: the
/// numerator of r^deg(p) * p(u/r, -v/r), with common r powers removed.
inline Poly bendixson_clause_image(const Poly& p) {
    int m = std::max(p.degree_xy(), 0);
    Poly rho = Poly::variable(VX, 2) + Poly::variable(VY, 2);
    Poly out;
    for (int k = 0; k <= m; ++k) {
        Poly hk = p.homogeneous_part_xy(k);
        if (hk.is_zero()) continue;
        // substitute (u, -v) into the homogeneous part
        Poly hk_sub = hk.subst_linear(VY, Rat(0), Rat(-1));
        out += hk_sub * rho.pow(m - k);
    }
    // clear the common rho power
    while (!out.is_zero()) {
        auto q = Poly::exact_div(out, rho);
        if (!q) break;
        out = *q;
    }
    return normalize_primitive(out);
}

}  // namespace detail

/// Compactified spec: each clause polynomial is replaced by its transition
/// image, relations preserved (the cleared factor is positive away from the
/// origin). The origin, which is the image of infinity, is adjoined via a
/// point clause when no transformed clause already contains it.
inline SemialgSpec compactify_set(const SemialgSpec& spec) {
    if (!spec.unbounded()) throw FamilyError("compactify_set: set is bounded");
    RatP2 origin{Rat(0), Rat(0)};
    if (spec.member(origin) == Membership::IN_GAMMA)
        throw FamilyError("compactify_set: origin lies on the set; translate first");

    std::vector<Clause> image;
    for (auto& c : spec.clauses()) {
        Clause ic;
        ic.f = detail::bendixson_clause_image(c.f);
        if (ic.f.is_constant()) throw FamilyError("compactify_set: clause image degenerates");
        for (auto& g : c.constraints) {
            Constraint ig;
            ig.g = detail::bendixson_clause_image(g.g);
            ig.rel = g.rel;
            ic.constraints.push_back(std::move(ig));
        }
        image.push_back(std::move(ic));
    }
    auto z = SemialgSpec::from_clauses(image);
    if (z.member(origin) != Membership::IN_GAMMA) {
        image.push_back(Clause{Poly::variable(VX, 2) + Poly::variable(VY, 2), {}});
        z = SemialgSpec::from_clauses(image);
    }
    if (z.unbounded()) throw FamilyError("compactify_set: image still unbounded");
    return z;
}

/// Translates every clause polynomial by t (x -> x - tx, y -> y - ty), so the
/// translated set is the original shifted by +t.
inline SemialgSpec translate_spec(const SemialgSpec& spec, const RatP2& t) {
    std::vector<Clause> moved;
    for (auto& c : spec.clauses()) {
        Clause mc;
        mc.f = c.f.subst_linear(VX, -t.x, Rat(1)).subst_linear(VY, -t.y, Rat(1));
        for (auto& g : c.constraints)
            mc.constraints.push_back({g.g.subst_linear(VX, -t.x, Rat(1)).subst_linear(VY, -t.y, Rat(1)), g.rel});
        moved.push_back(std::move(mc));
    }
    std::vector<RatP2> tr;
    for (auto& p : spec.transition_override()) tr.push_back({p.x + t.x, p.y + t.y});
    return SemialgSpec::from_clauses(std::move(moved), std::nullopt, std::move(tr));
}

struct PullbackResult {
    PlanarField field;
    int d = 0;  // clearing power of (x1^2 + x2^2)
};

/// X = (x1^2+x2^2)^d Phi^*(Y) expressed in the original plane, with d the
/// minimal integer making both components polynomial. The inverse Jacobian of
/// the transition map is [[a, b], [-b, a]] with a = x2^2 - x1^2, b = 2 x1 x2.
inline PullbackResult pullback_field(const PlanarField& Y) {
    Poly rho = Poly::variable(VX, 2) + Poly::variable(VY, 2);
    int m = std::max({Y.P.degree_xy(), Y.Q.degree_xy(), 0});

    auto compose = [&](const Poly& p) {
        // r^m * p(x1/r, -x2/r), polynomial by homogeneous bookkeeping
        Poly out;
        for (int k = 0; k <= m; ++k) {
            Poly hk = p.homogeneous_part_xy(k);
            if (hk.is_zero()) continue;
            out += hk.subst_linear(VY, Rat(0), Rat(-1)) * rho.pow(m - k);
        }
        return out;
    };
    Poly At = compose(Y.P), Bt = compose(Y.Q);
    Poly a = Poly::variable(VY, 2) - Poly::variable(VX, 2);
    Poly b = Rat(2) * (Poly::variable(VX) * Poly::variable(VY));
    Poly X1 = a * At + b * Bt;
    Poly X2 = Rat(-1) * b * At + a * Bt;

    // strip the common rho powers jointly; the cleared exponent defines d
    int cleared = 0;
    while (!(X1.is_zero() && X2.is_zero())) {
        auto q1 = X1.is_zero() ? std::optional<Poly>(Poly::zero()) : Poly::exact_div(X1, rho);
        auto q2 = X2.is_zero() ? std::optional<Poly>(Poly::zero()) : Poly::exact_div(X2, rho);
        if (!q1 || !q2) break;
        X1 = *q1;
        X2 = *q2;
        ++cleared;
    }
    int d = m - cleared;
    if (d < 0) {
        // the raw components carried surplus rho powers; restore them
        for (; d < 0; ++d) {
            X1 *= rho;
            X2 *= rho;
        }
    }
    return {{X1, X2}, d};
}

/// Damped evaluation of the compactified field: X / (1 + (x^2+y^2)^deg),
/// zero at infinity.
inline V2 compactified_field_eval(const PlanarField& X, std::optional<P2> pt) {
    if (!pt) return {0, 0};
    DPoly2 p = DPoly2::from(X.P), q = DPoly2::from(X.Q);  // throws if not bivariate
    int d = std::max({X.P.degree_xy(), X.Q.degree_xy(), 1});
    double damp = 1 + std::pow(pt->norm2(), d);
    return {p.eval(*pt) / damp, q.eval(*pt) / damp};
}

}  // namespace limpet
