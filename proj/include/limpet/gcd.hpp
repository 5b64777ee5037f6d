#pragma once

#include <stdexcept>

#include "limpet/poly.hpp"

namespace limpet {

/// Integer-primitive form: coefficients scaled to coprime integers with the
/// grlex-leading coefficient positive. Canonical up to nothing further.
inline Poly normalize_primitive(const Poly& p) {
    if (p.is_zero()) return p;
    mpz_class den_lcm(1);
    for (auto& [m, c] : p.terms()) {
        mpz_class d = c.get_den();
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
    }
    mpz_class num_gcd(0);
    for (auto& [m, c] : p.terms()) {
        mpz_class n = c.get_num() * (den_lcm / c.get_den());
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), n.get_mpz_t());
    }
    Rat scale(den_lcm, num_gcd);
    scale.canonicalize();
    Poly r = scale * p;
    if (r.leading().second < 0) r = -r;
    return r;
}

namespace detail {

inline int top_var(const Poly& a, const Poly& b) {
    uint32_t mask = a.vars_mask() | b.vars_mask();
    for (int v = kMaxVars - 1; v >= 0; --v)
        if (mask & (1u << v)) return v;
    return -1;
}

inline Poly lc_wrt(const Poly& p, int v) { return p.coeff_wrt(v, p.deg_in(v)); }

/// Pseudo-remainder of A by B with respect to v:
/// lc_v(B)^(deg A - deg B + 1) * A = Q*B + R with deg_v R < deg_v B.
inline Poly prem(const Poly& A, const Poly& B, int v) {
    int db = B.deg_in(v);
    Poly lb = lc_wrt(B, v);
    Poly R = A;
    int e = A.deg_in(v) - db + 1;
    while (!R.is_zero() && R.deg_in(v) >= db) {
        int dr = R.deg_in(v);
        Poly t = lc_wrt(R, v) * Poly::variable(v, dr - db);
        R = lb * R - t * B;
        --e;
    }
    for (; e > 0; --e) R = lb * R;
    return R;
}

}  // namespace detail

Poly poly_gcd(const Poly& a, const Poly& b);

namespace detail {

inline Poly content_wrt(const Poly& p, int v) {
    Poly c = Poly::zero();
    for (int k = 0; k <= p.deg_in(v); ++k) {
        Poly ck = p.coeff_wrt(v, k);
        if (ck.is_zero()) continue;
        c = c.is_zero() ? normalize_primitive(ck) : poly_gcd(c, ck);
        if (c.is_constant()) return Poly::constant(Rat(1));
    }
    return c;
}

}  // namespace detail

/// Multivariate gcd over the rationals via primitive-part recursion on the
/// top variable with a subresultant remainder sequence. Result is normalized
/// primitive with positive leading coefficient; gcd(p, 0) = normalized p.
inline Poly poly_gcd(const Poly& a, const Poly& b) {
    if (a.is_zero() && b.is_zero()) throw std::domain_error("poly_gcd: both inputs zero");
    if (a.is_zero()) return normalize_primitive(b);
    if (b.is_zero()) return normalize_primitive(a);
    if (a.is_constant() || b.is_constant()) return Poly::constant(Rat(1));

    int v = detail::top_var(a, b);
    int da = a.deg_in(v), db = b.deg_in(v);
    if (da == 0) return poly_gcd(a, detail::content_wrt(b, v));
    if (db == 0) return poly_gcd(detail::content_wrt(a, v), b);

    Poly ca = detail::content_wrt(a, v), cb = detail::content_wrt(b, v);
    Poly A = *Poly::exact_div(a, ca), B = *Poly::exact_div(b, cb);
    Poly c = poly_gcd(ca, cb);
    if (A.deg_in(v) < B.deg_in(v)) std::swap(A, B);

    Poly g = Poly::constant(Rat(1)), h = g;
    Poly result_pp;
    while (true) {
        int delta = A.deg_in(v) - B.deg_in(v);
        Poly R = detail::prem(A, B, v);
        if (R.is_zero()) {
            result_pp = *Poly::exact_div(B, detail::content_wrt(B, v));
            break;
        }
        if (R.deg_in(v) == 0) {
            result_pp = Poly::constant(Rat(1));
            break;
        }
        A = B;
        B = *Poly::exact_div(R, g * h.pow(delta));
        g = detail::lc_wrt(A, v);
        if (delta == 1)
            h = g;
        else if (delta > 1)
            h = *Poly::exact_div(g.pow(delta), h.pow(delta - 1));
    }
    return normalize_primitive(c * result_pp);
}

/// Square-free part q = p / gcd(p, dp/dx, dp/dy); q has the same real zero
/// set as p. Valid in characteristic zero.
inline Poly square_free_part(const Poly& p) {
    if (p.is_constant()) throw std::domain_error("square_free_part: constant input");
    Poly px = p.partial(VX), py = p.partial(VY);
    if (px.is_zero() && py.is_zero())
        throw std::domain_error("square_free_part: input constant in x and y");
    Poly g;
    if (px.is_zero())
        g = poly_gcd(p, py);
    else if (py.is_zero())
        g = poly_gcd(p, px);
    else
        g = poly_gcd(poly_gcd(p, px), py);
    if (g.is_constant()) return normalize_primitive(p);
    auto q = Poly::exact_div(p, g);
    if (!q) throw std::logic_error("square_free_part: gcd does not divide input");
    return normalize_primitive(*q);
}

}  // namespace limpet
