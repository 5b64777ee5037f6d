#pragma once

#include <vector>

#include "limpet/poly.hpp"

namespace limpet {

/// Dense univariate polynomial over the rationals; support for Sturm-based
/// certified root isolation on an interval.
struct UPoly {
    std::vector<Rat> c;  // c[k] multiplies t^k

    static UPoly from(const Poly& p, int v) {
        UPoly u;
        if ((p.vars_mask() & ~(1u << v)) != 0)
            throw std::invalid_argument("UPoly::from: polynomial not univariate in requested variable");
        u.c.assign(size_t(std::max(0, p.deg_in(v))) + 1, Rat(0));
        for (auto& [m, coef] : p.terms()) u.c[m.e[v]] = coef;
        u.trim();
        return u;
    }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    int deg() const { return int(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }

    Rat eval(const Rat& t) const {
        Rat acc(0);
        for (size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
        return acc;
    }
    UPoly derivative() const {
        UPoly d;
        if (c.size() <= 1) return d;
        d.c.resize(c.size() - 1);
        for (size_t k = 1; k < c.size(); ++k) d.c[k - 1] = Rat(long(k)) * c[k];
        return d;
    }
};

namespace detail {

inline UPoly upoly_rem(UPoly a, const UPoly& b) {
    while (!a.is_zero() && a.deg() >= b.deg()) {
        Rat q = a.c.back() / b.c.back();
        int shift = a.deg() - b.deg();
        for (int k = 0; k <= b.deg(); ++k) a.c[size_t(k + shift)] -= q * b.c[size_t(k)];
        a.trim();
    }
    return a;
}

inline std::vector<UPoly> sturm_chain(const UPoly& p) {
    std::vector<UPoly> chain{p, p.derivative()};
    while (!chain.back().is_zero() && chain.back().deg() >= 0) {
        UPoly r = upoly_rem(chain[chain.size() - 2], chain.back());
        if (r.is_zero()) break;
        for (auto& coef : r.c) coef = -coef;
        chain.push_back(r);
        if (chain.back().deg() == 0) break;
    }
    return chain;
}

inline int sign_variations(const std::vector<UPoly>& chain, const Rat& t) {
    int var = 0, prev = 0;
    for (auto& q : chain) {
        Rat v = q.eval(t);
        int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++var;
        prev = s;
    }
    return var;
}

}  // namespace detail

/// Distinct real roots of p in [lo, hi], located to within tol by Sturm
/// isolation plus bisection. A p identically zero yields three sentinel
/// samples (the whole interval is a root locus).
inline std::vector<double> upoly_roots_in(const UPoly& p_in, const Rat& lo, const Rat& hi, double tol) {
    std::vector<double> out;
    UPoly p = p_in;
    p.trim();
    if (p.is_zero()) {
        out = {to_double(lo), to_double((lo + hi) / 2), to_double(hi)};
        return out;
    }
    if (p.deg() == 0) return out;

    // square-free reduction so every root is simple and counted once
    UPoly d = p.derivative();
    {
        UPoly a = p, b = d;
        while (!b.is_zero()) {
            UPoly r = detail::upoly_rem(a, b);
            a = b;
            b = r;
        }
        if (a.deg() > 0) {
            // divide p by gcd a
            std::vector<Rat> q(size_t(p.deg() - a.deg()) + 1, Rat(0));
            UPoly rem = p;
            for (int k = p.deg() - a.deg(); k >= 0; --k) {
                Rat coef = rem.c.size() > size_t(k + a.deg()) ? rem.c[size_t(k + a.deg())] / a.c.back() : Rat(0);
                q[size_t(k)] = coef;
                for (int j = 0; j <= a.deg(); ++j) rem.c[size_t(k + j)] -= coef * a.c[size_t(j)];
            }
            p.c = q;
            p.trim();
        }
    }

    auto chain = detail::sturm_chain(p);
    auto count = [&](const Rat& a, const Rat& b) {
        return detail::sign_variations(chain, a) - detail::sign_variations(chain, b);
    };

    struct Iv {
        Rat a, b;
        int n;
    };
    std::vector<Iv> stack;
    // nudge endpoints that are themselves roots
    Rat a = lo, b = hi;
    if (p.eval(a) == 0) out.push_back(to_double(a));
    int total = count(a, b);
    if (total > 0) stack.push_back({a, b, total});
    while (!stack.empty()) {
        Iv iv = stack.back();
        stack.pop_back();
        if (iv.n == 1) {
            // bisect to tolerance; the root lies in (a, b]
            Rat x = iv.a, y = iv.b;
            while (to_double(y - x) > tol) {
                Rat m = (x + y) / 2;
                if (p.eval(m) == 0) {
                    x = y = m;
                    break;
                }
                if (count(x, m) == 1)
                    y = m;
                else
                    x = m;
            }
            out.push_back(to_double((x + y) / 2));
            continue;
        }
        Rat m = (iv.a + iv.b) / 2;
        if (p.eval(m) == 0) out.push_back(to_double(m));
        int left = count(iv.a, m);
        int right = iv.n - left;
        if (left > 0) stack.push_back({iv.a, m, left});
        if (right > 0) stack.push_back({m, iv.b, right});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [&](double u, double v) { return std::abs(u - v) <= tol; }),
              out.end());
    return out;
}

}  // namespace limpet
