#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

#include "limpet/dpoly.hpp"
#include "limpet/gcd.hpp"
#include "limpet/geometry.hpp"
#include "limpet/poly.hpp"

namespace limpet {

struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PositiveDimensionalError : SolveError {
    using SolveError::SolveError;
};
struct DepthExhaustedError : SolveError {
    using SolveError::SolveError;
};

namespace detail {

struct BMat {
    int m = 0, n = 0;  // degrees
    std::vector<double> a;  // (m+1)x(n+1), row-major in x-index
    double& at(int i, int j) { return a[size_t(i) * (n + 1) + j]; }
    double at(int i, int j) const { return a[size_t(i) * (n + 1) + j]; }
    bool sign_definite() const {
        bool pos = true, neg = true;
        for (double v : a) {
            if (v <= 0) pos = false;
            if (v >= 0) neg = false;
            if (!pos && !neg) return false;
        }
        return pos || neg;
    }
};

inline mpz_class binom(int n, int k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

/// Exact Bernstein tensor of p over box (degrees padded to (m,n)).
inline BMat bernstein_tensor(const Poly& p, const Box& box, int m, int n) {
    // affine map onto the unit square, exactly
    Poly q = p.subst_linear(VX, rat_from_double(box.xmin), rat_from_double(box.xmax - box.xmin));
    q = q.subst_linear(VY, rat_from_double(box.ymin), rat_from_double(box.ymax - box.ymin));
    std::vector<std::vector<Rat>> a(size_t(m) + 1, std::vector<Rat>(size_t(n) + 1, Rat(0)));
    for (auto& [mono, c] : q.terms()) a[mono.e[VX]][mono.e[VY]] = c;
    // power -> Bernstein along x
    std::vector<std::vector<Rat>> b(size_t(m) + 1, std::vector<Rat>(size_t(n) + 1, Rat(0)));
    for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= m; ++k) {
            Rat acc(0);
            for (int i = 0; i <= k; ++i) acc += Rat(binom(k, i)) / Rat(binom(m, i)) * a[size_t(i)][size_t(j)];
            b[size_t(k)][size_t(j)] = acc;
        }
    // then along y
    BMat out;
    out.m = m;
    out.n = n;
    out.a.resize(size_t(m + 1) * (n + 1));
    for (int k = 0; k <= m; ++k)
        for (int l = 0; l <= n; ++l) {
            Rat acc(0);
            for (int j = 0; j <= l; ++j) acc += Rat(binom(l, j)) / Rat(binom(n, j)) * b[size_t(k)][size_t(j)];
            out.at(k, l) = to_double(acc);
        }
    return out;
}

inline void split_x(const BMat& B, BMat& L, BMat& R) {
    L = B;
    R = B;
    std::vector<double> tmp(size_t(B.m) + 1);
    for (int j = 0; j <= B.n; ++j) {
        for (int i = 0; i <= B.m; ++i) tmp[size_t(i)] = B.at(i, j);
        L.at(0, j) = tmp[0];
        R.at(B.m, j) = tmp[size_t(B.m)];
        for (int r = 1; r <= B.m; ++r) {
            for (int k = 0; k <= B.m - r; ++k) tmp[size_t(k)] = 0.5 * (tmp[size_t(k)] + tmp[size_t(k) + 1]);
            L.at(r, j) = tmp[0];
            R.at(B.m - r, j) = tmp[size_t(B.m - r)];
        }
    }
}

inline void split_y(const BMat& B, BMat& L, BMat& R) {
    L = B;
    R = B;
    std::vector<double> tmp(size_t(B.n) + 1);
    for (int i = 0; i <= B.m; ++i) {
        for (int j = 0; j <= B.n; ++j) tmp[size_t(j)] = B.at(i, j);
        L.at(i, 0) = tmp[0];
        R.at(i, B.n) = tmp[size_t(B.n)];
        for (int r = 1; r <= B.n; ++r) {
            for (int k = 0; k <= B.n - r; ++k) tmp[size_t(k)] = 0.5 * (tmp[size_t(k)] + tmp[size_t(k) + 1]);
            L.at(i, r) = tmp[0];
            R.at(i, B.n - r) = tmp[size_t(B.n - r)];
        }
    }
}

struct NewtonResult {
    P2 pt;
    bool ok = false;
};

/// Damped Newton for the pair (p, q); damping factor 1/2, at most 50 steps.
inline NewtonResult newton2d(const DFun2& p, const DFun2& q, P2 x0, const Box& box, double tol) {
    P2 x = x0;
    auto res_norm = [&](P2 z) { return std::hypot(p.value(z), q.value(z)); };
    double r = res_norm(x);
    for (int it = 0; it < 50; ++it) {
        V2 gp = p.grad(x), gq = q.grad(x);
        double det = gp.x * gq.y - gp.y * gq.x;
        if (det == 0 || !std::isfinite(det)) break;
        double fp = p.value(x), fq = q.value(x);
        P2 step{(-fp * gq.y + fq * gp.y) / det, (-gp.x * fq + gq.x * fp) / det};
        P2 xn = x + step;
        double rn = res_norm(xn);
        int damp = 0;
        while (rn > r && damp < 20) {
            step = 0.5 * step;
            xn = x + step;
            rn = res_norm(xn);
            ++damp;
        }
        if (rn >= r && step.norm() < 1e-17 * (std::abs(x.x) + std::abs(x.y) + 1)) break;
        x = xn;
        r = rn;
        if (step.norm() < 0.25 * tol && r <= tol * (p.f.mag(x) + q.f.mag(x))) break;
    }
    bool in_box = x.x >= box.xmin - tol && x.x <= box.xmax + tol && x.y >= box.ymin - tol && x.y <= box.ymax + tol;
    bool small = std::abs(p.value(x)) <= 10 * tol * std::max(p.f.mag(x), 1e-300) &&
                 std::abs(q.value(x)) <= 10 * tol * std::max(q.f.mag(x), 1e-300);
    return {x, in_box && small};
}

}  // namespace detail

/// All real common zeros of the coprime pair (p, q) inside box, each within
/// tol of a true zero; Bernstein-basis subdivision bisecting the longer side,
/// damped Newton refinement, duplicates within 2*tol merged.
inline std::vector<P2> solve_system(const Poly& p, const Poly& q, const Box& box, double tol = 0) {
    if (p.is_zero() || q.is_zero())
        throw PositiveDimensionalError("solve_system: a zero polynomial vanishes on the whole box");
    if ((p.vars_mask() | q.vars_mask()) & ~((1u << VX) | (1u << VY)))
        throw std::invalid_argument("solve_system: inputs must be bivariate in x,y");
    if (tol <= 0) tol = 1e-10 * box.diag();
    if (p.is_constant() || q.is_constant()) return {};
    if (!poly_gcd(p, q).is_constant())
        throw PositiveDimensionalError("solve_system: inputs share a curve component (non-constant gcd)");

    DFun2 fp = DFun2::from(p), fq = DFun2::from(q);

    struct Node {
        detail::BMat bp, bq;
        double u0, u1, v0, v1;
        int depth;
    };
    Node root;
    root.bp = detail::bernstein_tensor(p, box, std::max(p.deg_in(VX), 0), std::max(p.deg_in(VY), 0));
    root.bq = detail::bernstein_tensor(q, box, std::max(q.deg_in(VX), 0), std::max(q.deg_in(VY), 0));
    root.u0 = root.v0 = 0;
    root.u1 = root.v1 = 1;
    root.depth = 0;

    const double w = box.width(), h = box.height();
    auto world = [&](double u, double v) { return P2{box.xmin + u * w, box.ymin + v * h}; };
    const double coarse = std::max(tol, box.diag() * std::pow(2.0, -11));

    std::vector<P2> candidates;
    std::deque<Node> work{std::move(root)};
    size_t processed = 0;
    while (!work.empty()) {
        Node nd = std::move(work.back());
        work.pop_back();
        if (++processed > 2'000'000)
            throw DepthExhaustedError("solve_system: subdivision budget exhausted");
        if (nd.bp.sign_definite() || nd.bq.sign_definite()) continue;
        double dw = (nd.u1 - nd.u0) * w, dh = (nd.v1 - nd.v0) * h;
        double diag = std::hypot(dw, dh);
        if (diag <= coarse) {
            P2 c = world((nd.u0 + nd.u1) / 2, (nd.v0 + nd.v1) / 2);
            auto r = detail::newton2d(fp, fq, c, box, tol);
            if (r.ok) {
                candidates.push_back(r.pt);
                continue;
            }
            if (diag <= tol) {
                // cannot exclude and Newton will not bite (singular root):
                // accept the cell center if the residuals already qualify
                bool small = std::abs(fp.value(c)) <= 10 * tol * std::max(fp.f.mag(c), 1e-300) &&
                             std::abs(fq.value(c)) <= 10 * tol * std::max(fq.f.mag(c), 1e-300);
                if (small) {
                    candidates.push_back(c);
                    continue;
                }
                if (nd.depth > 80) throw DepthExhaustedError("solve_system: subdivision depth exhausted");
            }
        }
        Node a = nd, b = nd;
        if (dw >= dh) {
            detail::split_x(nd.bp, a.bp, b.bp);
            detail::split_x(nd.bq, a.bq, b.bq);
            double um = (nd.u0 + nd.u1) / 2;
            a.u1 = um;
            b.u0 = um;
        } else {
            detail::split_y(nd.bp, a.bp, b.bp);
            detail::split_y(nd.bq, a.bq, b.bq);
            double vm = (nd.v0 + nd.v1) / 2;
            a.v1 = vm;
            b.v0 = vm;
        }
        a.depth = b.depth = nd.depth + 1;
        work.push_back(std::move(a));
        work.push_back(std::move(b));
    }

    // merge duplicates within 2*tol, keeping the best residual
    std::sort(candidates.begin(), candidates.end(), lex_less);
    std::vector<P2> out;
    auto residual = [&](P2 z) { return std::hypot(fp.value(z), fq.value(z)); };
    for (auto c : candidates) {
        bool merged = false;
        for (auto& o : out) {
            if (dist(c, o) <= 2 * tol) {
                if (residual(c) < residual(o)) o = c;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(c);
    }
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

/// Singular points of the square-free curve f = 0 inside box: the common
/// zeros of {f, fx, fy}. Shared curve components of the partials are split
/// off through their gcd so each pairwise solve stays zero-dimensional.
inline std::vector<P2> curve_singular_points(const Poly& f, const Box& box, double tol = 0) {
    if (tol <= 0) tol = 1e-10 * box.diag();
    Poly fx = f.partial(VX), fy = f.partial(VY);
    std::vector<P2> pts;
    DFun2 df = DFun2::from(f);
    auto keep_on_curve = [&](const std::vector<P2>& in) {
        std::vector<P2> kept;
        for (auto z : in)
            if (std::abs(df.value(z)) <= 100 * tol * std::max(df.f.mag(z), 1e-300)) kept.push_back(z);
        return kept;
    };
    if (fx.is_zero() && fy.is_zero()) return {};
    if (fx.is_zero()) return keep_on_curve(solve_system(f, fy, box, tol));
    if (fy.is_zero()) return keep_on_curve(solve_system(f, fx, box, tol));

    Poly d = poly_gcd(fx, fy);
    if (d.is_constant()) {
        pts = keep_on_curve(solve_system(fx, fy, box, tol));
    } else {
        // on d = 0 both partials vanish identically; f is coprime to d by
        // square-freeness
        auto on_shared = solve_system(f, d, box, tol);
        auto part_a = solve_system(*Poly::exact_div(fx, d), *Poly::exact_div(fy, d), box, tol);
        pts = on_shared;
        for (auto z : keep_on_curve(part_a)) pts.push_back(z);
    }
    std::sort(pts.begin(), pts.end(), lex_less);
    std::vector<P2> out;
    for (auto c : pts) {
        bool dup = false;
        for (auto o : out)
            if (dist(c, o) <= 2 * tol) dup = true;
        if (!dup) out.push_back(c);
    }
    return out;
}

}  // namespace limpet
