#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "limpet/curve_trace.hpp"
#include "limpet/semialg.hpp"
#include "limpet/solve2d.hpp"

namespace limpet {

struct TopologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnresolvedError : TopologyError {
    using TopologyError::TopologyError;
};
struct HypothesisError : TopologyError {
    // violations of the construction's standing assumptions (disconnected
    // set, isolated singleton components, ...)
    using TopologyError::TopologyError;
};

// ---------------------------------------------------------------------------
// Rasterization

/// Conservative cell raster: a cell is marked iff some clause can meet it
/// (its f changes sign or nearly vanishes on the corners while every
/// constraint still admits points of the cell).
struct GammaRaster {
    Box box;
    int res = 0;
    std::vector<uint8_t> gamma;   // res*res cell flags
    std::vector<int32_t> label;   // complement component per cell, -1 on gamma cells
    int k = 0;                    // complement component count
    int unbounded_label = -1;
    int gamma_components = 0;

    double cw() const { return box.width() / res; }
    double ch() const { return box.height() / res; }
    P2 cell_center(int i, int j) const { return {box.xmin + (i + 0.5) * cw(), box.ymin + (j + 0.5) * ch()}; }
    bool in_grid(int i, int j) const { return i >= 0 && j >= 0 && i < res && j < res; }
    bool is_gamma(int i, int j) const { return gamma[size_t(j) * res + i] != 0; }
    int32_t label_at(int i, int j) const { return label[size_t(j) * res + i]; }
};

namespace detail {

inline GammaRaster rasterize(const SemialgSpec& spec, const Box& box, int res) {
    GammaRaster r;
    r.box = box;
    r.res = res;
    r.gamma.assign(size_t(res) * res, 0);

    const double rel = 1e-9;
    // corner values per clause polynomial
    size_t ncl = spec.clauses().size();
    std::vector<DPoly2> fs, mags;
    std::vector<std::vector<DPoly2>> gs(ncl);
    for (auto& c : spec.clauses()) {
        fs.push_back(DPoly2::from(c.f));
        std::vector<DPoly2> cg;
        for (auto& g : c.constraints) cg.push_back(DPoly2::from(g.g));
        gs[&c - spec.clauses().data()] = std::move(cg);
    }

    double dx = box.width() / res, dy = box.height() / res;
    auto corner = [&](int i, int j) { return P2{box.xmin + i * dx, box.ymin + j * dy}; };

    // evaluate each clause f on the corner grid once
    std::vector<std::vector<double>> fval(ncl);
    std::vector<double> coeffs;
    for (size_t c = 0; c < ncl; ++c) {
        fval[c].resize(size_t(res + 1) * (res + 1));
        for (int j = 0; j <= res; ++j) {
            fs[c].row(box.ymin + j * dy, coeffs);
            for (int i = 0; i <= res; ++i)
                fval[c][size_t(j) * (res + 1) + i] = DPoly2::horner(coeffs, box.xmin + i * dx);
        }
    }

    for (int j = 0; j < res; ++j) {
        for (int i = 0; i < res; ++i) {
            bool marked = false;
            for (size_t c = 0; c < ncl && !marked; ++c) {
                double v[4] = {fval[c][size_t(j) * (res + 1) + i], fval[c][size_t(j) * (res + 1) + i + 1],
                               fval[c][size_t(j + 1) * (res + 1) + i], fval[c][size_t(j + 1) * (res + 1) + i + 1]};
                bool pos = false, neg = false, nearz = false;
                P2 cs[4] = {corner(i, j), corner(i + 1, j), corner(i, j + 1), corner(i + 1, j + 1)};
                for (int q = 0; q < 4; ++q) {
                    double m = std::max(fs[c].mag(cs[q]), 1e-300);
                    if (std::abs(v[q]) <= rel * m)
                        nearz = true;
                    else if (v[q] > 0)
                        pos = true;
                    else
                        neg = true;
                }
                if (!((pos && neg) || nearz)) continue;
                // constraints must admit part of the cell
                bool admissible = true;
                for (auto& g : gs[c]) {
                    double best = -1e300;
                    for (auto q : cs) best = std::max(best, g.eval(q) + rel * std::max(g.mag(q), 1e-300));
                    if (best < 0) {
                        admissible = false;
                        break;
                    }
                }
                if (admissible) marked = true;
            }
            if (marked) r.gamma[size_t(j) * res + i] = 1;
        }
    }

    // complement components: flood fill non-gamma cells, 4-connectivity
    r.label.assign(size_t(res) * res, -1);
    int next = 0;
    std::vector<std::pair<int, int>> stack;
    for (int j0 = 0; j0 < res; ++j0) {
        for (int i0 = 0; i0 < res; ++i0) {
            if (r.is_gamma(i0, j0) || r.label_at(i0, j0) >= 0) continue;
            int lbl = next++;
            stack.push_back({i0, j0});
            r.label[size_t(j0) * res + i0] = lbl;
            while (!stack.empty()) {
                auto [i, j] = stack.back();
                stack.pop_back();
                const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
                for (int q = 0; q < 4; ++q) {
                    int ii = i + di[q], jj = j + dj[q];
                    if (!r.in_grid(ii, jj) || r.is_gamma(ii, jj)) continue;
                    if (r.label[size_t(jj) * res + ii] >= 0) continue;
                    r.label[size_t(jj) * res + ii] = lbl;
                    stack.push_back({ii, jj});
                }
            }
        }
    }
    r.k = next;

    // the unbounded component touches the frame
    std::set<int32_t> frame_labels;
    for (int i = 0; i < res; ++i) {
        for (auto [a, b] : {std::pair{i, 0}, {i, res - 1}, {0, i}, {res - 1, i}}) {
            int32_t l = r.label_at(a, b);
            if (l >= 0) frame_labels.insert(l);
        }
    }
    if (frame_labels.size() == 1) r.unbounded_label = *frame_labels.begin();

    // gamma connectivity, 8-connectivity
    {
        std::vector<int32_t> glabel(size_t(res) * res, -1);
        int gnext = 0;
        for (int j0 = 0; j0 < res; ++j0)
            for (int i0 = 0; i0 < res; ++i0) {
                if (!r.is_gamma(i0, j0) || glabel[size_t(j0) * res + i0] >= 0) continue;
                int lbl = gnext++;
                stack.push_back({i0, j0});
                glabel[size_t(j0) * res + i0] = lbl;
                while (!stack.empty()) {
                    auto [i, j] = stack.back();
                    stack.pop_back();
                    for (int dj = -1; dj <= 1; ++dj)
                        for (int di = -1; di <= 1; ++di) {
                            int ii = i + di, jj = j + dj;
                            if (!r.in_grid(ii, jj) || !r.is_gamma(ii, jj)) continue;
                            if (glabel[size_t(jj) * res + ii] >= 0) continue;
                            glabel[size_t(jj) * res + ii] = lbl;
                            stack.push_back({ii, jj});
                        }
                }
            }
        r.gamma_components = gnext;
    }
    return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Isolated (dimension-zero) pieces

/// Isolated real zeros of f_gamma that belong to the set: singular candidates
/// whose probe circle avoids the curve entirely.
inline std::vector<P2> isolated_gamma_points(const SemialgSpec& spec, const Box& box) {
    std::vector<P2> out;
    auto sing = curve_singular_points(spec.f_gamma(), box);
    const DFun2& f = spec.f_gamma_fun();
    for (auto a : sing) {
        double rho = 1e-3 * box.diag();
        for (auto b : sing)
            if (dist(a, b) > 0) rho = std::min(rho, dist(a, b) / 2);
        bool isolated = true;
        for (int s = 0; s < 360; ++s) {
            double th = 2 * M_PI * s / 360;
            P2 p = a + rho * P2{std::cos(th), std::sin(th)};
            if (std::abs(f.value(p)) <= 1e-7 * std::max(f.f.mag(p), 1e-300)) {
                isolated = false;
                break;
            }
        }
        if (isolated && spec.member_approx(a, 1e-7, 1e-8 * box.diag()) == Membership::IN_GAMMA) out.push_back(a);
    }
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

// ---------------------------------------------------------------------------
// Region decomposition

struct RegionDecomposition {
    Box box;
    GammaRaster raster;  // finest validated raster
    int k = 0;
    std::vector<P2> isolated;
    struct Edge {
        int a = 0, b = 0;
        std::vector<P2> witnesses;  // lex-sorted boundary-run midpoints
    };
    std::vector<Edge> edges;
};

/// Flood-fill decomposition of the complement, validated by one resolution
/// doubling (a second doubling is attempted before giving up).
inline RegionDecomposition decompose_complement(const SemialgSpec& spec, const Box& box, int resolution) {
    if (resolution < 64) throw std::invalid_argument("decompose_complement: resolution must be >= 64");
    RegionDecomposition d;
    d.box = box;
    d.isolated = isolated_gamma_points(spec, box);

    GammaRaster base = detail::rasterize(spec, box, resolution);
    GammaRaster fine = detail::rasterize(spec, box, resolution * 2);
    if (base.k != fine.k || base.gamma_components != fine.gamma_components) {
        GammaRaster finer = detail::rasterize(spec, box, resolution * 4);
        if (fine.k != finer.k || fine.gamma_components != finer.gamma_components)
            throw UnresolvedError("decompose_complement: component counts disagree across resolutions");
        fine = std::move(finer);
    }
    d.k = fine.k;
    d.raster = std::move(fine);

    // adjacency with witness midpoints: maximal gamma runs flanked by two
    // distinct labels, scanned along rows and columns
    std::map<std::pair<int, int>, std::vector<P2>> witnesses;
    const GammaRaster& r = d.raster;
    auto scan = [&](bool rows) {
        for (int a = 0; a < r.res; ++a) {
            int b = 0;
            while (b < r.res) {
                auto lbl = [&](int t) { return rows ? r.label_at(t, a) : r.label_at(a, t); };
                auto gam = [&](int t) { return rows ? r.is_gamma(t, a) : r.is_gamma(a, t); };
                if (!gam(b)) {
                    ++b;
                    continue;
                }
                int run0 = b;
                while (b < r.res && gam(b)) ++b;
                if (run0 == 0 || b >= r.res) continue;
                int32_t l0 = lbl(run0 - 1), l1 = lbl(b);
                if (l0 < 0 || l1 < 0 || l0 == l1) continue;
                double mid = (run0 + b - 1) / 2.0 + 0.5;
                P2 w = rows ? P2{box.xmin + mid * r.cw(), box.ymin + (a + 0.5) * r.ch()}
                            : P2{box.xmin + (a + 0.5) * r.cw(), box.ymin + mid * r.ch()};
                witnesses[{std::min(l0, l1), std::max(l0, l1)}].push_back(w);
            }
        }
    };
    scan(true);
    scan(false);
    for (auto& [pair, ws] : witnesses) {
        std::sort(ws.begin(), ws.end(), lex_less);
        d.edges.push_back({pair.first, pair.second, std::move(ws)});
    }
    return d;
}

// ---------------------------------------------------------------------------
// Special points

struct NgPoint {
    P2 pt;
    int n = 0;                 // branches of the algebraic set leaving the set
    std::vector<V2> out_dirs;  // unit directions of those branches
    double rho = 0;            // probe radius certified for the branch count
};

struct SpecialPoints {
    std::vector<P2> gen;
    std::vector<NgPoint> ng;
    std::vector<P2> isolated;
    double delta = 0;  // probe distance used
    int n_gamma() const {
        int n = 0;
        for (auto& e : ng) n += e.n;
        return n;
    }
};

namespace detail {

struct BranchProbe {
    std::vector<P2> crossings;
    std::vector<bool> in_gamma;
    bool ok = false;
};

/// Crossings of the algebraic curve with the circle of radius rho around a,
/// each membership-classified. Fails (ok=false) when a tangency or a fragile
/// constraint margin demands a smaller radius.
inline BranchProbe probe_circle(const SemialgSpec& spec, P2 a, double rho, double geo) {
    const DFun2& f = spec.f_gamma_fun();
    const int M = 720;
    BranchProbe out;
    std::vector<double> vals(M);
    for (int s = 0; s < M; ++s) {
        double th = 2 * M_PI * s / M;
        vals[size_t(s)] = f.value(a + rho * P2{std::cos(th), std::sin(th)});
    }
    auto at = [&](double th) { return f.value(a + rho * P2{std::cos(th), std::sin(th)}); };
    for (int s = 0; s < M; ++s) {
        double v0 = vals[size_t(s)], v1 = vals[size_t((s + 1) % M)];
        double t0 = 2 * M_PI * s / M, t1 = 2 * M_PI * (s + 1) / M;
        P2 p0 = a + rho * P2{std::cos(t0), std::sin(t0)};
        double m0 = std::max(f.f.mag(p0), 1e-300);
        bool z0 = std::abs(v0) <= 1e-11 * m0;
        if (z0) {
            // curve passes through a sample: take it as a crossing directly
            out.crossings.push_back(p0);
            continue;
        }
        if ((v0 > 0) == (v1 > 0)) continue;
        // bisect the angle
        for (int it = 0; it < 80 && t1 - t0 > 1e-14; ++it) {
            double tm = (t0 + t1) / 2;
            double vm = at(tm);
            if ((vm > 0) == (v0 > 0)) {
                t0 = tm;
                v0 = vm;
            } else {
                t1 = tm;
            }
        }
        out.crossings.push_back(a + rho * P2{std::cos((t0 + t1) / 2), std::sin((t0 + t1) / 2)});
    }
    // tangency suspicion: near-zero local minima without sign change
    for (int s = 0; s < M; ++s) {
        double vp = vals[size_t((s + M - 1) % M)], v = vals[size_t(s)], vn = vals[size_t((s + 1) % M)];
        if ((v > 0) != (vp > 0) || (v > 0) != (vn > 0)) continue;
        if (std::abs(v) > std::abs(vp) || std::abs(v) > std::abs(vn)) continue;
        double th = 2 * M_PI * s / M;
        P2 p = a + rho * P2{std::cos(th), std::sin(th)};
        double m = std::max(f.f.mag(p), 1e-300);
        if (std::abs(v) <= 1e-11 * m) continue;  // handled as a crossing above
        if (std::abs(v) <= 1e-6 * m) return out;  // ok stays false: shrink
    }
    // membership with fragility detection: margins are in units of the
    // zero-test threshold, so ~1 means "on a boundary" (stable) and the
    // mid-range means "undecided at this radius"
    for (auto c : out.crossings) {
        double margin = 0;
        Membership m = spec.member_approx(c, 1e-7, geo, &margin);
        if (margin > 3 && margin < 100) return out;  // genuinely borderline: shrink
        out.in_gamma.push_back(m == Membership::IN_GAMMA);
    }
    out.ok = true;
    return out;
}

}  // namespace detail

/// Classifies every candidate special point of the set: constraint-boundary
/// activations and curve singularities, sorted through the local branch test.
inline SpecialPoints classify_special_points(const SemialgSpec& spec, const Box& box) {
    SpecialPoints sp;
    sp.delta = 1e-3 * box.diag();
    double tol = 1e-10 * box.diag();
    const Poly& f = spec.f_gamma();

    std::vector<P2> cands;
    for (auto& cl : spec.clauses()) {
        for (auto& g : cl.constraints) {
            if (g.g.is_constant()) continue;
            Poly d = poly_gcd(f, g.g);
            Poly fpart = f;
            if (!d.is_constant()) {
                auto q = Poly::exact_div(f, d);
                if (!q || q->is_constant()) continue;  // boundary contains whole components
                fpart = *q;
            }
            if (poly_gcd(fpart, g.g).is_constant()) {
                for (auto z : solve_system(fpart, g.g, box, tol)) cands.push_back(z);
            }
        }
    }
    for (auto z : curve_singular_points(f, box, tol)) cands.push_back(z);

    std::sort(cands.begin(), cands.end(), lex_less);
    std::vector<P2> merged;
    for (auto c : cands) {
        bool dup = false;
        for (auto o : merged)
            if (dist(c, o) < 1e-7 * box.diag()) dup = true;
        if (!dup) merged.push_back(c);
    }

    const DFun2& df = spec.f_gamma_fun();
    const double geo = 1e-8 * box.diag();
    for (auto a : merged) {
        if (spec.member_approx(a, 1e-7, geo) != Membership::IN_GAMMA) continue;
        double rho = sp.delta;
        for (auto o : merged)
            if (dist(a, o) > 0) rho = std::min(rho, dist(a, o) / 2);

        detail::BranchProbe probe;
        bool stable = false;
        for (int depth = 0; depth < 24 && !stable; ++depth) {
            probe = detail::probe_circle(spec, a, rho, geo);
            if (!probe.ok) {
                rho /= 2;
                continue;
            }
            auto recount = detail::probe_circle(spec, a, rho / 2, geo);
            if (recount.ok && recount.crossings.size() == probe.crossings.size()) {
                stable = true;
            } else {
                rho /= 2;
            }
        }
        if (!stable)
            throw UnresolvedError("classify_special_points: branch structure unresolved at probe depth cap");

        size_t n_branches = probe.crossings.size();
        size_t n_out = 0;
        std::vector<V2> out_dirs;
        for (size_t q = 0; q < n_branches; ++q) {
            if (!probe.in_gamma[q]) {
                ++n_out;
                out_dirs.push_back((probe.crossings[q] - a).unit());
            }
        }
        if (n_branches == 0) {
            sp.isolated.push_back(a);
            continue;
        }
        if (n_out == 0) continue;  // algebraic point
        if (n_out == n_branches)
            throw HypothesisError(
                "classify_special_points: isolated singleton component of the set (no branch stays inside)");
        double grad = df.grad(a).norm();
        double scale = std::max(df.grad_mag_scale(a), 1e-300);
        if (grad >= 1e-6 * scale) {
            sp.gen.push_back(a);
        } else {
            sp.ng.push_back({a, int(n_out), out_dirs, rho});
        }
    }
    return sp;
}

// ---------------------------------------------------------------------------
// Transition points

/// True iff removing small disks at the given points keeps the rasterized set
/// as connected as before while letting all complement components merge into
/// one; checked at two resolutions.
inline bool validate_transition_set(const SemialgSpec& spec, const RegionDecomposition& decomp,
                                    const std::vector<RatP2>& tr) {
    for (int pass = 0; pass < 2; ++pass) {
        int res = pass == 0 ? decomp.raster.res : decomp.raster.res / 2;
        GammaRaster r = pass == 0 ? decomp.raster : detail::rasterize(spec, decomp.box, res);
        double hole = 3.0 * std::max(r.cw(), r.ch());

        auto in_hole = [&](int i, int j) {
            P2 c = r.cell_center(i, j);
            for (auto& t : tr)
                if (dist(c, t.approx()) <= hole) return true;
            return false;
        };

        // (i) component count of gamma minus holes must not grow
        int before = r.gamma_components;
        {
            std::vector<int32_t> lab(size_t(res) * res, -1);
            int next = 0;
            std::vector<std::pair<int, int>> stack;
            for (int j0 = 0; j0 < res; ++j0)
                for (int i0 = 0; i0 < res; ++i0) {
                    if (!r.is_gamma(i0, j0) || in_hole(i0, j0) || lab[size_t(j0) * res + i0] >= 0) continue;
                    ++next;
                    stack.push_back({i0, j0});
                    lab[size_t(j0) * res + i0] = next;
                    while (!stack.empty()) {
                        auto [i, j] = stack.back();
                        stack.pop_back();
                        for (int dj = -1; dj <= 1; ++dj)
                            for (int di = -1; di <= 1; ++di) {
                                int ii = i + di, jj = j + dj;
                                if (!r.in_grid(ii, jj) || !r.is_gamma(ii, jj) || in_hole(ii, jj)) continue;
                                if (lab[size_t(jj) * res + ii] >= 0) continue;
                                lab[size_t(jj) * res + ii] = next;
                                stack.push_back({ii, jj});
                            }
                    }
                }
            if (next > before) return false;
        }

        // (ii) complement with the holes opened must be a single component
        {
            std::vector<int32_t> lab(size_t(res) * res, -1);
            int next = 0;
            std::vector<std::pair<int, int>> stack;
            for (int j0 = 0; j0 < res; ++j0)
                for (int i0 = 0; i0 < res; ++i0) {
                    bool open = !r.is_gamma(i0, j0) || in_hole(i0, j0);
                    if (!open || lab[size_t(j0) * res + i0] >= 0) continue;
                    ++next;
                    stack.push_back({i0, j0});
                    lab[size_t(j0) * res + i0] = next;
                    while (!stack.empty()) {
                        auto [i, j] = stack.back();
                        stack.pop_back();
                        const int di4[4] = {1, -1, 0, 0}, dj4[4] = {0, 0, 1, -1};
                        for (int q = 0; q < 4; ++q) {
                            int ii = i + di4[q], jj = j + dj4[q];
                            bool op = r.in_grid(ii, jj) && (!r.is_gamma(ii, jj) || in_hole(ii, jj));
                            if (!op) continue;
                            if (lab[size_t(jj) * res + ii] >= 0) continue;
                            lab[size_t(jj) * res + ii] = next;
                            stack.push_back({ii, jj});
                        }
                    }
                }
            if (next != 1) return false;
        }
    }
    return true;
}

/// Minimal transition set: one regular point of the set per spanning-tree
/// edge of the component adjacency graph, snapped onto the curve, kept away
/// from the special points, and validated as a whole.
inline std::vector<RatP2> choose_transition_points(const SemialgSpec& spec, const RegionDecomposition& decomp,
                                                   const SpecialPoints& special) {
    if (decomp.k <= 1) return {};

    // deterministic spanning tree (Kruskal over lex-sorted edges)
    std::vector<int> parent(size_t(decomp.k));
    for (int i = 0; i < decomp.k; ++i) parent[size_t(i)] = i;
    std::function<int(int)> find = [&](int x) { return parent[size_t(x)] == x ? x : parent[size_t(x)] = find(parent[size_t(x)]); };
    std::vector<const RegionDecomposition::Edge*> tree;
    for (auto& e : decomp.edges) {
        int ra = find(e.a), rb = find(e.b);
        if (ra == rb) continue;
        parent[size_t(ra)] = rb;
        tree.push_back(&e);
    }
    if (int(tree.size()) != decomp.k - 1)
        throw TopologyError("choose_transition_points: component adjacency graph is not connected");

    const DFun2& df = spec.f_gamma_fun();
    double cell = std::max(decomp.raster.cw(), decomp.raster.ch());
    auto snap_candidate = [&](P2 w) -> std::optional<RatP2> {
        bool ok = false;
        P2 s = newton_to_curve(df, w, 3 * cell, 1e-12, &ok);
        if (!ok) return std::nullopt;
        double grad = df.grad(s).norm();
        if (grad < 1e-6 * std::max(df.grad_mag_scale(s), 1e-300)) return std::nullopt;
        if (spec.member_approx(s, 1e-7, 1e-8 * decomp.box.diag()) != Membership::IN_GAMMA) return std::nullopt;
        for (auto g : special.gen)
            if (dist(s, g) < special.delta) return std::nullopt;
        for (auto& n : special.ng)
            if (dist(s, n.pt) < special.delta) return std::nullopt;
        RatP2 snapped{snap_rational(s.x, 1e-9), snap_rational(s.y, 1e-9)};
        // keep the snapped point honestly on the curve
        P2 sp2 = snapped.approx();
        double snap_thresh = 1e-7 * std::max(df.f.mag(sp2), 1e-300) + 1e-8 * decomp.box.diag() * df.grad(sp2).norm();
        if (std::abs(df.value(sp2)) > snap_thresh) snapped = {rat_from_double(s.x), rat_from_double(s.y)};
        return snapped;
    };

    // per-edge candidate lists: the middle of the shared boundary arc first
    // (witnesses are lex-sorted along it), then spreading outward
    std::vector<std::vector<RatP2>> options(tree.size());
    for (size_t e = 0; e < tree.size(); ++e) {
        const auto& ws = tree[e]->witnesses;
        const double offsets[] = {0.5, 0.375, 0.625, 0.25, 0.75, 0.125, 0.875, 0.0625, 0.9375};
        for (double off : offsets) {
            size_t at = std::min(ws.size() - 1, size_t(off * double(ws.size())));
            if (auto s = snap_candidate(ws[at])) {
                bool dup = false;
                for (auto& o : options[e])
                    if (dist(o.approx(), s->approx()) < special.delta) dup = true;
                if (!dup) options[e].push_back(*s);
            }
            if (options[e].size() >= 4) break;
        }
        if (options[e].empty())
            throw TopologyError("choose_transition_points: no regular snap point on a needed shared boundary");
    }

    // odometer over candidate combinations, first validating set wins
    std::vector<size_t> idx(tree.size(), 0);
    for (int combo = 0; combo < 64; ++combo) {
        std::vector<RatP2> pick;
        for (size_t e = 0; e < tree.size(); ++e) pick.push_back(options[e][idx[e]]);
        bool separated = true;
        for (size_t i = 0; i < pick.size() && separated; ++i)
            for (size_t j = i + 1; j < pick.size(); ++j)
                if (dist(pick[i].approx(), pick[j].approx()) < special.delta) separated = false;
        if (separated && validate_transition_set(spec, decomp, pick)) return pick;
        // advance odometer
        size_t e = 0;
        while (e < idx.size()) {
            if (++idx[e] < options[e].size()) break;
            idx[e] = 0;
            ++e;
        }
        if (e == idx.size()) break;
    }
    throw TopologyError("choose_transition_points: no valid transition set among snap candidates");
}

// ---------------------------------------------------------------------------
// Branch seeds for the non-generic construction

struct BranchArc {
    std::vector<P2> pts;  // from the singular point outward
    P2 seed;              // point at the requested arclength
};

/// Points at arclength 1/i along each branch of the algebraic set that
/// leaves the set at a non-generic point, numerically continued along the
/// curve. Arclength is measured along the continuation polyline.
inline std::vector<BranchArc> branch_seeds(const SemialgSpec& spec, const NgPoint& ng, int i, const Box& guard) {
    if (i < 1) throw std::invalid_argument("branch_seeds: index must be >= 1");
    const DFun2& f = spec.f_gamma_fun();
    double target = 1.0 / i;
    std::vector<BranchArc> arcs;
    for (auto dir : ng.out_dirs) {
        double r0 = std::min(ng.rho / 2, target / 8);
        // first hop: crossing of the circle of radius r0 nearest to dir
        auto probe = detail::probe_circle(spec, ng.pt, r0, 1e-8 * guard.diag());
        if (!probe.ok || probe.crossings.empty())
            throw TopologyError("branch_seeds: branch lost near the singular point");
        P2 b0;
        double best = -2;
        for (auto c : probe.crossings) {
            double d = (c - ng.pt).unit().dot(dir);
            if (d > best) {
                best = d;
                b0 = c;
            }
        }
        if (best < 0.7) throw TopologyError("branch_seeds: branch direction mismatch at first hop");

        BranchArc arc;
        arc.pts = {ng.pt, b0};
        double len = dist(ng.pt, b0);
        P2 x = b0;
        V2 tau = (b0 - ng.pt).unit();
        double step = target / 16;
        int guard_steps = 0;
        while (len < target) {
            if (++guard_steps > 100000) throw TopologyError("branch_seeds: continuation stalled");
            double want = std::min(step, target - len);
            bool advanced = false;
            double s = want;
            while (s >= 1e-12) {
                V2 g = f.grad(x);
                if (g.norm2() <= 1e-300) throw TopologyError("branch_seeds: singular point on branch");
                V2 t = g.perp().unit();
                if (t.dot(tau) < 0) t = -1.0 * t;
                P2 y = x + s * t;
                bool okc = false;
                P2 yc = newton_to_curve(f, y, 0.6 * s, 1e-12, &okc);
                if (!okc) {
                    s /= 2;
                    continue;
                }
                V2 gn = f.grad(yc);
                V2 tn = gn.perp().unit();
                if (tn.dot(t) < 0) tn = -1.0 * tn;
                if (tn.dot(t) < 0.9) {
                    s /= 2;
                    continue;
                }
                if (!guard.contains(yc)) throw TopologyError("branch_seeds: continuation left the working box");
                len += dist(x, yc);
                x = yc;
                tau = tn;
                arc.pts.push_back(x);
                advanced = true;
                break;
            }
            if (!advanced) throw TopologyError("branch_seeds: step underflow (branch collision?)");
        }
        // trim to the exact polyline arclength, then snap back to the curve
        double acc = 0;
        for (size_t q = 1; q < arc.pts.size(); ++q) {
            double seg = dist(arc.pts[q - 1], arc.pts[q]);
            if (acc + seg >= target || q + 1 == arc.pts.size()) {
                double t = seg > 0 ? std::clamp((target - acc) / seg, 0.0, 1.0) : 0.0;
                P2 lerp = arc.pts[q - 1] + t * (arc.pts[q] - arc.pts[q - 1]);
                arc.pts.resize(q + 1);
                arc.pts[q] = newton_to_curve(f, lerp, target / 8, 1e-13);
                break;
            }
            acc += seg;
        }
        arc.seed = arc.pts.back();
        arcs.push_back(std::move(arc));
    }
    return arcs;
}

}  // namespace limpet
