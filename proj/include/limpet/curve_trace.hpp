#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "limpet/dpoly.hpp"
#include "limpet/geometry.hpp"

namespace limpet {

// ---------------------------------------------------------------------------
// Newton refinement transverse to the curve

/// Moves pt onto f = 0 along the gradient. Returns the best point found;
/// *ok reports whether |f| <= rel * local magnitude was reached within
/// max_move of the start.
inline P2 newton_to_curve(const DFun2& f, P2 pt, double max_move, double rel, bool* ok = nullptr) {
    P2 x = pt;
    P2 best = pt;
    double best_res = std::abs(f.value(pt)) / std::max(f.f.mag(pt), 1e-300);
    for (int it = 0; it < 60; ++it) {
        double v = f.value(x);
        double m = std::max(f.f.mag(x), 1e-300);
        if (std::abs(v) / m < best_res) {
            best_res = std::abs(v) / m;
            best = x;
        }
        if (std::abs(v) <= rel * m) break;
        V2 g = f.grad(x);
        double g2 = g.norm2();
        if (g2 <= 1e-300) break;
        P2 step = (-v / g2) * g;
        double cap = max_move / 4;
        if (step.norm() > cap) step = (cap / step.norm()) * step;
        P2 xn = x + step;
        if (dist(xn, pt) > max_move) break;
        x = xn;
    }
    if (ok) *ok = best_res <= rel;
    return best;
}

// ---------------------------------------------------------------------------
// Predictor-corrector continuation along f = 0

struct ContinuationControl {
    double step0 = 1e-2;
    double min_step = 1e-12;
    double max_step = 1e-1;
    double max_arclen = 1e9;
    double corrector_rel = 1e-12;
    double turn_cos = 0.9;  // max tangent rotation per step
};

/// Follows the implicit curve from a point assumed on it, orienting the first
/// tangent by dir0. visit(pt, arclen) is called after every accepted step and
/// returns true to stop (counts as success). Returns false on failure: step
/// underflow at a singular/tight spot, guard-box exit, or arclength budget.
inline bool continue_on_curve(const DFun2& f, P2 start, V2 dir0, const Box& guard,
                              const ContinuationControl& ctl,
                              const std::function<bool(P2, double)>& visit) {
    P2 x = start;
    V2 g = f.grad(x);
    if (g.norm2() <= 1e-300) return false;
    V2 tau = g.perp().unit();
    if (tau.dot(dir0) < 0) tau = -1.0 * tau;
    double s = ctl.step0;
    double arclen = 0;
    int easy = 0;
    while (arclen < ctl.max_arclen) {
        bool accepted = false;
        while (s >= ctl.min_step) {
            P2 y = x + s * tau;
            // corrector
            bool okc = false;
            P2 yc = newton_to_curve(f, y, 0.6 * s, ctl.corrector_rel, &okc);
            if (!okc) {
                s *= 0.5;
                easy = 0;
                continue;
            }
            V2 gn = f.grad(yc);
            if (gn.norm2() <= 1e-300) {
                s *= 0.5;
                easy = 0;
                continue;
            }
            V2 tn = gn.perp().unit();
            if (tn.dot(tau) < 0) tn = -1.0 * tn;
            if (tn.dot(tau) < ctl.turn_cos) {
                s *= 0.5;
                easy = 0;
                continue;
            }
            if (!guard.contains(yc)) return false;
            arclen += dist(x, yc);
            x = yc;
            tau = tn;
            accepted = true;
            break;
        }
        if (!accepted) return false;
        if (visit(x, arclen)) return true;
        if (++easy >= 2) {
            s = std::min(s * 1.5, ctl.max_step);
            easy = 0;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Marching squares

struct TracedCurve {
    std::vector<P2> pts;
    bool closed = false;
};

namespace detail {

struct MarchGrid {
    Box box;
    int n;  // cells per axis
    double dx, dy;
    std::vector<double> corner;  // (n+1)^2 values

    double at(int i, int j) const { return corner[size_t(j) * (n + 1) + i]; }
    P2 pt(int i, int j) const { return {box.xmin + i * dx, box.ymin + j * dy}; }
};

inline MarchGrid eval_grid(const DPoly2& f, const Box& box, int n) {
    MarchGrid g;
    g.box = box;
    g.n = n;
    g.dx = box.width() / n;
    g.dy = box.height() / n;
    g.corner.resize(size_t(n + 1) * (n + 1));
    std::vector<double> coeffs;
    for (int j = 0; j <= n; ++j) {
        f.row(box.ymin + j * g.dy, coeffs);
        for (int i = 0; i <= n; ++i) g.corner[size_t(j) * (n + 1) + i] = DPoly2::horner(coeffs, box.xmin + i * g.dx);
    }
    return g;
}

// edge ids: 2*(j*(n+1)+i) for the horizontal edge from (i,j) to (i+1,j),
// +1 for the vertical edge from (i,j) to (i,j+1)
inline int64_t hedge(int i, int j, int n) { return 2 * (int64_t(j) * (n + 1) + i); }
inline int64_t vedge(int i, int j, int n) { return 2 * (int64_t(j) * (n + 1) + i) + 1; }

}  // namespace detail

/// Extracts the zero set of f on a regular grid: per-cell segments from
/// linearly interpolated edge crossings, saddle cells resolved by the sign of
/// the cell-center value, segments linked into polylines through shared edge
/// vertices. Vertices are then Newton-refined onto the curve.
inline std::vector<TracedCurve> trace_implicit(const DFun2& f, const Box& box, int resolution,
                                               double refine_rel = 1e-12) {
    auto grid = detail::eval_grid(f.f, box, resolution);
    const int n = resolution;
    auto pos = [](double v) { return v > 0; };

    std::map<int64_t, P2> verts;
    std::vector<std::pair<int64_t, int64_t>> segs;

    auto edge_vertex = [&](int64_t id, P2 a, P2 b, double va, double vb) {
        auto it = verts.find(id);
        if (it != verts.end()) return;
        double t = va / (va - vb);
        t = std::clamp(t, 0.0, 1.0);
        verts.emplace(id, a + t * (b - a));
    };

    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            double v00 = grid.at(i, j), v10 = grid.at(i + 1, j);
            double v11 = grid.at(i + 1, j + 1), v01 = grid.at(i, j + 1);
            int mask = (pos(v00) ? 1 : 0) | (pos(v10) ? 2 : 0) | (pos(v11) ? 4 : 0) | (pos(v01) ? 8 : 0);
            if (mask == 0 || mask == 15) continue;
            P2 p00 = grid.pt(i, j), p10 = grid.pt(i + 1, j), p11 = grid.pt(i + 1, j + 1), p01 = grid.pt(i, j + 1);
            int64_t eb = detail::hedge(i, j, n), et = detail::hedge(i, j + 1, n);
            int64_t el = detail::vedge(i, j, n), er = detail::vedge(i + 1, j, n);
            auto mkb = [&] { edge_vertex(eb, p00, p10, v00, v10); };
            auto mkt = [&] { edge_vertex(et, p01, p11, v01, v11); };
            auto mkl = [&] { edge_vertex(el, p00, p01, v00, v01); };
            auto mkr = [&] { edge_vertex(er, p10, p11, v10, v11); };
            auto add = [&](int64_t a, int64_t b) { segs.emplace_back(a, b); };
            switch (mask) {
                case 1: case 14: mkb(); mkl(); add(eb, el); break;
                case 2: case 13: mkb(); mkr(); add(eb, er); break;
                case 4: case 11: mkt(); mkr(); add(et, er); break;
                case 8: case 7: mkt(); mkl(); add(et, el); break;
                case 3: case 12: mkl(); mkr(); add(el, er); break;
                case 6: case 9: mkb(); mkt(); add(eb, et); break;
                case 5: case 10: {
                    mkb(); mkt(); mkl(); mkr();
                    double vc = f.value({p00.x + grid.dx / 2, p00.y + grid.dy / 2});
                    bool c = pos(vc);
                    bool corner0 = (mask == 5);
                    // mask 5: corners 00 and 11 positive; mask 10: corners 10 and 01
                    if (c == corner0) {
                        add(el, et);
                        add(eb, er);
                    } else {
                        add(el, eb);
                        add(et, er);
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // link: each edge vertex touches at most two segments
    std::map<int64_t, std::vector<size_t>> incident;
    for (size_t k = 0; k < segs.size(); ++k) {
        incident[segs[k].first].push_back(k);
        incident[segs[k].second].push_back(k);
    }
    std::vector<bool> used(segs.size(), false);
    std::vector<TracedCurve> curves;

    auto walk = [&](int64_t start_vertex, size_t start_seg) {
        TracedCurve c;
        int64_t v = start_vertex;
        size_t s = start_seg;
        c.pts.push_back(verts.at(v));
        while (true) {
            used[s] = true;
            int64_t w = (segs[s].first == v) ? segs[s].second : segs[s].first;
            c.pts.push_back(verts.at(w));
            const auto& inc = incident[w];
            size_t next = SIZE_MAX;
            for (size_t k : inc)
                if (!used[k]) next = k;
            if (next == SIZE_MAX) {
                c.closed = (w == start_vertex);
                if (c.closed) c.pts.pop_back();
                break;
            }
            v = w;
            s = next;
        }
        return c;
    };

    // open chains first (endpoints have a single incident segment)
    for (auto& [v, inc] : incident) {
        if (inc.size() != 1) continue;
        if (!used[inc[0]]) curves.push_back(walk(v, inc[0]));
    }
    // remaining are loops
    for (size_t k = 0; k < segs.size(); ++k) {
        if (used[k]) continue;
        curves.push_back(walk(segs[k].first, k));
    }

    // refine vertices onto the curve
    double cell = std::max(grid.dx, grid.dy);
    for (auto& c : curves)
        for (auto& p : c.pts) p = newton_to_curve(f, p, 0.9 * cell, refine_rel);
    return curves;
}

/// Joins open chains whose gap the raster missed (pinches thinner than a
/// cell) by continuation along the curve from each loose endpoint. Chains
/// whose two ends meet become closed.
inline void weld_gaps(std::vector<TracedCurve>& curves, const DFun2& f, const Box& box, int resolution,
                      double min_feature) {
    double cell = std::max(box.width(), box.height()) / resolution;
    ContinuationControl ctl;
    ctl.step0 = cell / 4;
    ctl.max_step = cell;
    ctl.min_step = std::max(min_feature / 64, 1e-14);
    ctl.max_arclen = 24 * cell;

    struct End {
        size_t curve;
        bool at_back;
    };
    auto endpoints = [&]() {
        std::vector<End> es;
        for (size_t k = 0; k < curves.size(); ++k) {
            if (curves[k].closed || curves[k].pts.size() < 2) continue;
            es.push_back({k, false});
            es.push_back({k, true});
        }
        return es;
    };
    auto pt_of = [&](End e) { return e.at_back ? curves[e.curve].pts.back() : curves[e.curve].pts.front(); };
    auto dir_of = [&](End e) {
        auto& ps = curves[e.curve].pts;
        P2 a = e.at_back ? ps[ps.size() - 2] : ps[1];
        P2 b = pt_of(e);
        return (b - a).unit();
    };

    // near-frame endpoints are genuine box exits, not gaps
    auto near_frame = [&](P2 p) {
        return p.x < box.xmin + 1.5 * cell || p.x > box.xmax - 1.5 * cell || p.y < box.ymin + 1.5 * cell ||
               p.y > box.ymax - 1.5 * cell;
    };

    for (int round = 0; round < 64; ++round) {
        auto es = endpoints();
        bool progressed = false;
        for (auto e : es) {
            if (curves[e.curve].closed || curves[e.curve].pts.size() < 2) continue;
            P2 start = pt_of(e);
            if (near_frame(start)) continue;
            std::vector<P2> path;
            End hit{SIZE_MAX, false};
            auto stop = [&](P2 p, double) {
                for (auto o : endpoints()) {
                    if (o.curve == e.curve && o.at_back == e.at_back) continue;
                    if (dist(p, pt_of(o)) < 0.8 * cell) {
                        hit = o;
                        return true;
                    }
                }
                path.push_back(p);
                return false;
            };
            if (!continue_on_curve(f, start, dir_of(e), box.inflated(0.02), ctl, stop)) continue;
            if (hit.curve == SIZE_MAX) continue;
            // splice: bring e's curve so that its joining end is the back
            auto& src = curves[e.curve];
            if (!e.at_back) std::reverse(src.pts.begin(), src.pts.end());
            src.pts.insert(src.pts.end(), path.begin(), path.end());
            if (hit.curve == e.curve) {
                src.closed = true;
            } else {
                auto& dst = curves[hit.curve];
                if (hit.at_back) std::reverse(dst.pts.begin(), dst.pts.end());
                src.pts.insert(src.pts.end(), dst.pts.begin(), dst.pts.end());
                dst.pts.clear();
            }
            progressed = true;
            break;  // endpoint list changed; restart scan
        }
        if (!progressed) break;
    }
    std::erase_if(curves, [](const TracedCurve& c) { return c.pts.size() < 2; });
}

}  // namespace limpet
