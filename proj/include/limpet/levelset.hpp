#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "limpet/curve_trace.hpp"
#include "limpet/dpoly.hpp"
#include "limpet/geometry.hpp"
#include "limpet/semialg.hpp"
#include "limpet/solve2d.hpp"
#include "limpet/topology.hpp"

namespace limpet {

struct LevelsetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoCycleError : LevelsetError {
    using LevelsetError::LevelsetError;
};
struct NgViolationError : LevelsetError {
    using LevelsetError::LevelsetError;
};
struct ScheduleExhaustedError : LevelsetError {
    using LevelsetError::LevelsetError;
};

// ---------------------------------------------------------------------------
// Level curves

struct LevelCurve {
    double t = 0;
    std::vector<P2> pts;
    bool closed = false;
    double regularity_margin = 0;  // min |grad h| over vertices
    double grad_scale = 0;         // max pointwise magnitude of the gradient
    double residual = 0;           // max |h| over vertices
    double scale = 0;              // max pointwise magnitude of h
    double spacing_max = 0;

    PointSet as_pointset() const { return PointSet::of({pts, closed}); }
};

namespace detail {

inline void decorate(LevelCurve& c, const DFun2& f) {
    c.regularity_margin = 1e300;
    c.grad_scale = 0;
    c.residual = 0;
    c.scale = 0;
    c.spacing_max = 0;
    for (size_t i = 0; i < c.pts.size(); ++i) {
        P2 p = c.pts[i];
        c.regularity_margin = std::min(c.regularity_margin, f.grad(p).norm());
        c.grad_scale = std::max(c.grad_scale, f.grad_mag_scale(p));
        c.residual = std::max(c.residual, std::abs(f.value(p)));
        c.scale = std::max(c.scale, f.f.mag(p));
        if (i > 0) c.spacing_max = std::max(c.spacing_max, dist(c.pts[i - 1], c.pts[i]));
    }
    if (c.closed && c.pts.size() > 1) c.spacing_max = std::max(c.spacing_max, dist(c.pts.back(), c.pts.front()));
}

inline std::vector<LevelCurve> trace_decorated(const DFun2& f, const Box& box, int resolution, double t,
                                               double min_feature) {
    auto raw = trace_implicit(f, box, resolution, 1e-12);
    weld_gaps(raw, f, box, resolution, min_feature);
    double cell = std::max(box.width(), box.height()) / resolution;
    std::vector<LevelCurve> out;
    for (auto& r : raw) {
        if (r.pts.size() < 8) continue;
        LevelCurve c;
        c.t = t;
        c.pts = std::move(r.pts);
        c.closed = r.closed;
        if (!c.closed && dist(c.pts.front(), c.pts.back()) <= 3 * cell) c.closed = true;
        decorate(c, f);
        out.push_back(std::move(c));
    }
    // deterministic order: by leading vertex
    std::sort(out.begin(), out.end(),
              [](const LevelCurve& a, const LevelCurve& b) { return lex_less(a.pts.front(), b.pts.front()); });
    return out;
}

}  // namespace detail

/// Marching-squares extraction of h(., t) = 0 with Newton-refined vertices.
/// Sub-cell pinch gaps are closed by continuation; if the type invariants
/// (weld, residual, spacing) fail, the grid is refined once and offenders
/// are re-traced.
inline std::vector<LevelCurve> trace_level(const Poly& h, double t, const Box& box, int resolution) {
    if (resolution < 128) throw std::invalid_argument("trace_level: resolution must be >= 128");
    Poly ht = h.subst(VL, rat_from_double(t));
    DFun2 f = DFun2::from(ht);
    double min_feature = std::max(std::abs(t) / 4, 1e-12);
    auto curves = detail::trace_decorated(f, box, resolution, t, min_feature);

    auto ok = [&](const LevelCurve& c) {
        double spacing_target = 2 * box.diag() / resolution;
        return c.residual <= 1e-12 * std::max(c.scale, 1e-300) && c.spacing_max <= 2 * spacing_target;
    };
    bool all_ok = true;
    for (auto& c : curves) all_ok = all_ok && ok(c);
    if (!all_ok) {
        curves = detail::trace_decorated(f, box, resolution * 2, t, min_feature);
        std::erase_if(curves, [&](const LevelCurve& c) {
            double spacing_target = 2 * box.diag() / (resolution * 2);
            return !(c.residual <= 1e-12 * std::max(c.scale, 1e-300) && c.spacing_max <= 2 * spacing_target);
        });
    }
    return curves;
}

// ---------------------------------------------------------------------------
// Reference sample of the target set

struct GammaSample {
    std::vector<Polyline> chains;      // pieces of the set itself
    std::vector<Polyline> alg_extra;   // algebraic-set pieces not in the set
    std::vector<P2> isolated;          // dimension-zero pieces

    bool empty() const { return chains.empty() && isolated.empty(); }
    PointSet as_pointset() const {
        PointSet s;
        for (auto& c : chains) s.add_polyline(c);
        for (auto p : isolated) s.add_point(p);
        return s;
    }
};

/// Traced points of the algebraic set filtered by membership; spacing is
/// bounded by the grid cell. Dimension-zero sets fall back to the solver.
inline GammaSample sample_gamma(const SemialgSpec& spec, const Box& box, int resolution) {
    GammaSample out;
    const DFun2& f = spec.f_gamma_fun();
    auto raw = trace_implicit(f, box, resolution, 1e-12);
    double cell = std::max(box.width(), box.height()) / resolution;
    weld_gaps(raw, f, box, resolution, cell / 64);
    const double geo = 1e-8 * box.diag();
    auto flush_runs = [](const std::vector<P2>& pts, const std::vector<uint8_t>& keep, bool closed,
                         std::vector<Polyline>& dest) {
        size_t n = pts.size();
        size_t start = 0;
        if (closed) {
            while (start < n && keep[start]) ++start;  // begin at a dropped vertex
            if (start == n) return;                     // nothing dropped: handled by caller
        }
        std::vector<P2> cur;
        for (size_t k = 0; k <= n; ++k) {
            if (k == n) {
                if (cur.size() >= 2) dest.push_back({cur, false});
                break;
            }
            size_t i = closed ? (start + k) % n : k;
            if (!keep[i]) {
                if (cur.size() >= 2) dest.push_back({cur, false});
                cur.clear();
            } else {
                cur.push_back(pts[i]);
            }
        }
    };
    for (auto& r : raw) {
        if (r.pts.size() < 2) continue;
        std::vector<uint8_t> in(r.pts.size());
        for (size_t i = 0; i < r.pts.size(); ++i)
            in[i] = spec.member_approx(r.pts[i], 1e-7, geo) == Membership::IN_GAMMA;
        bool all_in = std::all_of(in.begin(), in.end(), [](uint8_t b) { return b != 0; });
        if (all_in) {
            out.chains.push_back({r.pts, r.closed});
            continue;
        }
        bool none_in = std::none_of(in.begin(), in.end(), [](uint8_t b) { return b != 0; });
        if (none_in) {
            out.alg_extra.push_back({r.pts, r.closed});
            continue;
        }
        flush_runs(r.pts, in, r.closed, out.chains);
        std::vector<uint8_t> notin(in.size());
        for (size_t i = 0; i < in.size(); ++i) notin[i] = !in[i];
        flush_runs(r.pts, notin, r.closed, out.alg_extra);
    }
    out.isolated = isolated_gamma_points(spec, box);
    if (out.empty()) throw SpecError("sample_gamma: the set has no points in the working box");
    return out;
}

// ---------------------------------------------------------------------------
// Cycle selection and the parameter schedule

/// Among the closed regular curves, the one nearest the reference sample in
/// Hausdorff distance; it must stay farther than the current parameter from
/// every non-generic point.
inline LevelCurve select_cycle(const std::vector<LevelCurve>& curves, const PointSet& gamma_ref,
                               const std::vector<P2>& ng, double closeness, double t) {
    const LevelCurve* best = nullptr;
    double best_d = 1e300;
    SegmentGrid ref_grid(gamma_ref);
    for (auto& c : curves) {
        if (!c.closed) continue;
        if (c.regularity_margin < 1e-8 * std::max(c.grad_scale, 1e-300)) continue;
        PointSet ps = c.as_pointset();
        SegmentGrid cg(ps);
        double d = std::max(directed_hausdorff(ps, ref_grid), directed_hausdorff(gamma_ref, cg));
        if (d < best_d) {
            best_d = d;
            best = &c;
        }
    }
    if (!best || best_d > closeness) throw NoCycleError("select_cycle: no closed regular candidate within range");
    for (auto p : ng) {
        double dmin = 1e300;
        const auto& pts = best->pts;
        for (size_t i = 0; i + 1 < pts.size(); ++i) dmin = std::min(dmin, dist_point_segment(p, pts[i], pts[i + 1]));
        if (best->closed && pts.size() > 2) dmin = std::min(dmin, dist_point_segment(p, pts.back(), pts.front()));
        if (dmin <= t)
            throw NgViolationError("select_cycle: best candidate enters a non-generic ball");
    }
    LevelCurve chosen = *best;
    return chosen;
}

struct ScheduleEntry {
    double t = 0;
    bool certified = false;
    std::string failure;
    LevelCurve curve;
    double hausdorff = 0;
};

struct ScheduleOptions {
    double t0 = 0.1;
    int max_steps = 41;
    double target = 0.15;
    int resolution = 512;
    double closeness = 1e300;
    std::vector<double> explicit_ts;  // when set, exactly these parameters run
    std::vector<P2> ng_points;
};

/// Geometric descent t_j = t0 * 2^-j until the selected oval is certifiably
/// close; returns every attempted parameter with its outcome. The geometric
/// mode stops once at least two parameters certified, the last distance is
/// below target and below the first certified distance.
inline std::vector<ScheduleEntry> lambda_schedule(const Poly& h, const PointSet& gamma_ref, const Box& box,
                                                  const ScheduleOptions& opt) {
    std::vector<ScheduleEntry> out;
    auto run_one = [&](double t) {
        ScheduleEntry e;
        e.t = t;
        try {
            auto curves = trace_level(h, t, box, opt.resolution);
            e.curve = select_cycle(curves, gamma_ref, opt.ng_points, opt.closeness, t);
            PointSet ps = e.curve.as_pointset();
            e.hausdorff = hausdorff_distance(ps, gamma_ref);
            e.certified = true;
        } catch (const LevelsetError& err) {
            e.failure = err.what();
        }
        return e;
    };

    if (!opt.explicit_ts.empty()) {
        for (double t : opt.explicit_ts) out.push_back(run_one(t));
        return out;
    }

    double first_d = -1;
    int certified = 0;
    for (int j = 0; j < opt.max_steps; ++j) {
        double t = opt.t0 * std::pow(2.0, -j);
        out.push_back(run_one(t));
        const ScheduleEntry& e = out.back();
        if (!e.certified) continue;
        ++certified;
        if (first_d < 0) first_d = e.hausdorff;
        if (certified >= 2 && e.hausdorff < opt.target && e.hausdorff < first_d) return out;
    }
    throw ScheduleExhaustedError("lambda_schedule: no certified parameter reached the target");
}

}  // namespace limpet
