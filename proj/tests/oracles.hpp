// Test-side oracles, kept independent of the library's decomposition and
// distance code paths on purpose.
#pragma once

#include <vector>

#include "limpet/dpoly.hpp"
#include "limpet/geometry.hpp"
#include "limpet/semialg.hpp"

namespace oracles {

using namespace limpet;

/// Dense-sampling union-find component count of the complement of the set.
/// A cell blocks iff some clause can pass through it: first-order band test
/// on f plus a global second-derivative slack, constraints given the same
/// treatment.
inline int complement_components(const SemialgSpec& spec, const Box& box, int n) {
    struct ClauseFns {
        DFun2 f;
        double hess_bound;
        std::vector<DFun2> gs;
        std::vector<double> g_hess;
    };
    auto hess_bound = [&](const Poly& p) {
        double ax = std::max(std::abs(box.xmin), std::abs(box.xmax));
        double ay = std::max(std::abs(box.ymin), std::abs(box.ymax));
        double b = 0;
        for (auto* q : {&p}) {
            Poly xx = q->partial(VX).partial(VX), xy = q->partial(VX).partial(VY), yy = q->partial(VY).partial(VY);
            for (auto* h : {&xx, &xy, &yy}) {
                if (h->is_zero()) continue;
                b += DPoly2::from(*h).mag(ax, ay);
            }
        }
        return b;
    };
    std::vector<ClauseFns> cls;
    for (auto& c : spec.clauses()) {
        ClauseFns fns{DFun2::from(c.f), hess_bound(c.f), {}, {}};
        for (auto& g : c.constraints) {
            fns.gs.push_back(DFun2::from(g.g));
            fns.g_hess.push_back(hess_bound(g.g));
        }
        cls.push_back(std::move(fns));
    }

    double dx = box.width() / n, dy = box.height() / n;
    double cell = std::hypot(dx, dy) / 2;
    std::vector<uint8_t> blocked(size_t(n) * n, 0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            P2 c{box.xmin + (i + 0.5) * dx, box.ymin + (j + 0.5) * dy};
            for (auto& cl : cls) {
                double band = 1.5 * cell * cl.f.grad(c).norm() + 2 * cell * cell * cl.hess_bound;
                if (std::abs(cl.f.value(c)) > band) continue;
                bool ok = true;
                for (size_t q = 0; q < cl.gs.size(); ++q) {
                    double slack = 1.5 * cell * cl.gs[q].grad(c).norm() + 2 * cell * cell * cl.g_hess[q];
                    if (cl.gs[q].value(c) < -slack) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    blocked[size_t(j) * n + i] = 1;
                    break;
                }
            }
        }
    }

    // union-find over 4-adjacent unblocked cells
    std::vector<int32_t> parent(size_t(n) * n, -1);
    std::function<int32_t(int32_t)> find = [&](int32_t x) {
        while (parent[size_t(x)] != x) x = parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
        return x;
    };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            size_t id = size_t(j) * n + i;
            if (!blocked[id]) parent[id] = int32_t(id);
        }
    auto unite = [&](size_t a, size_t b) {
        int32_t ra = find(int32_t(a)), rb = find(int32_t(b));
        if (ra != rb) parent[size_t(ra)] = rb;
    };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            size_t id = size_t(j) * n + i;
            if (blocked[id]) continue;
            if (i + 1 < n && !blocked[id + 1]) unite(id, id + 1);
            if (j + 1 < n && !blocked[id + size_t(n)]) unite(id, id + size_t(n));
        }
    int count = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            size_t id = size_t(j) * n + i;
            if (!blocked[id] && find(int32_t(id)) == int32_t(id)) ++count;
        }
    return count;
}

/// Brute-force all-pairs Hausdorff between vertex sets (no segment
/// interpolation; callers account for sampling error).
inline double hausdorff_brute(const std::vector<P2>& a, const std::vector<P2>& b) {
    auto directed = [](const std::vector<P2>& from, const std::vector<P2>& to) {
        double worst = 0;
        for (auto p : from) {
            double best = 1e300;
            for (auto q : to) best = std::min(best, dist(p, q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace oracles
