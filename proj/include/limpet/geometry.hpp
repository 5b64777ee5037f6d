#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace limpet {

struct P2 {
    double x = 0, y = 0;
    friend P2 operator+(P2 a, P2 b) { return {a.x + b.x, a.y + b.y}; }
    friend P2 operator-(P2 a, P2 b) { return {a.x - b.x, a.y - b.y}; }
    friend P2 operator*(double s, P2 a) { return {s * a.x, s * a.y}; }
    double dot(P2 o) const { return x * o.x + y * o.y; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
    P2 unit() const {
        double n = norm();
        return n > 0 ? P2{x / n, y / n} : P2{0, 0};
    }
    P2 perp() const { return {-y, x}; }
};

using V2 = P2;

inline double dist(P2 a, P2 b) { return (a - b).norm(); }

inline bool lex_less(P2 a, P2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

struct Box {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double diag() const { return std::hypot(width(), height()); }
    P2 center() const { return {(xmin + xmax) / 2, (ymin + ymax) / 2}; }
    bool contains(P2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
    Box inflated(double frac) const {
        double dx = width() * frac, dy = height() * frac;
        return {xmin - dx, xmax + dx, ymin - dy, ymax + dy};
    }
    static Box hull(const std::vector<P2>& pts) {
        if (pts.empty()) throw std::invalid_argument("Box::hull: empty point set");
        Box b{pts[0].x, pts[0].x, pts[0].y, pts[0].y};
        for (auto p : pts) {
            b.xmin = std::min(b.xmin, p.x);
            b.xmax = std::max(b.xmax, p.x);
            b.ymin = std::min(b.ymin, p.y);
            b.ymax = std::max(b.ymax, p.y);
        }
        return b;
    }
};

inline double dist_point_segment(P2 p, P2 a, P2 b) {
    P2 ab = b - a;
    double len2 = ab.norm2();
    if (len2 == 0) return dist(p, a);
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return dist(p, a + t * ab);
}

struct Polyline {
    std::vector<P2> pts;
    bool closed = false;
    double length() const {
        double s = 0;
        for (size_t i = 1; i < pts.size(); ++i) s += dist(pts[i - 1], pts[i]);
        if (closed && pts.size() > 1) s += dist(pts.back(), pts.front());
        return s;
    }
};

/// Flat set of vertices plus index-pair segments; the common currency for
/// Hausdorff measurements over curves, samples and isolated points.
struct PointSet {
    std::vector<P2> points;
    std::vector<std::pair<uint32_t, uint32_t>> segments;

    bool empty() const { return points.empty(); }

    void add_point(P2 p) { points.push_back(p); }
    void add_polyline(const Polyline& pl) {
        uint32_t base = static_cast<uint32_t>(points.size());
        points.insert(points.end(), pl.pts.begin(), pl.pts.end());
        for (uint32_t i = 1; i < pl.pts.size(); ++i) segments.emplace_back(base + i - 1, base + i);
        if (pl.closed && pl.pts.size() > 2)
            segments.emplace_back(base + static_cast<uint32_t>(pl.pts.size()) - 1, base);
    }
    static PointSet of(const Polyline& pl) {
        PointSet s;
        s.add_polyline(pl);
        return s;
    }
};

/// Uniform-grid index over the segments (and lone vertices) of a PointSet for
/// nearest-feature queries; ring search widens until correctness is certain.
class SegmentGrid {
  public:
    explicit SegmentGrid(const PointSet& s) : set_(s) {
        if (s.points.empty()) throw std::invalid_argument("SegmentGrid: empty set");
        box_ = Box::hull(s.points);
        double avg = 0;
        for (auto [i, j] : s.segments) avg += dist(s.points[i], s.points[j]);
        avg = s.segments.empty() ? box_.diag() / 64 : avg / double(s.segments.size());
        cell_ = std::max({avg * 2, box_.diag() / 512, 1e-12});
        nx_ = std::max(1, int(box_.width() / cell_) + 1);
        ny_ = std::max(1, int(box_.height() / cell_) + 1);
        buckets_.resize(size_t(nx_) * ny_);
        for (uint32_t k = 0; k < s.segments.size(); ++k) insert_segment(k);
        lone_.assign(s.points.size(), true);
        for (auto [i, j] : s.segments) lone_[i] = lone_[j] = false;
        for (uint32_t k = 0; k < s.points.size(); ++k)
            if (lone_[k]) bucket_of(s.points[k]).lone_points.push_back(k);
    }

    double distance(P2 p) const {
        int ci = cell_x(p.x), cj = cell_y(p.y);
        double best = std::numeric_limits<double>::infinity();
        // widen rings until the found distance is closer than the nearest
        // unexplored ring
        for (int r = 0;; ++r) {
            bool any_cell = false;
            for (int j = cj - r; j <= cj + r; ++j) {
                for (int i = ci - r; i <= ci + r; ++i) {
                    if (std::max(std::abs(i - ci), std::abs(j - cj)) != r) continue;
                    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
                    any_cell = true;
                    const Bucket& b = buckets_[size_t(j) * nx_ + i];
                    for (uint32_t k : b.segs) {
                        auto [u, v] = set_.segments[k];
                        best = std::min(best, dist_point_segment(p, set_.points[u], set_.points[v]));
                    }
                    for (uint32_t k : b.lone_points) best = std::min(best, dist(p, set_.points[k]));
                }
            }
            double ring_clearance = (double(r) - 1.0) * cell_ - clear_slack(p);
            if (best <= ring_clearance) break;
            if (!any_cell && r > std::max(nx_, ny_)) break;
        }
        return best;
    }

  private:
    struct Bucket {
        std::vector<uint32_t> segs;
        std::vector<uint32_t> lone_points;
    };

    double clear_slack(P2 p) const {
        // distance from p to the grid coverage area, so off-grid queries still
        // terminate with the right answer
        double dx = std::max({box_.xmin - p.x, 0.0, p.x - box_.xmax});
        double dy = std::max({box_.ymin - p.y, 0.0, p.y - box_.ymax});
        return std::hypot(dx, dy);
    }
    int cell_x(double x) const { return std::clamp(int((x - box_.xmin) / cell_), 0, nx_ - 1); }
    int cell_y(double y) const { return std::clamp(int((y - box_.ymin) / cell_), 0, ny_ - 1); }
    Bucket& bucket_of(P2 p) { return buckets_[size_t(cell_y(p.y)) * nx_ + cell_x(p.x)]; }

    void insert_segment(uint32_t k) {
        auto [u, v] = set_.segments[k];
        P2 a = set_.points[u], b = set_.points[v];
        int i0 = cell_x(std::min(a.x, b.x)), i1 = cell_x(std::max(a.x, b.x));
        int j0 = cell_y(std::min(a.y, b.y)), j1 = cell_y(std::max(a.y, b.y));
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) buckets_[size_t(j) * nx_ + i].segs.push_back(k);
    }

    const PointSet& set_;
    Box box_;
    double cell_;
    int nx_, ny_;
    std::vector<Bucket> buckets_;
    std::vector<bool> lone_;
};

inline double directed_hausdorff(const PointSet& from, const SegmentGrid& to_grid) {
    double worst = 0;
    for (auto p : from.points) worst = std::max(worst, to_grid.distance(p));
    return worst;
}

/// max(sup_{a in A} d(a, B), sup_{b in B} d(b, A)) with point-to-segment
/// distances on polyline inputs.
inline double hausdorff_distance(const PointSet& a, const PointSet& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff_distance: empty input");
    SegmentGrid ga(a), gb(b);
    return std::max(directed_hausdorff(a, gb), directed_hausdorff(b, ga));
}

}  // namespace limpet
