#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "limpet/geometry.hpp"
#include "limpet/poly.hpp"

namespace limpet {

/// Bivariate polynomial compiled to double coefficients for the numeric
/// paths (grids, Newton, integration). Construction-time algebra stays exact;
/// everything downstream of a DPoly2 is floating point by design.
class DPoly2 {
  public:
    struct Term {
        double c;
        int ex, ey;
    };

    DPoly2() = default;

    static DPoly2 from(const Poly& p) {
        if ((p.vars_mask() & ~((1u << VX) | (1u << VY))) != 0)
            throw std::invalid_argument("DPoly2::from: polynomial has variables besides x,y");
        DPoly2 d;
        for (auto& [m, c] : p.terms()) {
            d.terms_.push_back({to_double(c), m.e[VX], m.e[VY]});
            d.degx_ = std::max(d.degx_, int(m.e[VX]));
            d.degy_ = std::max(d.degy_, int(m.e[VY]));
        }
        return d;
    }

    bool empty() const { return terms_.empty(); }
    int degx() const { return degx_; }
    int degy() const { return degy_; }
    const std::vector<Term>& terms() const { return terms_; }

    double eval(double x, double y) const {
        double acc = 0;
        for (auto& t : terms_) acc += t.c * ipow(x, t.ex) * ipow(y, t.ey);
        return acc;
    }
    double eval(P2 p) const { return eval(p.x, p.y); }

    /// Pointwise evaluation magnitude sum |c|*|x|^ex*|y|^ey; the natural
    /// backward-error scale for residual and regularity thresholds.
    double mag(double x, double y) const {
        double acc = 0;
        double ax = std::abs(x), ay = std::abs(y);
        for (auto& t : terms_) acc += std::abs(t.c) * ipow(ax, t.ex) * ipow(ay, t.ey);
        return acc;
    }
    double mag(P2 p) const { return mag(p.x, p.y); }

    /// Collapses y, returning dense x-coefficients; the row trick that makes
    /// grid sweeps cheap.
    void row(double y, std::vector<double>& coeffs) const {
        coeffs.assign(size_t(degx_) + 1, 0.0);
        for (auto& t : terms_) coeffs[size_t(t.ex)] += t.c * ipow(y, t.ey);
    }
    static double horner(const std::vector<double>& coeffs, double x) {
        double acc = 0;
        for (size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
        return acc;
    }

  private:
    static double ipow(double b, int e) {
        double r = 1;
        while (e) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    std::vector<Term> terms_;
    int degx_ = 0, degy_ = 0;
};

/// A bivariate function bundle: value plus first partials.
struct DFun2 {
    DPoly2 f, fx, fy;

    static DFun2 from(const Poly& p) {
        return {DPoly2::from(p), DPoly2::from(p.partial(VX)), DPoly2::from(p.partial(VY))};
    }
    double value(P2 p) const { return f.eval(p); }
    V2 grad(P2 p) const { return {fx.eval(p), fy.eval(p)}; }
    double grad_mag_scale(P2 p) const { return fx.mag(p) + fy.mag(p); }
};

}  // namespace limpet
