#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "limpet/dpoly.hpp"
#include "limpet/gcd.hpp"
#include "limpet/geometry.hpp"
#include "limpet/poly.hpp"
#include "limpet/poly_parser.hpp"
#include "limpet/univariate.hpp"

namespace limpet {

struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Rel { GT, GE, EQ };

inline std::string rel_name(Rel r) { return r == Rel::GT ? ">" : (r == Rel::GE ? ">=" : "="); }

enum class Membership { IN_GAMMA, ON_ALGEBRAIC_ONLY, OUTSIDE };

struct RatP2 {
    Rat x{0}, y{0};
    P2 approx() const { return {to_double(x), to_double(y)}; }
    friend bool operator==(const RatP2& a, const RatP2& b) { return a.x == b.x && a.y == b.y; }
};

struct Constraint {
    Poly g;
    Rel rel;
};
struct Clause {
    Poly f;
    std::vector<Constraint> constraints;
};

/// Square-free part of the product of the clause polynomials, normalized
/// primitive; its zero set is the algebraic set containing the described
/// semialgebraic set.
inline Poly associated_polynomial(const std::vector<Clause>& clauses) {
    if (clauses.empty()) throw SpecError("associated_polynomial: no clauses");
    Poly prod = Poly::constant(Rat(1));
    for (auto& c : clauses) prod *= c.f;
    return square_free_part(prod);
}

class SemialgSpec {
  public:
    static SemialgSpec from_clauses(std::vector<Clause> clauses, std::optional<Box> bbox = {},
                                    std::vector<RatP2> transition_override = {}) {
        SemialgSpec s;
        if (clauses.empty()) throw SpecError("spec: at least one clause required");
        for (size_t i = 0; i < clauses.size(); ++i)
            if (clauses[i].f.is_constant())
                throw SpecError("spec: clause " + std::to_string(i + 1) + " has constant f");
        s.clauses_ = std::move(clauses);
        s.f_gamma_ = associated_polynomial(s.clauses_);
        s.bbox_hint_ = bbox;
        s.transition_override_ = std::move(transition_override);
        s.build_caches();
        s.unbounded_ = s.detect_unbounded();
        return s;
    }

    static SemialgSpec parse(const std::string& text);

    const std::vector<Clause>& clauses() const { return clauses_; }
    const Poly& f_gamma() const { return f_gamma_; }
    const DFun2& f_gamma_fun() const { return *fg_fun_; }
    const std::optional<Box>& bbox_hint() const { return bbox_hint_; }
    const std::vector<RatP2>& transition_override() const { return transition_override_; }
    bool unbounded() const { return unbounded_; }

    /// Exact membership; relations are evaluated exactly as written, so
    /// topological closure must be encoded with >= by the caller.
    Membership member(const RatP2& p) const {
        std::map<int, Rat> at{{VX, p.x}, {VY, p.y}};
        for (auto& c : clauses_) {
            if (c.f.eval(at) != 0) continue;
            bool ok = true;
            for (auto& g : c.constraints) {
                Rat v = g.g.eval(at);
                if ((g.rel == Rel::GT && !(v > 0)) || (g.rel == Rel::GE && !(v >= 0)) ||
                    (g.rel == Rel::EQ && v != 0)) {
                    ok = false;
                    break;
                }
            }
            if (ok) return Membership::IN_GAMMA;
        }
        return f_gamma_.eval(at) == 0 ? Membership::ON_ALGEBRAIC_ONLY : Membership::OUTSIDE;
    }

    /// Floating membership for solver output and probe points. A polynomial
    /// counts as zero at p when |value| <= rel * pointwise magnitude (backward
    /// error) plus geo * |gradient| (first-order distance slack); the second
    /// term matters for sparse polynomials, whose exact evaluation leaves no
    /// rounding for the relative test to absorb. If margin is supplied it
    /// receives the smallest |g| / threshold ratio over the inequality
    /// constraints: near 1 means the point sits on a constraint boundary,
    /// mid-range means the verdict is fragile and the probe should shrink.
    Membership member_approx(P2 p, double rel, double geo = 0, double* margin = nullptr) const {
        if (margin) *margin = 1e300;
        auto thresh = [&](const DFun2& fn) {
            return rel * std::max(fn.f.mag(p), 1e-300) + geo * fn.grad(p).norm();
        };
        bool in = false;
        for (size_t ci = 0; ci < clauses_.size(); ++ci) {
            const auto& cache = clause_cache_[ci];
            double fv = cache.f.value(p);
            if (std::abs(fv) > thresh(cache.f)) continue;
            bool ok = true;
            for (size_t gi = 0; gi < cache.gs.size(); ++gi) {
                double gv = cache.gs[gi].value(p);
                double gt = std::max(thresh(cache.gs[gi]), 1e-300);
                if (margin) *margin = std::min(*margin, std::abs(gv) / gt);
                Rel rl = clauses_[ci].constraints[gi].rel;
                if ((rl == Rel::GT && gv <= -gt) || (rl == Rel::GE && gv < -gt) ||
                    (rl == Rel::EQ && std::abs(gv) > gt)) {
                    ok = false;
                }
            }
            if (ok) in = true;
        }
        if (in) return Membership::IN_GAMMA;
        double fv = fg_fun_->value(p);
        return std::abs(fv) <= thresh(*fg_fun_) ? Membership::ON_ALGEBRAIC_ONLY : Membership::OUTSIDE;
    }

  private:
    void build_caches() {
        fg_fun_ = std::make_shared<DFun2>(DFun2::from(f_gamma_));
        clause_cache_.clear();
        for (auto& c : clauses_) {
            ClauseCache cc;
            cc.f = DFun2::from(c.f);
            for (auto& g : c.constraints) cc.gs.push_back(DFun2::from(g.g));
            clause_cache_.push_back(std::move(cc));
        }
    }

    /// A set escapes to infinity iff it keeps crossing arbitrarily large box
    /// frames. Certified edge crossings come from Sturm isolation of the
    /// univariate restrictions of f_gamma; each crossing is membership-tested.
    bool detect_unbounded() const {
        double r0 = 8;
        if (bbox_hint_) r0 = std::max({std::abs(bbox_hint_->xmin), std::abs(bbox_hint_->xmax),
                                       std::abs(bbox_hint_->ymin), std::abs(bbox_hint_->ymax), 1.0}) *
                            1.5;
        for (int attempt = 0; attempt < 5; ++attempt) {
            int active = 0, total = 0;
            for (double mul : {1.0, 1.5, 2.0, 3.0}) {
                ++total;
                if (frame_meets_gamma(r0 * mul)) ++active;
            }
            if (active == total) return true;
            if (active == 0) return false;
            r0 *= 4;
        }
        throw SpecError("spec: unboundedness detection unresolved (frame crossings inconsistent)");
    }

    bool frame_meets_gamma(double R) const {
        Rat r = rat_from_double(R);
        auto probe = [&](int fixed_var, const Rat& value, int free_var) {
            Poly rest = f_gamma_.subst(fixed_var, value);
            if (rest.is_constant() && rest.constant_value() != 0) return false;
            // an identically zero restriction yields sentinel samples from
            // the root finder, which then go through the membership test
            UPoly u = UPoly::from(rest, free_var);
            auto roots = upoly_roots_in(u, -r, r, 1e-9 * R);
            for (double t : roots) {
                P2 p = fixed_var == VX ? P2{to_double(value), t} : P2{t, to_double(value)};
                if (member_approx(p, 1e-7, 1e-9 * R) == Membership::IN_GAMMA) return true;
            }
            return false;
        };
        return probe(VX, r, VY) || probe(VX, -r, VY) || probe(VY, r, VX) || probe(VY, -r, VX);
    }

    std::vector<Clause> clauses_;
    Poly f_gamma_;
    std::optional<Box> bbox_hint_;
    std::vector<RatP2> transition_override_;
    bool unbounded_ = false;

    struct ClauseCache {
        DFun2 f;
        std::vector<DFun2> gs;
    };
    std::shared_ptr<DFun2> fg_fun_;
    std::vector<ClauseCache> clause_cache_;
};

namespace detail {

inline Rat json_rat(const nlohmann::json& j, const char* what) {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return Rat(long(j.get<int64_t>()));
    if (j.is_number_float()) return rat_from_double(j.get<double>());
    throw SpecError(std::string("spec: ") + what + " must be a number or a 'p/q' string");
}

}  // namespace detail

inline SemialgSpec SemialgSpec::parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError(std::string("spec: JSON syntax error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("clauses") || !j["clauses"].is_array() || j["clauses"].empty())
        throw SpecError("spec: expected an object with a non-empty 'clauses' array");

    std::vector<Clause> clauses;
    for (size_t ci = 0; ci < j["clauses"].size(); ++ci) {
        const auto& jc = j["clauses"][ci];
        std::string where = "clause " + std::to_string(ci + 1);
        if (!jc.is_object() || !jc.contains("f")) throw SpecError("spec: " + where + " missing 'f'");
        Clause c;
        try {
            c.f = parse_poly(jc["f"].get<std::string>());
        } catch (const ParseError& e) {
            throw SpecError("spec: " + where + ": " + e.what());
        }
        if (c.f.is_constant()) throw SpecError("spec: " + where + " has constant f");
        if (jc.contains("constraints")) {
            for (const auto& jg : jc["constraints"]) {
                Constraint g;
                try {
                    g.g = parse_poly(jg.at("g").get<std::string>());
                } catch (const ParseError& e) {
                    throw SpecError("spec: " + where + " constraint: " + e.what());
                }
                std::string rel = jg.at("rel").get<std::string>();
                if (rel == ">")
                    g.rel = Rel::GT;
                else if (rel == ">=")
                    g.rel = Rel::GE;
                else if (rel == "=")
                    g.rel = Rel::EQ;
                else
                    throw SpecError("spec: " + where + " has bad relation '" + rel + "'");
                c.constraints.push_back(std::move(g));
            }
        }
        clauses.push_back(std::move(c));
    }

    std::optional<Box> bbox;
    if (j.contains("bbox")) {
        const auto& jb = j["bbox"];
        if (!jb.is_array() || jb.size() != 4) throw SpecError("spec: bbox must be [xmin, xmax, ymin, ymax]");
        bbox = Box{to_double(detail::json_rat(jb[0], "bbox")), to_double(detail::json_rat(jb[1], "bbox")),
                   to_double(detail::json_rat(jb[2], "bbox")), to_double(detail::json_rat(jb[3], "bbox"))};
        if (bbox->width() <= 0 || bbox->height() <= 0) throw SpecError("spec: bbox is degenerate");
    }

    std::vector<RatP2> tr;
    if (j.contains("transition_points")) {
        for (const auto& jp : j["transition_points"]) {
            if (!jp.is_array() || jp.size() != 2) throw SpecError("spec: transition point must be [x, y]");
            tr.push_back({detail::json_rat(jp[0], "transition point"), detail::json_rat(jp[1], "transition point")});
        }
    }
    return from_clauses(std::move(clauses), bbox, std::move(tr));
}

}  // namespace limpet
