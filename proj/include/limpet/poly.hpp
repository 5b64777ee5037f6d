#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "limpet/rational.hpp"

namespace limpet {

// Fixed variable universe. Slots 3.. hold the auxiliary a1, a2, ... parameters.
constexpr int kMaxVars = 16;
enum : int { VX = 0, VY = 1, VL = 2, VA = 3 };

inline std::string var_name(int v) {
    switch (v) {
        case VX: return "x";
        case VY: return "y";
        case VL: return "l";
        default:
            if (v >= VA && v < kMaxVars) return "a" + std::to_string(v - VA + 1);
            throw std::out_of_range("var_name: bad variable index");
    }
}

struct Mono {
    std::array<uint8_t, kMaxVars> e{};

    int deg() const {
        int d = 0;
        for (auto k : e) d += k;
        return d;
    }
    bool is_unit() const {
        for (auto k : e)
            if (k) return false;
        return true;
    }
    Mono times(const Mono& o) const {
        Mono r;
        for (int i = 0; i < kMaxVars; ++i) {
            int s = e[i] + o.e[i];
            if (s > 255) throw std::overflow_error("Mono::times: exponent overflow");
            r.e[i] = static_cast<uint8_t>(s);
        }
        return r;
    }
    bool divides(const Mono& o) const {
        for (int i = 0; i < kMaxVars; ++i)
            if (e[i] > o.e[i]) return false;
        return true;
    }
    Mono div(const Mono& o) const {
        Mono r;
        for (int i = 0; i < kMaxVars; ++i) {
            if (o.e[i] > e[i]) throw std::domain_error("Mono::div: not divisible");
            r.e[i] = static_cast<uint8_t>(e[i] - o.e[i]);
        }
        return r;
    }
    friend bool operator==(const Mono& a, const Mono& b) { return a.e == b.e; }
};

// Graded lexicographic order, x > y > l > a1 > ...
struct GrlexLess {
    bool operator()(const Mono& a, const Mono& b) const {
        int da = a.deg(), db = b.deg();
        if (da != db) return da < db;
        for (int i = 0; i < kMaxVars; ++i)
            if (a.e[i] != b.e[i]) return a.e[i] < b.e[i];
        return false;
    }
};

/// Sparse multivariate polynomial with exact rational coefficients.
/// Invariant: no stored zero coefficients; the zero polynomial is empty.
class Poly {
  public:
    using TermMap = std::map<Mono, Rat, GrlexLess>;

    Poly() = default;

    static Poly zero() { return Poly(); }
    static Poly constant(const Rat& c) {
        Poly p;
        if (c != 0) p.terms_[Mono{}] = c;
        return p;
    }
    static Poly variable(int v, int exp = 1) {
        check_var(v);
        if (exp < 0) throw std::invalid_argument("Poly::variable: negative exponent");
        Poly p;
        Mono m;
        if (exp > 255) throw std::overflow_error("Poly::variable: exponent overflow");
        m.e[v] = static_cast<uint8_t>(exp);
        p.terms_[m] = Rat(1);
        return p;
    }
    static Poly term(const Rat& c, const Mono& m) {
        Poly p;
        if (c != 0) p.terms_[m] = c;
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit()); }
    Rat constant_value() const {
        if (terms_.empty()) return Rat(0);
        if (!is_constant()) throw std::domain_error("Poly::constant_value: nonconstant");
        return terms_.begin()->second;
    }

    size_t term_count() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    int degree() const {
        if (terms_.empty()) return -1;
        return terms_.rbegin()->first.deg();
    }
    int deg_in(int v) const {
        check_var(v);
        int d = terms_.empty() ? -1 : 0;
        for (auto& [m, c] : terms_) d = std::max(d, int(m.e[v]));
        return d;
    }
    bool uses(int v) const { return deg_in(v) > 0; }
    uint32_t vars_mask() const {
        uint32_t mask = 0;
        for (auto& [m, c] : terms_)
            for (int i = 0; i < kMaxVars; ++i)
                if (m.e[i]) mask |= (1u << i);
        return mask;
    }

    /// Leading term under grlex.
    std::pair<Mono, Rat> leading() const {
        if (terms_.empty()) throw std::domain_error("Poly::leading: zero polynomial");
        return *terms_.rbegin();
    }

    Poly& operator+=(const Poly& o) {
        for (auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        for (auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator-(const Poly& a) {
        Poly r;
        for (auto& [m, c] : a.terms_) r.terms_[m] = -c;
        return r;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r;
        for (auto& [ma, ca] : a.terms_)
            for (auto& [mb, cb] : b.terms_) r.add_term(ma.times(mb), ca * cb);
        return r;
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    friend Poly operator*(const Rat& c, const Poly& a) {
        Poly r;
        if (c == 0) return r;
        for (auto& [m, v] : a.terms_) r.terms_[m] = c * v;
        return r;
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

    Poly pow(int n) const {
        if (n < 0) throw std::invalid_argument("Poly::pow: negative exponent");
        Poly r = constant(Rat(1));
        Poly base = *this;
        while (n) {
            if (n & 1) r *= base;
            if (n >>= 1) base *= base;
        }
        return r;
    }

    /// Formal partial derivative.
    Poly partial(int v) const {
        check_var(v);
        Poly r;
        for (auto& [m, c] : terms_) {
            if (m.e[v] == 0) continue;
            Mono n = m;
            n.e[v] -= 1;
            r.add_term(n, c * m.e[v]);
        }
        return r;
    }

    /// Exact evaluation; the assignment must cover every variable present.
    Rat eval(const std::map<int, Rat>& at) const {
        uint32_t mask = vars_mask();
        for (int i = 0; i < kMaxVars; ++i)
            if ((mask & (1u << i)) && !at.count(i))
                throw std::invalid_argument("Poly::eval: missing variable " + var_name(i));
        Rat acc(0);
        for (auto& [m, c] : terms_) {
            Rat t = c;
            for (int i = 0; i < kMaxVars; ++i)
                for (int k = 0; k < m.e[i]; ++k) t *= at.at(i);
            acc += t;
        }
        return acc;
    }

    /// Substitutes an exact value for one variable.
    Poly subst(int v, const Rat& value) const {
        check_var(v);
        Poly r;
        for (auto& [m, c] : terms_) {
            Rat t = c;
            for (int k = 0; k < m.e[v]; ++k) t *= value;
            Mono n = m;
            n.e[v] = 0;
            r.add_term(n, t);
        }
        return r;
    }

    /// Substitutes v by the linear form (a + b*v), keeping the slot.
    Poly subst_linear(int v, const Rat& a, const Rat& b) const {
        check_var(v);
        Poly lin = constant(a) + b * variable(v);
        Poly r;
        // group by exponent of v to reuse powers
        std::map<int, Poly> by_exp;
        for (auto& [m, c] : terms_) {
            Mono n = m;
            int k = n.e[v];
            n.e[v] = 0;
            by_exp[k].add_term(n, c);
        }
        Poly p = constant(Rat(1));
        int cur = 0;
        for (auto& [k, q] : by_exp) {
            while (cur < k) {
                p *= lin;
                ++cur;
            }
            r += q * p;
        }
        return r;
    }

    /// Terms of given total degree, as a polynomial.
    Poly homogeneous_part(int k) const {
        Poly r;
        for (auto& [m, c] : terms_)
            if (m.deg() == k) r.terms_[m] = c;
        return r;
    }

    /// Terms of given degree in x and y jointly; other variables pass through.
    Poly homogeneous_part_xy(int k) const {
        Poly r;
        for (auto& [m, c] : terms_)
            if (int(m.e[VX]) + int(m.e[VY]) == k) r.terms_[m] = c;
        return r;
    }
    int degree_xy() const {
        int d = terms_.empty() ? -1 : 0;
        for (auto& [m, c] : terms_) d = std::max(d, int(m.e[VX]) + int(m.e[VY]));
        return d;
    }

    /// Coefficient of v^k, with the v-exponent removed.
    Poly coeff_wrt(int v, int k) const {
        check_var(v);
        Poly r;
        for (auto& [m, c] : terms_) {
            if (m.e[v] != k) continue;
            Mono n = m;
            n.e[v] = 0;
            r.terms_[n] = c;
        }
        return r;
    }

    /// Monomial-ordered exact division; nullopt if the division leaves a remainder.
    static std::optional<Poly> exact_div(const Poly& a, const Poly& b) {
        if (b.is_zero()) throw std::domain_error("Poly::exact_div: division by zero");
        Poly r = a, q;
        auto [lbm, lbc] = b.leading();
        while (!r.is_zero()) {
            auto [lrm, lrc] = r.leading();
            if (!lbm.divides(lrm)) return std::nullopt;
            Mono qm = lrm.div(lbm);
            Rat qc = lrc / lbc;
            q.add_term(qm, qc);
            r -= Poly::term(qc, qm) * b;
        }
        return q;
    }

    std::string to_string() const;

  private:
    static void check_var(int v) {
        if (v < 0 || v >= kMaxVars) throw std::out_of_range("Poly: bad variable index");
    }
    void add_term(const Mono& m, const Rat& c) {
        if (c == 0) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, c);
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    TermMap terms_;
};

inline std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    // leading term first
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        Rat ac = c < 0 ? Rat(-c) : c;
        if (out.empty()) {
            if (c < 0) out += "-";
        } else {
            out += (c < 0) ? " - " : " + ";
        }
        std::string mono;
        for (int i = 0; i < kMaxVars; ++i) {
            if (!m.e[i]) continue;
            if (!mono.empty()) mono += "*";
            mono += var_name(i);
            if (m.e[i] > 1) mono += "^" + std::to_string(int(m.e[i]));
        }
        if (mono.empty()) {
            out += rat_to_string(ac);
        } else {
            if (ac != 1) out += rat_to_string(ac) + "*";
            out += mono;
        }
    }
    return out;
}

}  // namespace limpet
