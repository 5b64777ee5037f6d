#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace limpet {

using Rat = mpq_class;

inline double to_double(const Rat& r) { return r.get_d(); }

/// mpq_class(n, d) does not canonicalize; this does.
inline Rat make_rat(long num, long den) {
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

/// Exact conversion; every finite double is a dyadic rational.
inline Rat rat_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("rat_from_double: non-finite input");
    Rat r(x);
    r.canonicalize();
    return r;
}

/// Parses "n", "-n", or "p/q" (q > 0 after canonicalization).
inline Rat parse_rat(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("parse_rat: empty string");
    try {
        Rat r(s);
        r.canonicalize();
        if (r.get_den() == 0) throw std::invalid_argument("parse_rat: zero denominator");
        return r;
    } catch (const std::invalid_argument&) {
        throw;
    } catch (...) {
        throw std::invalid_argument("parse_rat: bad rational literal '" + s + "'");
    }
}

inline std::string rat_to_string(const Rat& r) {
    std::string s = r.get_num().get_str();
    if (r.get_den() != 1) s += "/" + r.get_den().get_str();
    return s;
}

namespace detail {
// Simplest rational in [lo, hi] by the Stern-Brocot descent.
inline Rat simplest_in(const Rat& lo, const Rat& hi) {
    if (lo > hi) return simplest_in(hi, lo);
    if (lo == hi) return lo;
    if (lo <= 0 && 0 <= hi) return Rat(0);
    if (hi < 0) return -simplest_in(-hi, -lo);
    // 0 < lo < hi
    mpz_class fl = lo.get_num() / lo.get_den();  // floor for positive lo
    Rat fl_r(fl);
    if (fl_r + 1 <= hi) {
        // an integer lies in the interval
        if (lo == fl_r) return fl_r;
        return fl_r + 1;
    }
    Rat frac_lo = lo - fl_r, frac_hi = hi - fl_r;
    return fl_r + Rat(1) / simplest_in(Rat(1) / frac_hi, Rat(1) / frac_lo);
}
}  // namespace detail

/// Simplest rational within eps of x. Recovers exact values of solver output
/// (e.g. 2.0000000003 -> 2) while staying faithful to genuinely irrational
/// snaps, whose result is capped at denominator <= 2^40 via eps choice.
inline Rat snap_rational(double x, double eps = 1e-9) {
    if (eps <= 0) return rat_from_double(x);
    Rat c = rat_from_double(x);
    Rat e = rat_from_double(eps);
    return detail::simplest_in(c - e, c + e);
}

}  // namespace limpet
