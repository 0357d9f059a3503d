#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

namespace g2flow {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational scalar. All identity checks in the test and verify suites
/// run on this backend so that equality is decidable.
using Rat = boost::multiprecision::cpp_rational;

inline BigInt num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline BigInt den(const Rat& r) { return boost::multiprecision::denominator(r); }

/// Exact n-th root of a nonnegative integer, if it exists.
inline bool int_nth_root(const BigInt& x, unsigned n, BigInt& out) {
    if (x < 0) return false;
    if (x == 0 || x == 1) { out = x; return true; }
    BigInt lo = 1, hi = x;
    while (lo < hi) {
        BigInt mid = (lo + hi + 1) / 2;
        BigInt p = 1;
        bool over = false;
        for (unsigned i = 0; i < n; ++i) {
            p *= mid;
            if (p > x) { over = true; break; }
        }
        if (over) hi = mid - 1; else lo = mid;
    }
    BigInt p = 1;
    for (unsigned i = 0; i < n; ++i) p *= lo;
    out = lo;
    return p == x;
}

inline bool rat_nth_root(const Rat& x, unsigned n, Rat& out) {
    if (x < 0) return false;
    BigInt rn, rd;
    if (!int_nth_root(num(x), n, rn)) return false;
    if (!int_nth_root(den(x), n, rd)) return false;
    out = Rat(rn, rd);
    return true;
}

// ---------------------------------------------------------------------------
// Scalar operations shared by the rational and float backends. The Laurent
// backend provides its own overloads (see laurent.hpp).
// ---------------------------------------------------------------------------

inline bool is_zero(const Rat& x) { return x == 0; }
inline bool is_zero(double x) { return x == 0.0; }

inline bool is_positive(const Rat& x) { return x > 0; }
inline bool is_positive(double x) { return x > 0.0; }

inline Rat scalar_from_int(const Rat&, long n, long d = 1) { return Rat(n, d); }
inline double scalar_from_int(const double&, long n, long d = 1) {
    return static_cast<double>(n) / static_cast<double>(d);
}

/// sqrt that must be representable in the backend. The rational backend
/// throws when the argument is not a perfect square; callers arrange their
/// inputs (e.g. metrics of the form L^t L) so that it is.
inline Rat sqrt_scalar(const Rat& x) {
    Rat r;
    if (!rat_nth_root(x, 2, r))
        throw std::domain_error("sqrt not exact in rational backend");
    return r;
}
inline double sqrt_scalar(double x) {
    if (x < 0) throw std::domain_error("sqrt of negative scalar");
    return std::sqrt(x);
}

inline Rat nth_root_scalar(const Rat& x, unsigned n) {
    Rat r;
    if (!rat_nth_root(x, n, r))
        throw std::domain_error("nth root not exact in rational backend");
    return r;
}
inline double nth_root_scalar(double x, unsigned n) {
    if (x < 0) throw std::domain_error("nth root of negative scalar");
    return std::pow(x, 1.0 / static_cast<double>(n));
}

inline double to_double(const Rat& x) { return static_cast<double>(x); }
inline double to_double(double x) { return x; }

inline std::string scalar_str(const Rat& x) { return x.str(); }
inline std::string scalar_str(double x) { return std::to_string(x); }

} // namespace g2flow
