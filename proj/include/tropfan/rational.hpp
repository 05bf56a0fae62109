#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace tropfan {

using Int = mpz_class;
using Rat = mpq_class;

// Parses "p", "p/q", "-p/q". Throws on malformed input or q = 0.
inline Rat parse_rat(const std::string& text) {
    mpq_class q;
    if (mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0)
        throw std::invalid_argument("malformed rational: '" + text + "'");
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
    q.canonicalize();
    return q;
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline Int rat_floor(const Rat& q) {
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return r;
}

inline Int rat_ceil(const Rat& q) {
    Int r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return r;
}

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

inline Int int_gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int int_lcm(const Int& a, const Int& b) {
    Int r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline long long to_ll(const Int& v) {
    if (!v.fits_slong_p()) throw std::overflow_error("integer out of range: " + v.get_str());
    return v.get_si();
}

// gmpxx has no long long constructors; LP64 makes the narrowing safe.
inline Int int_of(long long v) { return Int(static_cast<long>(v)); }

inline Rat rat_of(long long num, long long den = 1) {
    Rat q(static_cast<long>(num), static_cast<long>(den));
    q.canonicalize();
    return q;
}

}  // namespace tropfan
