#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace hkd {

using Int = mpz_class;
using Rat = mpq_class;

// 2^k as an exact rational, k may be negative.
inline Rat rat_pow2(long k) {
    Rat r(1);
    if (k >= 0)
        mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<unsigned long>(k));
    else
        mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<unsigned long>(-k));
    return r;  // 2^k/1 or 1/2^k, already canonical
}

// Canonicalizing fraction constructor; the two-argument mpq_class constructor
// must not be used directly (GMP requires canonical form).
inline Rat frac(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat frac(const Int& num, const Int& den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Int rat_floor(const Rat& q) {
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline Int rat_ceil(const Rat& q) {
    Int r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline double to_double(const Rat& q) { return mpq_get_d(q.get_mpq_t()); }

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

// Parses "p/q", "p", or a plain decimal like "-0.25".
inline Rat rat_parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rat r(s, 10);
        r.canonicalize();
        if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
        return r;
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        Rat r(s, 10);
        r.canonicalize();
        return r;
    }
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    size_t frac_len = s.size() - dot - 1;
    Rat r(digits, 10);
    for (size_t i = 0; i < frac_len; ++i) r /= 10;
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rat& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace hkd
