#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "errors.hpp"

namespace ntheight {

// Exact arithmetic is delegated to GMP.  mpq_class already maintains the
// canonical form we need (gcd(num, den) = 1, den >= 1), so BigRational is an
// alias rather than a wrapper.
using BigInt = mpz_class;
using BigRational = mpq_class;

inline BigInt to_int(long v) { return BigInt(v); }

inline bool is_zero(const BigRational& q) { return sgn(q) == 0; }

// Serialization uses "num/den" strings (den omitted when 1) and accepts an
// optional leading minus on the numerator only.
inline std::string rat_to_string(const BigRational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline BigRational rat_from_string(const std::string& s) {
    if (s.empty()) raise(errc::config_error, "empty rational literal");
    mpq_class q;
    if (q.set_str(s, 10) != 0) raise(errc::config_error, "bad rational literal '" + s + "'");
    if (q.get_den() == 0) raise(errc::config_error, "zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

inline bool is_probable_prime(const BigInt& n) {
    return mpz_probab_prime_p(n.get_mpz_t(), 32) != 0;
}

inline BigInt next_prime_above(const BigInt& n) {
    BigInt out;
    mpz_nextprime(out.get_mpz_t(), n.get_mpz_t());
    return out;
}

inline BigInt pow_int(const BigInt& base, unsigned long e) {
    BigInt out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
    return out;
}

// Exact p-adic valuation of a nonzero integer.
inline long valuation_int(const BigInt& n, const BigInt& p) {
    require(sgn(n) != 0, errc::zero_element, "valuation of zero integer");
    BigInt rest;
    unsigned long v = mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
    return static_cast<long>(v);
}

inline long valuation_rat(const BigRational& q, const BigInt& p) {
    require(sgn(q) != 0, errc::zero_element, "valuation of zero rational");
    long v = 0;
    if (q.get_num() != 0) v += valuation_int(q.get_num(), p);
    v -= valuation_int(q.get_den(), p);
    return v;
}

namespace detail {

inline BigInt pollard_rho(const BigInt& n) {
    // Brent's cycle variant with a deterministic schedule of offsets, so
    // factorizations are reproducible across runs.  The step budget caps the
    // total work at a few seconds: desk-scale cofactors (smallest prime
    // factor below ~10^12) are found well inside it, and anything harder is
    // reported as a failure instead of an open-ended search.
    require(mpz_sizeinbase(n.get_mpz_t(), 10) <= 80, errc::internal_error,
            "cofactor too large for desk-scale factoring");
    long steps_left = 1500000;
    for (unsigned long c = 1; c < 64; ++c) {
        BigInt x = 2, y = 2, d = 1;
        BigInt diff, save_x;
        long power = 1, lam = 1;
        x = 2;
        y = x * x + c;
        y %= n;
        while (steps_left > 0) {
            --steps_left;
            diff = x - y;
            if (sgn(diff) == 0) break; // cycle without factor; next c
            mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
            if (d != 1 && d != n) return d;
            if (lam == power) {
                x = y;
                power *= 2;
                lam = 0;
            }
            y = y * y + c;
            y %= n;
            ++lam;
        }
        if (steps_left <= 0) break;
    }
    raise(errc::internal_error, "pollard rho failed on " + n.get_str());
}

inline void factor_rec(BigInt n, std::map<BigInt, long>& out) {
    if (n == 1) return;
    if (is_probable_prime(n)) {
        out[n] += 1;
        return;
    }
    BigInt d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

} // namespace detail

// Full factorization of |n|, as a sorted (prime -> exponent) map.  Small
// primes are stripped by trial division first; Pollard rho handles the rest.
// Intended for the desk-scale integers this library produces (norms,
// denominators, group orders), not for cryptographic sizes.
inline std::map<BigInt, long> factor_int(const BigInt& n_in) {
    std::map<BigInt, long> out;
    BigInt n = abs(n_in);
    require(sgn(n) != 0, errc::zero_element, "factor of zero");
    for (unsigned long p : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul, 17ul, 19ul, 23ul, 29ul, 31ul, 37ul}) {
        while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            out[BigInt(p)] += 1;
            n /= static_cast<unsigned long>(p);
        }
    }
    // continue trial division a bit further before handing to rho
    BigInt trial = 41;
    while (n != 1 && trial * trial <= n && trial < 100000) {
        while (mpz_divisible_p(n.get_mpz_t(), trial.get_mpz_t())) {
            out[trial] += 1;
            n /= trial;
        }
        trial = next_prime_above(trial);
    }
    if (n != 1) detail::factor_rec(n, out);
    return out;
}

inline std::vector<BigInt> prime_divisors(const BigInt& n) {
    std::vector<BigInt> out;
    if (cmp(abs(n), 1) <= 0) return out;
    for (auto& [p, e] : factor_int(n)) out.push_back(p);
    return out;
}

// Writes q = p^f with p prime, f >= 1.  Errors out when q is not a prime
// power; norms of prime ideals are always of this shape.
inline void split_prime_power(const BigInt& q, BigInt& p, long& f) {
    require(cmp(q, 1) > 0, errc::invalid_argument, "prime power must exceed 1");
    auto fac = factor_int(q);
    require(fac.size() == 1, errc::invalid_argument, q.get_str() + " is not a prime power");
    p = fac.begin()->first;
    f = fac.begin()->second;
}

// Sorted list of all divisors of n > 0 (desk scale: intended for group
// orders and gcds of such, where the divisor count stays small).
inline std::vector<BigInt> all_divisors(const BigInt& n) {
    auto fac = factor_int(n);
    std::vector<BigInt> divs{BigInt(1)};
    for (auto& [p, e] : fac) {
        std::vector<BigInt> next;
        BigInt pk = 1;
        for (long k = 0; k <= e; ++k) {
            for (auto& d : divs) next.push_back(d * pk);
            pk *= p;
        }
        divs.swap(next);
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

// lcm of denominators; handy for clearing a coordinate vector to Z.
inline BigInt common_denominator(const std::vector<BigRational>& v) {
    BigInt d = 1;
    for (auto& q : v) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), q.get_den().get_mpz_t());
    return d;
}

} // namespace ntheight
