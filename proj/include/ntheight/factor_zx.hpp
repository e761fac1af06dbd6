#pragma once

#include <map>
#include <set>
#include <vector>

#include "fp_poly.hpp"
#include "poly.hpp"

namespace ntheight {

namespace detail {

// --- arithmetic in (Z/m)[x] with coefficients kept in [0, m) ---------------

inline ZPoly zmod_reduce(const ZPoly& f, const BigInt& m) {
    std::vector<BigInt> c = f.coeffs();
    for (auto& v : c) {
        v %= m;
        if (sgn(v) < 0) v += m;
    }
    return ZPoly(std::move(c));
}

inline ZPoly zmod_mul(const ZPoly& a, const ZPoly& b, const BigInt& m) {
    return zmod_reduce(a * b, m);
}

// division by a monic divisor, valid over Z/m
inline void zmod_divrem_monic(const ZPoly& a, const ZPoly& b, const BigInt& m, ZPoly& q,
                              ZPoly& r) {
    require(b.is_monic(), errc::internal_error, "zmod division needs monic divisor");
    std::vector<BigInt> rem = a.coeffs();
    long db = b.degree(), da = a.degree();
    if (da < db) {
        q = ZPoly();
        r = a;
        return;
    }
    std::vector<BigInt> quot(da - db + 1, BigInt(0));
    for (long i = da; i >= db; --i) {
        BigInt f = rem[i] % m;
        if (sgn(f) < 0) f += m;
        if (sgn(f) == 0) {
            rem[i] = 0;
            continue;
        }
        quot[i - db] = f;
        for (long j = 0; j <= db; ++j) {
            rem[i - db + j] = (rem[i - db + j] - f * b.coeffs()[j]) % m;
            if (sgn(rem[i - db + j]) < 0) rem[i - db + j] += m;
        }
    }
    q = ZPoly(std::move(quot));
    r = zmod_reduce(ZPoly(std::move(rem)), m);
}

// lift coefficients to the symmetric range (-m/2, m/2]
inline ZPoly zmod_symmetric(const ZPoly& f, const BigInt& m) {
    std::vector<BigInt> c = f.coeffs();
    BigInt half = m / 2;
    for (auto& v : c) {
        v %= m;
        if (sgn(v) < 0) v += m;
        if (v > half) v -= m;
    }
    return ZPoly(std::move(c));
}

struct HenselPair {
    ZPoly g, h; // f = g*h mod modulus, both monic
    ZPoly s, t; // s*g + t*h = 1 mod modulus
    BigInt modulus;
};

// One quadratic step: modulus m -> m^2 (von zur Gathen & Gerhard 15.10).
inline void hensel_step(const ZPoly& f, HenselPair& P) {
    const BigInt m2 = P.modulus * P.modulus;
    ZPoly e = zmod_reduce(f - P.g * P.h, m2);
    ZPoly q, r;
    zmod_divrem_monic(zmod_mul(P.s, e, m2), P.h, m2, q, r);
    ZPoly gstar = zmod_reduce(P.g + zmod_mul(P.t, e, m2) + zmod_mul(q, P.g, m2), m2);
    ZPoly hstar = zmod_reduce(P.h + r, m2);
    ZPoly b = zmod_reduce(zmod_mul(P.s, gstar, m2) + zmod_mul(P.t, hstar, m2) - ZPoly::constant(1), m2);
    ZPoly c, d;
    zmod_divrem_monic(zmod_mul(P.s, b, m2), hstar, m2, c, d);
    ZPoly sstar = zmod_reduce(P.s - d, m2);
    ZPoly tstar = zmod_reduce(P.t - zmod_mul(P.t, b, m2) - zmod_mul(c, gstar, m2), m2);
    P.g = gstar;
    P.h = hstar;
    P.s = sstar;
    P.t = tstar;
    P.modulus = m2;
    require(zmod_reduce(f - P.g * P.h, m2).is_zero(), errc::internal_error, "hensel product drift");
}

// Lift the coprime factorization f = g*h mod p to modulus >= target.
inline HenselPair hensel_lift_pair(const ZPoly& f, const FpCtx& F, const FpPoly& g0,
                                   const FpPoly& h0, const BigInt& target) {
    FpPoly s0, t0;
    {
        FpPoly u;
        FpPoly gg = fp_gcdext_u(F, g0, h0, u); // u*g0 = gg mod h0
        require(gg.degree() == 0, errc::internal_error, "hensel factors not coprime");
        s0 = fp_scale(F, u, F.inv(gg.lc()));
        // t0 = (1 - s0 g0)/h0
        FpPoly num = fp_sub(F, FpPoly{{1}}, fp_mul(F, s0, g0));
        FpPoly q, r;
        fp_divrem(F, num, h0, q, r);
        require(r.is_zero(), errc::internal_error, "bezout cofactor not divisible");
        t0 = q;
    }
    HenselPair P{fp_lift(g0), fp_lift(h0), fp_lift(s0), fp_lift(t0),
                 BigInt(static_cast<unsigned long>(F.p))};
    while (P.modulus < target) hensel_step(f, P);
    return P;
}

// Lift all modular factors of monic squarefree f to the given modulus by
// peeling one factor at a time (pair lift against the symmetric cofactor).
inline std::vector<ZPoly> hensel_lift_all(const ZPoly& f, const FpCtx& F,
                                          const std::vector<FpPoly>& factors,
                                          const BigInt& target) {
    std::vector<ZPoly> lifted;
    ZPoly cur = f;
    for (size_t i = 0; i + 1 < factors.size(); ++i) {
        FpPoly g0 = factors[i];
        FpPoly h0{{1}};
        for (size_t j = i + 1; j < factors.size(); ++j) h0 = fp_mul(F, h0, factors[j]);
        HenselPair P = hensel_lift_pair(cur, F, g0, h0, target);
        lifted.push_back(zmod_reduce(P.g, target));
        cur = zmod_symmetric(P.h, target); // congruent to remaining product mod p
    }
    lifted.push_back(zmod_reduce(cur, target));
    return lifted;
}

inline BigInt mignotte_bound(const ZPoly& f) {
    BigInt sumsq = 0;
    for (auto& c : f.coeffs()) sumsq += c * c;
    BigInt norm2;
    mpz_sqrt(norm2.get_mpz_t(), sumsq.get_mpz_t());
    norm2 += 1;
    return (norm2 << static_cast<unsigned long>(f.degree() + 1)) + 1;
}

// exact division test over Z for a monic candidate divisor
inline bool z_divides_monic(const ZPoly& f, const ZPoly& g, ZPoly& quotient) {
    if (g.degree() < 0 || g.degree() > f.degree()) return false;
    std::vector<BigInt> rem = f.coeffs();
    long dg = g.degree();
    std::vector<BigInt> quot(f.degree() - dg + 1, BigInt(0));
    for (long i = f.degree(); i >= dg; --i) {
        BigInt c = rem[i];
        if (sgn(c) == 0) continue;
        quot[i - dg] = c;
        for (long j = 0; j <= dg; ++j) rem[i - dg + j] -= c * g.coeffs()[j];
    }
    for (long i = 0; i < dg; ++i)
        if (sgn(rem[i]) != 0) return false;
    quotient = ZPoly(std::move(quot));
    return true;
}

} // namespace detail

// Factors a monic squarefree integer polynomial into monic irreducibles over
// Z: factor mod several primes, prune by achievable factor-degree sets, then
// Hensel lift past the Mignotte bound and recombine.  Output sorted by
// (degree, coefficients).
inline std::vector<ZPoly> factor_monic_squarefree_z(const ZPoly& f) {
    require(f.is_monic(), errc::not_monic, "factorization requires a monic polynomial");
    long n = f.degree();
    if (n == 1) return {f};
    BigInt disc = discriminant_int(f);
    require(sgn(disc) != 0, errc::invalid_argument, "factorization requires squarefree input");

    struct ModData {
        unsigned long p;
        std::vector<FpPoly> factors;
    };
    std::vector<ModData> tried;
    std::set<long> degree_candidates; // achievable proper factor degrees, intersected
    bool first = true;
    BigInt p = 1;
    int usable = 0;
    while (usable < 4) {
        p = next_prime_above(p);
        if (mpz_divisible_p(disc.get_mpz_t(), p.get_mpz_t())) continue;
        FpCtx F(p.get_ui());
        auto factors = fp_factor_squarefree(F, fp_from(F, f));
        // subset sums of the factor degrees
        std::set<long> sums{0};
        for (auto& g : factors) {
            std::set<long> next = sums;
            for (long s : sums) next.insert(s + g.degree());
            sums.swap(next);
        }
        sums.erase(0);
        sums.erase(n);
        if (first) {
            degree_candidates = sums;
            first = false;
        } else {
            std::set<long> inter;
            for (long d : degree_candidates)
                if (sums.count(d)) inter.insert(d);
            degree_candidates.swap(inter);
        }
        tried.push_back({p.get_ui(), std::move(factors)});
        ++usable;
        if (degree_candidates.empty()) return {f}; // irreducible
    }

    // recombine at the prime with the fewest modular factors
    auto best = std::min_element(tried.begin(), tried.end(), [](const ModData& a, const ModData& b) {
        return a.factors.size() < b.factors.size();
    });
    FpCtx F(best->p);
    BigInt bound = detail::mignotte_bound(f);
    BigInt target = BigInt(static_cast<unsigned long>(best->p));
    while (target <= 2 * bound) target *= target;
    std::vector<ZPoly> lifted = detail::hensel_lift_all(f, F, best->factors, target);

    std::vector<ZPoly> out;
    ZPoly rest = f;
    std::vector<bool> used(lifted.size(), false);
    size_t live = lifted.size();
    for (size_t take = 1; take * 2 <= live;) {
        bool found = false;
        // enumerate index subsets of size `take` over unused factors
        std::vector<size_t> avail;
        for (size_t i = 0; i < lifted.size(); ++i)
            if (!used[i]) avail.push_back(i);
        std::vector<size_t> idx(take);
        for (size_t i = 0; i < take; ++i) idx[i] = i;
        while (true) {
            long degsum = 0;
            for (size_t i : idx) degsum += lifted[avail[i]].degree();
            if (degree_candidates.empty() || degree_candidates.count(degsum) || degsum == rest.degree()) {
                ZPoly cand = ZPoly::constant(1);
                for (size_t i : idx) cand = detail::zmod_mul(cand, lifted[avail[i]], target);
                cand = detail::zmod_symmetric(cand, target);
                ZPoly quot;
                if (detail::z_divides_monic(rest, cand, quot)) {
                    out.push_back(cand);
                    rest = quot;
                    for (size_t i : idx) used[avail[i]] = true;
                    live -= take;
                    found = true;
                    break;
                }
            }
            // next subset
            long k = static_cast<long>(take) - 1;
            while (k >= 0 && idx[k] == avail.size() - take + k) --k;
            if (k < 0) break;
            ++idx[k];
            for (size_t j = k + 1; j < take; ++j) idx[j] = idx[j - 1] + 1;
        }
        if (!found) ++take;
    }
    if (rest.degree() >= 1) out.push_back(rest);
    std::sort(out.begin(), out.end(), [](const ZPoly& a, const ZPoly& b) {
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        for (size_t i = a.coeffs().size(); i-- > 0;)
            if (a.coeffs()[i] != b.coeffs()[i]) return a.coeffs()[i] < b.coeffs()[i];
        return false;
    });
    return out;
}

// Monic, not necessarily squarefree: returns (irreducible, multiplicity).
inline std::vector<std::pair<ZPoly, long>> factor_monic_z(const ZPoly& f) {
    require(f.is_monic(), errc::not_monic, "factorization requires a monic polynomial");
    QPoly fq = to_qpoly(f);
    QPoly g = poly_gcd(fq, fq.derivative());
    std::map<std::vector<BigInt>, long> acc;
    if (g.degree() == 0) {
        for (auto& h : factor_monic_squarefree_z(f)) acc[h.coeffs()] += 1;
    } else {
        QPoly sf = fq / g;
        ZPoly sfz = to_primitive(sf);
        for (auto& h : factor_monic_squarefree_z(sfz)) {
            // multiplicity by repeated exact division
            long mult = 0;
            ZPoly cur = f, quot;
            while (detail::z_divides_monic(cur, h, quot)) {
                ++mult;
                cur = quot;
            }
            acc[h.coeffs()] += mult;
        }
    }
    std::vector<std::pair<ZPoly, long>> out;
    for (auto& [c, m] : acc) out.emplace_back(ZPoly(c), m);
    return out;
}

inline bool is_irreducible_z(const ZPoly& f) {
    require(f.is_monic(), errc::not_monic, "irreducibility test requires a monic polynomial");
    if (f.degree() == 1) return true;
    QPoly fq = to_qpoly(f);
    if (poly_gcd(fq, fq.derivative()).degree() != 0) return false;
    return factor_monic_squarefree_z(f).size() == 1;
}

// Squarefree rational polynomial, any leading coefficient: returns monic
// irreducible factors over Q.  Reduces to the monic integer case through
// y = lc*x (so G(y) = lc^(d-1) f(y/lc) is monic over Z).
inline std::vector<QPoly> factor_squarefree_q(const QPoly& f) {
    require(f.degree() >= 1, errc::invalid_argument, "factoring a constant");
    ZPoly prim = to_primitive(f);
    long d = prim.degree();
    BigInt c = prim.lc();
    std::vector<BigInt> g(d + 1);
    g[d] = 1;
    BigInt pw = 1; // c^(d-1-i), walking down from i = d-1
    for (long i = d - 1; i >= 0; --i) {
        g[i] = prim.coeff(i) * pw;
        pw *= c;
    }
    std::vector<QPoly> out;
    for (const auto& Gk : factor_monic_squarefree_z(ZPoly(g))) {
        // map back through x = y/c and rescale to a monic rational factor
        std::vector<BigRational> h(Gk.degree() + 1);
        BigRational cw(1);
        for (long i = 0; i <= Gk.degree(); ++i) {
            h[i] = BigRational(Gk.coeff(i)) * cw;
            cw *= c;
        }
        QPoly hk(h);
        out.push_back(hk * (BigRational(1) / hk.lc()));
    }
    return out;
}

} // namespace ntheight
