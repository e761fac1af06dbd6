#pragma once

#include <cstdint>
#include <vector>

#include "poly.hpp"

namespace ntheight {

// Arithmetic mod a word-sized prime.  Primes above 2^31 are refused up
// front; every prime this library feeds in (Dedekind splitting, residue
// fields, Hensel base steps) is far below that.
struct FpCtx {
    uint64_t p;

    explicit FpCtx(uint64_t p_) : p(p_) {
        require(p >= 2 && p < (1ull << 31), errc::cap_exceeded, "prime out of word range");
    }
    uint64_t add(uint64_t a, uint64_t b) const {
        uint64_t s = a + b;
        return s >= p ? s - p : s;
    }
    uint64_t sub(uint64_t a, uint64_t b) const { return a >= b ? a - b : a + p - b; }
    uint64_t neg(uint64_t a) const { return a ? p - a : 0; }
    uint64_t mul(uint64_t a, uint64_t b) const {
        return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
    }
    uint64_t pow(uint64_t a, uint64_t e) const {
        uint64_t r = 1;
        a %= p;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    uint64_t inv(uint64_t a) const {
        require(a % p != 0, errc::zero_element, "inverse of zero mod p");
        return pow(a % p, p - 2);
    }
    uint64_t reduce(const BigInt& n) const {
        BigInt r = n % static_cast<unsigned long>(p);
        if (sgn(r) < 0) r += static_cast<unsigned long>(p);
        return r.get_ui();
    }
};

// Dense polynomial over F_p, constant term first, no trailing zeros.
struct FpPoly {
    std::vector<uint64_t> c;

    bool is_zero() const { return c.empty(); }
    long degree() const { return static_cast<long>(c.size()) - 1; }
    uint64_t lc() const { return c.back(); }
    uint64_t coeff(size_t i) const { return i < c.size() ? c[i] : 0; }
    void normalize() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    bool operator==(const FpPoly& o) const { return c == o.c; }
    bool operator<(const FpPoly& o) const {
        if (c.size() != o.c.size()) return c.size() < o.c.size();
        for (size_t i = c.size(); i-- > 0;)
            if (c[i] != o.c[i]) return c[i] < o.c[i];
        return false;
    }
};

inline FpPoly fp_from(const FpCtx& F, const ZPoly& f) {
    FpPoly out;
    out.c.reserve(f.coeffs().size());
    for (auto& v : f.coeffs()) out.c.push_back(F.reduce(v));
    out.normalize();
    return out;
}

inline ZPoly fp_lift(const FpPoly& f) {
    std::vector<BigInt> c;
    c.reserve(f.c.size());
    for (auto v : f.c) c.emplace_back(static_cast<unsigned long>(v));
    return ZPoly(std::move(c));
}

inline FpPoly fp_x() { return FpPoly{{0, 1}}; }

inline FpPoly fp_add(const FpCtx& F, const FpPoly& a, const FpPoly& b) {
    FpPoly r;
    r.c.assign(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = F.add(a.coeff(i), b.coeff(i));
    r.normalize();
    return r;
}

inline FpPoly fp_sub(const FpCtx& F, const FpPoly& a, const FpPoly& b) {
    FpPoly r;
    r.c.assign(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = F.sub(a.coeff(i), b.coeff(i));
    r.normalize();
    return r;
}

inline FpPoly fp_mul(const FpCtx& F, const FpPoly& a, const FpPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    FpPoly r;
    r.c.assign(a.c.size() + b.c.size() - 1, 0);
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (!a.c[i]) continue;
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = F.add(r.c[i + j], F.mul(a.c[i], b.c[j]));
    }
    r.normalize();
    return r;
}

inline FpPoly fp_scale(const FpCtx& F, const FpPoly& a, uint64_t s) {
    FpPoly r = a;
    for (auto& v : r.c) v = F.mul(v, s);
    r.normalize();
    return r;
}

inline void fp_divrem(const FpCtx& F, const FpPoly& a, const FpPoly& b, FpPoly& q, FpPoly& r) {
    require(!b.is_zero(), errc::zero_element, "mod-p division by zero polynomial");
    r = a;
    q = {};
    long db = b.degree();
    if (a.degree() < db) return;
    q.c.assign(a.degree() - db + 1, 0);
    uint64_t inv_lc = F.inv(b.lc());
    for (long i = a.degree(); i >= db; --i) {
        uint64_t top = r.coeff(i);
        if (!top) continue;
        uint64_t f = F.mul(top, inv_lc);
        q.c[i - db] = f;
        for (long j = 0; j <= db; ++j) r.c[i - db + j] = F.sub(r.c[i - db + j], F.mul(f, b.c[j]));
    }
    q.normalize();
    r.normalize();
}

inline FpPoly fp_rem(const FpCtx& F, const FpPoly& a, const FpPoly& b) {
    FpPoly q, r;
    fp_divrem(F, a, b, q, r);
    return r;
}

inline FpPoly fp_monic(const FpCtx& F, const FpPoly& a) {
    if (a.is_zero() || a.lc() == 1) return a;
    return fp_scale(F, a, F.inv(a.lc()));
}

inline FpPoly fp_gcd(const FpCtx& F, FpPoly a, FpPoly b) {
    while (!b.is_zero()) {
        FpPoly r = fp_rem(F, a, b);
        a = b;
        b = r;
    }
    return fp_monic(F, a);
}

// extended gcd: returns g and writes u with u*a = g mod b (enough for inverses)
inline FpPoly fp_gcdext_u(const FpCtx& F, FpPoly a, FpPoly b, FpPoly& u_out) {
    FpPoly u{{1}}, v{};
    FpPoly r0 = a, r1 = b;
    FpPoly u1{};
    // invariant: u * a = r0 (mod b_orig), u1 * a = r1 (mod b_orig)
    while (!r1.is_zero()) {
        FpPoly q, r;
        fp_divrem(F, r0, r1, q, r);
        FpPoly u2 = fp_sub(F, u, fp_mul(F, q, u1));
        r0 = r1;
        r1 = r;
        u = u1;
        u1 = u2;
    }
    u_out = u;
    return r0;
}

inline FpPoly fp_invmod(const FpCtx& F, const FpPoly& a, const FpPoly& m) {
    FpPoly u;
    FpPoly g = fp_gcdext_u(F, fp_rem(F, a, m), m, u);
    require(g.degree() == 0, errc::zero_element, "non-invertible element mod polynomial");
    return fp_rem(F, fp_scale(F, u, F.inv(g.lc())), m);
}

inline FpPoly fp_mulmod(const FpCtx& F, const FpPoly& a, const FpPoly& b, const FpPoly& m) {
    return fp_rem(F, fp_mul(F, a, b), m);
}

inline FpPoly fp_powmod(const FpCtx& F, FpPoly base, const BigInt& e, const FpPoly& m) {
    FpPoly r{{1}};
    base = fp_rem(F, base, m);
    for (long i = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)); i-- > 0;) {
        r = fp_mulmod(F, r, r, m);
        if (mpz_tstbit(e.get_mpz_t(), i)) r = fp_mulmod(F, r, base, m);
    }
    return r;
}

inline FpPoly fp_derivative(const FpCtx& F, const FpPoly& a) {
    FpPoly r;
    if (a.c.size() <= 1) return r;
    r.c.resize(a.c.size() - 1);
    for (size_t i = 1; i < a.c.size(); ++i) r.c[i - 1] = F.mul(a.c[i], i % F.p);
    r.normalize();
    return r;
}

inline uint64_t fp_eval(const FpCtx& F, const FpPoly& a, uint64_t x) {
    uint64_t acc = 0;
    for (size_t i = a.c.size(); i-- > 0;) acc = F.add(F.mul(acc, x), a.c[i]);
    return acc;
}

namespace detail {

// Deterministic splitting randomness: factorization results must be
// reproducible run to run, so the stream is seeded from the inputs.
struct SplitRng {
    uint64_t s;
    explicit SplitRng(uint64_t seed) : s(seed ^ 0x9e3779b97f4a7c15ull) {}
    uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
};

inline uint64_t fp_poly_seed(const FpCtx& F, const FpPoly& f) {
    uint64_t h = 1469598103934665603ull ^ F.p;
    for (auto v : f.c) h = (h ^ v) * 1099511628211ull;
    return h;
}

inline FpPoly random_poly(const FpCtx& F, SplitRng& rng, long deg) {
    FpPoly r;
    r.c.resize(deg + 1);
    for (auto& v : r.c) v = rng.next() % F.p;
    r.normalize();
    return r;
}

// equal-degree splitting of a squarefree product of degree-d irreducibles
inline void fp_edf(const FpCtx& F, const FpPoly& f, long d, SplitRng& rng,
                   std::vector<FpPoly>& out) {
    if (f.degree() == d) {
        out.push_back(fp_monic(F, f));
        return;
    }
    BigInt q = BigInt(static_cast<unsigned long>(F.p));
    FpPoly split;
    for (int attempt = 0; attempt < 256; ++attempt) {
        FpPoly u = random_poly(F, rng, f.degree() - 1);
        if (u.is_zero()) continue;
        FpPoly g;
        if (F.p == 2) {
            // trace map u + u^2 + u^4 + ... over F_{2^d}
            FpPoly t = u, acc = u;
            for (long i = 1; i < d; ++i) {
                t = fp_mulmod(F, t, t, f);
                acc = fp_add(F, acc, t);
            }
            g = fp_gcd(F, acc, f);
        } else {
            BigInt e = (pow_int(q, static_cast<unsigned long>(d)) - 1) / 2;
            FpPoly h = fp_powmod(F, u, e, f);
            h = fp_sub(F, h, FpPoly{{1}});
            g = fp_gcd(F, h, f);
        }
        if (g.degree() > 0 && g.degree() < f.degree()) {
            split = g;
            break;
        }
    }
    require(!split.is_zero(), errc::internal_error, "equal-degree splitting stalled");
    FpPoly co, rem;
    fp_divrem(F, f, split, co, rem);
    require(rem.is_zero(), errc::internal_error, "equal-degree split not a divisor");
    fp_edf(F, split, d, rng, out);
    fp_edf(F, co, d, rng, out);
}

} // namespace detail

// Factors a squarefree monic polynomial over F_p into monic irreducibles,
// sorted (degree, then lexicographic) so output order is deterministic.
inline std::vector<FpPoly> fp_factor_squarefree(const FpCtx& F, FpPoly f) {
    require(!f.is_zero() && f.degree() >= 1, errc::invalid_argument, "factor of constant");
    f = fp_monic(F, f);
    {
        FpPoly g = fp_gcd(F, f, fp_derivative(F, f));
        require(g.degree() == 0, errc::invalid_argument, "factorization requires squarefree input");
    }
    detail::SplitRng rng(detail::fp_poly_seed(F, f));
    std::vector<FpPoly> out;
    // distinct-degree stage
    FpPoly h = fp_x();
    FpPoly rest = f;
    for (long d = 1; rest.degree() >= 1 && d <= rest.degree(); ++d) {
        h = fp_powmod(F, h, BigInt(static_cast<unsigned long>(F.p)), rest);
        FpPoly g = fp_gcd(F, fp_sub(F, h, fp_x()), rest);
        if (g.degree() > 0) {
            detail::fp_edf(F, g, d, rng, out);
            FpPoly q, r;
            fp_divrem(F, rest, g, q, r);
            require(r.is_zero(), errc::internal_error, "distinct-degree division failed");
            rest = q;
            h = fp_rem(F, h, rest);
        }
        if (2 * (d + 1) > rest.degree()) break;
    }
    if (rest.degree() >= 1) out.push_back(fp_monic(F, rest));
    std::sort(out.begin(), out.end());
    return out;
}

inline bool fp_is_irreducible(const FpCtx& F, const FpPoly& f) {
    if (f.degree() <= 0) return false;
    FpPoly g = fp_gcd(F, f, fp_derivative(F, f));
    if (g.degree() != 0) return f.degree() == 1;
    return fp_factor_squarefree(F, f).size() == 1;
}

// Roots in F_p of an arbitrary nonzero polynomial; simple_only filters by
// f'(r) != 0.  Sorted ascending.
inline std::vector<uint64_t> fp_roots(const FpCtx& F, const FpPoly& f, bool simple_only) {
    require(!f.is_zero(), errc::zero_element, "roots of zero polynomial");
    // strip repeated factors, then split off the degree-1 part of x^p - x
    FpPoly d = fp_derivative(F, f);
    FpPoly sf = f;
    if (!d.is_zero()) {
        FpPoly g = fp_gcd(F, f, d);
        if (g.degree() > 0) {
            FpPoly q, r;
            fp_divrem(F, f, g, q, r);
            sf = q;
        }
    } else {
        // f = h(x^p); every root is multiple
        if (simple_only) return {};
        sf = fp_gcd(F, fp_sub(F, fp_powmod(F, fp_x(), BigInt(static_cast<unsigned long>(F.p)), f), fp_x()), f);
    }
    FpPoly xq = fp_powmod(F, fp_x(), BigInt(static_cast<unsigned long>(F.p)), sf);
    FpPoly lin = fp_gcd(F, fp_sub(F, xq, fp_x()), sf);
    std::vector<uint64_t> roots;
    if (lin.degree() >= 1) {
        for (auto& factor : fp_factor_squarefree(F, lin)) {
            if (factor.degree() != 1) continue;
            uint64_t r = F.neg(factor.c[0]);
            roots.push_back(r);
        }
    }
    if (simple_only) {
        FpPoly df = fp_derivative(F, f);
        std::vector<uint64_t> simple;
        for (auto r : roots)
            if (fp_eval(F, df, r) != 0) simple.push_back(r);
        roots = std::move(simple);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

// ---------------------------------------------------------------------------
// Small finite fields F_q = F_p[t]/(m), used as residue fields of unramified
// primes.  q stays <= 1e6 (exhaustive point counts), so dense word vectors
// are plenty.

struct FqCtx {
    FpCtx F;
    FpPoly modulus; // monic irreducible, degree f >= 1
    long f;
    BigInt q;

    FqCtx(uint64_t p, FpPoly m) : F(p), modulus(std::move(m)), f(modulus.degree()) {
        require(f >= 1, errc::invalid_argument, "residue field modulus must be nonconstant");
        q = pow_int(BigInt(static_cast<unsigned long>(p)), static_cast<unsigned long>(f));
    }
};

// Elements are coefficient vectors of length ctx.f (constant first).
using FqElem = std::vector<uint64_t>;

inline FqElem fq_zero(const FqCtx& K) { return FqElem(K.f, 0); }
inline FqElem fq_one(const FqCtx& K) {
    FqElem e(K.f, 0);
    e[0] = 1;
    return e;
}
inline bool fq_is_zero(const FqElem& a) {
    for (auto v : a)
        if (v) return false;
    return true;
}
inline FqElem fq_from_scalar(const FqCtx& K, uint64_t s) {
    FqElem e(K.f, 0);
    e[0] = s % K.F.p;
    return e;
}
inline FqElem fq_add(const FqCtx& K, const FqElem& a, const FqElem& b) {
    FqElem r(K.f);
    for (long i = 0; i < K.f; ++i) r[i] = K.F.add(a[i], b[i]);
    return r;
}
inline FqElem fq_sub(const FqCtx& K, const FqElem& a, const FqElem& b) {
    FqElem r(K.f);
    for (long i = 0; i < K.f; ++i) r[i] = K.F.sub(a[i], b[i]);
    return r;
}
inline FqElem fq_neg(const FqCtx& K, const FqElem& a) {
    FqElem r(K.f);
    for (long i = 0; i < K.f; ++i) r[i] = K.F.neg(a[i]);
    return r;
}
inline FqElem fq_mul(const FqCtx& K, const FqElem& a, const FqElem& b) {
    FpPoly pa{std::vector<uint64_t>(a)}, pb{std::vector<uint64_t>(b)};
    pa.normalize();
    pb.normalize();
    FpPoly prod = fp_rem(K.F, fp_mul(K.F, pa, pb), K.modulus);
    FqElem r(K.f, 0);
    for (size_t i = 0; i < prod.c.size(); ++i) r[i] = prod.c[i];
    return r;
}
inline FqElem fq_inv(const FqCtx& K, const FqElem& a) {
    FpPoly pa{std::vector<uint64_t>(a)};
    pa.normalize();
    FpPoly inv = fp_invmod(K.F, pa, K.modulus);
    FqElem r(K.f, 0);
    for (size_t i = 0; i < inv.c.size(); ++i) r[i] = inv.c[i];
    return r;
}
inline FqElem fq_pow(const FqCtx& K, FqElem a, const BigInt& e) {
    FqElem r = fq_one(K);
    for (long i = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)); i-- > 0;) {
        r = fq_mul(K, r, r);
        if (mpz_tstbit(e.get_mpz_t(), i)) r = fq_mul(K, r, a);
    }
    return r;
}

// Radix-p index in [0, q); doubles as a deterministic enumeration order.
inline uint64_t fq_index(const FqCtx& K, const FqElem& a) {
    uint64_t idx = 0;
    for (long i = K.f; i-- > 0;) idx = idx * K.F.p + a[i];
    return idx;
}
inline FqElem fq_from_index(const FqCtx& K, uint64_t idx) {
    FqElem a(K.f);
    for (long i = 0; i < K.f; ++i) {
        a[i] = idx % K.F.p;
        idx /= K.F.p;
    }
    return a;
}

} // namespace ntheight
