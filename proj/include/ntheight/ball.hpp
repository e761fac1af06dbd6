#pragma once

#include <mpfr.h>

#include <string>
#include <utility>

#include "poly.hpp"

namespace ntheight {

// Thin RAII wrapper over mpfr_t.  All operations take explicit precision and
// rounding, because the enclosure code below needs directed rounding to stay
// honest.  Nothing here is performance critical; clarity wins.
class Bf {
  public:
    explicit Bf(mpfr_prec_t prec = 64) {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    Bf(const Bf& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Bf(Bf&& o) noexcept {
        mpfr_init2(v_, 2);
        mpfr_swap(v_, o.v_);
    }
    Bf& operator=(const Bf& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Bf& operator=(Bf&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Bf() { mpfr_clear(v_); }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

    static Bf of_long(long x, mpfr_prec_t prec) {
        Bf r(prec);
        mpfr_set_si(r.v_, x, MPFR_RNDN);
        return r;
    }
    static Bf of_double(double x, mpfr_prec_t prec) {
        Bf r(prec);
        mpfr_set_d(r.v_, x, MPFR_RNDN);
        return r;
    }
    static Bf of_int(const BigInt& x, mpfr_prec_t prec, mpfr_rnd_t rnd) {
        Bf r(prec);
        mpfr_set_z(r.v_, x.get_mpz_t(), rnd);
        return r;
    }
    static Bf of_rat(const BigRational& x, mpfr_prec_t prec, mpfr_rnd_t rnd) {
        Bf r(prec);
        mpfr_set_q(r.v_, x.get_mpq_t(), rnd);
        return r;
    }

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    std::string str(size_t digits = 20) const {
        char* s = nullptr;
        mpfr_asprintf(&s, "%.*Rg", static_cast<int>(digits), v_);
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

  private:
    mpfr_t v_;
};

inline int bf_cmp(const Bf& a, const Bf& b) { return mpfr_cmp(a.raw(), b.raw()); }

#define NTHEIGHT_BF_BINOP(name, fn)                                                  \
    inline Bf name(const Bf& a, const Bf& b, mpfr_prec_t prec, mpfr_rnd_t rnd) {     \
        Bf r(prec);                                                                  \
        fn(r.raw(), a.raw(), b.raw(), rnd);                                          \
        return r;                                                                    \
    }
NTHEIGHT_BF_BINOP(bf_add, mpfr_add)
NTHEIGHT_BF_BINOP(bf_sub, mpfr_sub)
NTHEIGHT_BF_BINOP(bf_mul, mpfr_mul)
NTHEIGHT_BF_BINOP(bf_div, mpfr_div)
NTHEIGHT_BF_BINOP(bf_hypot, mpfr_hypot)
#undef NTHEIGHT_BF_BINOP

#define NTHEIGHT_BF_UNOP(name, fn)                                                   \
    inline Bf name(const Bf& a, mpfr_prec_t prec, mpfr_rnd_t rnd) {                  \
        Bf r(prec);                                                                  \
        fn(r.raw(), a.raw(), rnd);                                                   \
        return r;                                                                    \
    }
NTHEIGHT_BF_UNOP(bf_neg, mpfr_neg)
NTHEIGHT_BF_UNOP(bf_abs, mpfr_abs)
NTHEIGHT_BF_UNOP(bf_log, mpfr_log)
NTHEIGHT_BF_UNOP(bf_sqrt, mpfr_sqrt)
NTHEIGHT_BF_UNOP(bf_exp, mpfr_exp)
#undef NTHEIGHT_BF_UNOP

inline Bf bf_mul_long(const Bf& a, long s, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    Bf r(prec);
    mpfr_mul_si(r.raw(), a.raw(), s, rnd);
    return r;
}

inline Bf bf_pow2(long e, mpfr_prec_t prec) {
    Bf r(prec);
    mpfr_set_ui_2exp(r.raw(), 1, e, MPFR_RNDU);
    return r;
}

// Upper bound on the rounding error of a correctly rounded result at
// precision p: one full ulp (a factor two of slack over the true half-ulp).
// An exact zero from a correctly rounded op means the true value was zero.
inline Bf bf_ulp(const Bf& x) {
    if (x.is_zero()) return Bf(32);
    return bf_pow2(mpfr_get_exp(x.raw()) - x.prec() + 1, 32);
}

// Radius arithmetic runs at fixed small precision, always rounding up.
inline constexpr mpfr_prec_t kRadPrec = 48;

// --- real intervals [lo, hi], directed rounding -----------------------------

struct Iv {
    Bf lo, hi;

    static Iv point_rat(const BigRational& q, mpfr_prec_t prec) {
        return {Bf::of_rat(q, prec, MPFR_RNDD), Bf::of_rat(q, prec, MPFR_RNDU)};
    }
    static Iv point_int(const BigInt& z, mpfr_prec_t prec) {
        return {Bf::of_int(z, prec, MPFR_RNDD), Bf::of_int(z, prec, MPFR_RNDU)};
    }
    static Iv zero(mpfr_prec_t prec) { return {Bf(prec), Bf(prec)}; }

    mpfr_prec_t prec() const { return lo.prec(); }
    bool contains_zero() const { return lo.sign() <= 0 && hi.sign() >= 0; }
    double mid() const { return (lo.to_double() + hi.to_double()) / 2; }
    double width() const {
        Bf w = bf_sub(hi, lo, kRadPrec, MPFR_RNDU);
        return w.to_double();
    }
};

inline Iv iv_add(const Iv& a, const Iv& b, mpfr_prec_t prec) {
    return {bf_add(a.lo, b.lo, prec, MPFR_RNDD), bf_add(a.hi, b.hi, prec, MPFR_RNDU)};
}

inline Iv iv_sub(const Iv& a, const Iv& b, mpfr_prec_t prec) {
    return {bf_sub(a.lo, b.hi, prec, MPFR_RNDD), bf_sub(a.hi, b.lo, prec, MPFR_RNDU)};
}

inline Iv iv_neg(const Iv& a, mpfr_prec_t prec) {
    return {bf_neg(a.hi, prec, MPFR_RNDD), bf_neg(a.lo, prec, MPFR_RNDU)};
}

inline Iv iv_mul_long(const Iv& a, long s, mpfr_prec_t prec) {
    if (s >= 0) return {bf_mul_long(a.lo, s, prec, MPFR_RNDD), bf_mul_long(a.hi, s, prec, MPFR_RNDU)};
    return {bf_mul_long(a.hi, s, prec, MPFR_RNDD), bf_mul_long(a.lo, s, prec, MPFR_RNDU)};
}

inline Iv iv_mul_rat(const Iv& a, const BigRational& s, mpfr_prec_t prec) {
    Bf sl = Bf::of_rat(s, prec, MPFR_RNDD), su = Bf::of_rat(s, prec, MPFR_RNDU);
    if (sgn(s) >= 0) return {bf_mul(a.lo, sl, prec, MPFR_RNDD), bf_mul(a.hi, su, prec, MPFR_RNDU)};
    return {bf_mul(a.hi, su, prec, MPFR_RNDD), bf_mul(a.lo, sl, prec, MPFR_RNDU)};
}

// log over a strictly positive interval
inline Iv iv_log_pos(const Iv& a, mpfr_prec_t prec) {
    require(a.lo.sign() > 0, errc::precision_exhausted,
            "interval touches zero; cannot take a certified log");
    return {bf_log(a.lo, prec, MPFR_RNDD), bf_log(a.hi, prec, MPFR_RNDU)};
}

// max(interval, 1): used for log^+ contributions
inline Iv iv_max1(const Iv& a, mpfr_prec_t prec) {
    Bf one = Bf::of_long(1, prec);
    Iv r = a;
    if (bf_cmp(r.lo, one) < 0) r.lo = one;
    if (bf_cmp(r.hi, one) < 0) r.hi = one;
    return r;
}

inline Iv iv_exp(const Iv& a, mpfr_prec_t prec) {
    return {bf_exp(a.lo, prec, MPFR_RNDD), bf_exp(a.hi, prec, MPFR_RNDU)};
}

// a*b for intervals known to be nonnegative (absolute values, heights)
inline Iv iv_mul_nonneg(const Iv& a, const Iv& b, mpfr_prec_t prec) {
    require(a.lo.sign() >= 0 && b.lo.sign() >= 0, errc::internal_error,
            "iv_mul_nonneg on a signed interval");
    return {bf_mul(a.lo, b.lo, prec, MPFR_RNDD), bf_mul(a.hi, b.hi, prec, MPFR_RNDU)};
}

// general signed product: min/max over the four endpoint products
inline Iv iv_mul(const Iv& a, const Iv& b, mpfr_prec_t prec) {
    Bf cands_lo[4] = {bf_mul(a.lo, b.lo, prec, MPFR_RNDD), bf_mul(a.lo, b.hi, prec, MPFR_RNDD),
                      bf_mul(a.hi, b.lo, prec, MPFR_RNDD), bf_mul(a.hi, b.hi, prec, MPFR_RNDD)};
    Bf cands_hi[4] = {bf_mul(a.lo, b.lo, prec, MPFR_RNDU), bf_mul(a.lo, b.hi, prec, MPFR_RNDU),
                      bf_mul(a.hi, b.lo, prec, MPFR_RNDU), bf_mul(a.hi, b.hi, prec, MPFR_RNDU)};
    Iv r{std::move(cands_lo[0]), std::move(cands_hi[0])};
    for (int i = 1; i < 4; ++i) {
        if (bf_cmp(cands_lo[i], r.lo) < 0) r.lo = std::move(cands_lo[i]);
        if (bf_cmp(cands_hi[i], r.hi) > 0) r.hi = std::move(cands_hi[i]);
    }
    return r;
}

inline Iv iv_abs(const Iv& a, mpfr_prec_t prec) {
    if (a.lo.sign() >= 0) return a;
    if (a.hi.sign() <= 0) return iv_neg(a, prec);
    Bf hi = bf_neg(a.lo, prec, MPFR_RNDU);
    if (bf_cmp(a.hi, hi) > 0) hi = a.hi;
    return {Bf(prec), std::move(hi)};
}

inline Iv iv_max(const Iv& a, const Iv& b) {
    Iv r = a;
    if (bf_cmp(b.lo, r.lo) > 0) r.lo = b.lo;
    if (bf_cmp(b.hi, r.hi) > 0) r.hi = b.hi;
    return r;
}

// a/b where b is strictly positive
inline Iv iv_div_pos(const Iv& a, const Iv& b, mpfr_prec_t prec) {
    require(b.lo.sign() > 0, errc::precision_exhausted,
            "divisor interval touches zero");
    Bf lo = bf_div(a.lo, a.lo.sign() >= 0 ? b.hi : b.lo, prec, MPFR_RNDD);
    Bf hi = bf_div(a.hi, a.hi.sign() >= 0 ? b.lo : b.hi, prec, MPFR_RNDU);
    return {std::move(lo), std::move(hi)};
}

// --- complex disks: center (re, im) at working precision, radius rounded up --

struct CBall {
    Bf re, im;
    Bf rad{kRadPrec};

    static CBall exact_rat(const BigRational& x, mpfr_prec_t prec) {
        CBall b{Bf::of_rat(x, prec, MPFR_RNDN), Bf::of_long(0, prec)};
        b.rad = bf_ulp(b.re);
        return b;
    }
    static CBall of_centers(Bf re, Bf im) {
        CBall b{std::move(re), std::move(im)};
        b.rad = Bf(kRadPrec);
        return b;
    }
    mpfr_prec_t prec() const { return re.prec(); }
};

// upper bound on |center|
inline Bf cb_center_abs_ub(const CBall& z) { return bf_hypot(z.re, z.im, kRadPrec, MPFR_RNDU); }

// enclosure of |z| as a real interval (clamped at 0 from below)
inline Iv cb_abs(const CBall& z, mpfr_prec_t prec) {
    Bf up = bf_add(bf_hypot(z.re, z.im, prec, MPFR_RNDU), z.rad, prec, MPFR_RNDU);
    Bf lo = bf_sub(bf_hypot(z.re, z.im, prec, MPFR_RNDD), z.rad, prec, MPFR_RNDD);
    if (lo.sign() < 0) lo = Bf::of_long(0, prec);
    return {std::move(lo), std::move(up)};
}

inline CBall cb_add(const CBall& a, const CBall& b, mpfr_prec_t prec) {
    CBall r{bf_add(a.re, b.re, prec, MPFR_RNDN), bf_add(a.im, b.im, prec, MPFR_RNDN)};
    Bf slack = bf_add(bf_ulp(r.re), bf_ulp(r.im), kRadPrec, MPFR_RNDU);
    r.rad = bf_add(bf_add(a.rad, b.rad, kRadPrec, MPFR_RNDU), slack, kRadPrec, MPFR_RNDU);
    return r;
}

inline CBall cb_sub(const CBall& a, const CBall& b, mpfr_prec_t prec) {
    CBall r{bf_sub(a.re, b.re, prec, MPFR_RNDN), bf_sub(a.im, b.im, prec, MPFR_RNDN)};
    Bf slack = bf_add(bf_ulp(r.re), bf_ulp(r.im), kRadPrec, MPFR_RNDU);
    r.rad = bf_add(bf_add(a.rad, b.rad, kRadPrec, MPFR_RNDU), slack, kRadPrec, MPFR_RNDU);
    return r;
}

inline CBall cb_neg(const CBall& a, mpfr_prec_t prec) {
    CBall r{bf_neg(a.re, prec, MPFR_RNDN), bf_neg(a.im, prec, MPFR_RNDN)};
    r.rad = a.rad;
    return r;
}

// |z1 z2 - c1 c2| <= |c1| r2 + |c2| r1 + r1 r2, plus rounding slack for the
// four center products.
inline CBall cb_mul(const CBall& a, const CBall& b, mpfr_prec_t prec) {
    Bf t1 = bf_mul(a.re, b.re, prec, MPFR_RNDN);
    Bf t2 = bf_mul(a.im, b.im, prec, MPFR_RNDN);
    Bf t3 = bf_mul(a.re, b.im, prec, MPFR_RNDN);
    Bf t4 = bf_mul(a.im, b.re, prec, MPFR_RNDN);
    CBall r{bf_sub(t1, t2, prec, MPFR_RNDN), bf_add(t3, t4, prec, MPFR_RNDN)};
    Bf ca = cb_center_abs_ub(a), cb = cb_center_abs_ub(b);
    Bf cross = bf_add(bf_mul(ca, b.rad, kRadPrec, MPFR_RNDU), bf_mul(cb, a.rad, kRadPrec, MPFR_RNDU),
                      kRadPrec, MPFR_RNDU);
    cross = bf_add(cross, bf_mul(a.rad, b.rad, kRadPrec, MPFR_RNDU), kRadPrec, MPFR_RNDU);
    Bf slack = bf_add(bf_add(bf_ulp(t1), bf_ulp(t2), kRadPrec, MPFR_RNDU),
                      bf_add(bf_ulp(t3), bf_ulp(t4), kRadPrec, MPFR_RNDU), kRadPrec, MPFR_RNDU);
    slack = bf_add(slack, bf_add(bf_ulp(r.re), bf_ulp(r.im), kRadPrec, MPFR_RNDU), kRadPrec, MPFR_RNDU);
    r.rad = bf_add(cross, slack, kRadPrec, MPFR_RNDU);
    return r;
}

// 1/z for a disk strictly excluding zero: center 1/c, radius
// r / (|c| (|c| - r)) plus rounding slack.
inline CBall cb_inv(const CBall& a, mpfr_prec_t prec) {
    Bf ca_lo = bf_hypot(a.re, a.im, kRadPrec, MPFR_RNDD);
    Bf margin = bf_sub(ca_lo, a.rad, kRadPrec, MPFR_RNDD);
    require(margin.sign() > 0, errc::precision_exhausted, "complex disk straddles zero in inversion");
    Bf n2 = bf_add(bf_mul(a.re, a.re, prec, MPFR_RNDN), bf_mul(a.im, a.im, prec, MPFR_RNDN), prec,
                   MPFR_RNDN);
    CBall r{bf_div(a.re, n2, prec, MPFR_RNDN), bf_neg(bf_div(a.im, n2, prec, MPFR_RNDN), prec, MPFR_RNDN)};
    Bf denom = bf_mul(ca_lo, margin, kRadPrec, MPFR_RNDD);
    Bf prop = bf_div(a.rad, denom, kRadPrec, MPFR_RNDU);
    // center rounding: |c|^-1 ulps across the three roundings; bound crudely
    // by 8 ulps of the result components
    Bf slack = bf_mul_long(bf_add(bf_ulp(r.re), bf_ulp(r.im), kRadPrec, MPFR_RNDU), 8, kRadPrec,
                           MPFR_RNDU);
    r.rad = bf_add(prop, slack, kRadPrec, MPFR_RNDU);
    return r;
}

inline CBall cb_div(const CBall& a, const CBall& b, mpfr_prec_t prec) {
    return cb_mul(a, cb_inv(b, prec), prec);
}

inline CBall cb_pow_ui(const CBall& a, unsigned long e, mpfr_prec_t prec) {
    CBall r = CBall::exact_rat(BigRational(1), prec);
    CBall base = a;
    while (e) {
        if (e & 1) r = cb_mul(r, base, prec);
        e >>= 1;
        if (e) base = cb_mul(base, base, prec);
    }
    return r;
}

// Horner evaluation of an exact-coefficient polynomial on a disk.
template <typename T>
inline CBall cb_eval_poly(const Poly<T>& f, const CBall& z, mpfr_prec_t prec) {
    CBall acc = CBall::exact_rat(BigRational(0), prec);
    for (size_t i = f.coeffs().size(); i-- > 0;) {
        acc = cb_mul(acc, z, prec);
        acc = cb_add(acc, CBall::exact_rat(BigRational(f.coeffs()[i]), prec), prec);
    }
    return acc;
}

// lower bound on the distance between two disk centers
inline Bf cb_center_dist_lb(const CBall& a, const CBall& b) {
    Bf dre = bf_sub(a.re, b.re, a.prec(), MPFR_RNDN);
    Bf dim = bf_sub(a.im, b.im, a.prec(), MPFR_RNDN);
    Bf d = bf_hypot(dre, dim, kRadPrec, MPFR_RNDD);
    // the RNDN differences are off by at most an ulp each
    Bf slack = bf_add(bf_ulp(dre), bf_ulp(dim), kRadPrec, MPFR_RNDU);
    Bf lb = bf_sub(d, slack, kRadPrec, MPFR_RNDD);
    if (lb.sign() < 0) lb = Bf::of_long(0, kRadPrec);
    return lb;
}

} // namespace ntheight
