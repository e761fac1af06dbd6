#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "factor_zx.hpp"
#include "fp_poly.hpp"
#include "poly.hpp"

namespace ntheight {

// Unramified p-adic fields K_w = Q_p[x]/(ghat) with truncated-precision
// arithmetic.  An element is p^val * u where u is a polynomial of degree < f
// over Z/p^prec with at least one unit coefficient, so the valuation is
// always exact while the digits carry the working precision.  A separate
// "zero at precision" state records O(p^ord) when cancellation eats every
// known digit; exact zeros use a huge sentinel order.

struct PadicField {
    BigInt p;
    long f;          // residue degree
    long k;          // default working precision in digits
    ZPoly modulus;   // monic, degree f, irreducible mod p
    FpCtx Fp;
    FqCtx Fq;

    PadicField(BigInt p_, long k_, ZPoly mod_)
        : p(std::move(p_)),
          f(mod_.degree()),
          k(k_),
          modulus(std::move(mod_)),
          Fp(static_cast<uint64_t>(p.get_ui())),
          Fq(Fp.p, fp_from(Fp, modulus)) {}

    BigInt pow_p(long e) const { return pow_int(p, e); }
};

using PadicFieldPtr = std::shared_ptr<const PadicField>;

// Field from an explicit modulus, e.g. a Hensel-lifted factor of a defining
// polynomial.  For f = 1 pass the polynomial x.
inline PadicFieldPtr padic_field_with_modulus(const BigInt& p, long k, const ZPoly& modulus) {
    require(sgn(p) > 0 && is_probable_prime(p), errc::bad_prime, "p must be prime");
    require(k >= 1, errc::invalid_argument, "need at least one digit of precision");
    require(modulus.degree() >= 1 && modulus.is_monic(), errc::not_monic,
            "p-adic modulus must be monic and nonconstant");
    auto F = std::make_shared<PadicField>(p, k, modulus);
    require(fp_is_irreducible(F->Fp, fp_from(F->Fp, modulus)), errc::bad_prime,
            "modulus is reducible mod p");
    return F;
}

// Abstract unramified field of residue degree f.  The modulus is the first
// monic irreducible of degree f mod p in radix order, a deterministic choice.
inline PadicFieldPtr padic_field(const BigInt& p, long f, long k) {
    require(f >= 1 && f <= 24, errc::invalid_argument, "residue degree out of range");
    if (f == 1) return padic_field_with_modulus(p, k, ZPoly({BigInt(0), BigInt(1)}));
    require(sgn(p) > 0 && is_probable_prime(p), errc::bad_prime, "p must be prime");
    FpCtx Fp(static_cast<uint64_t>(p.get_ui()));
    BigInt count = pow_int(p, f);
    require(count <= BigInt(4000000), errc::cap_exceeded, "modulus search space too large");
    for (BigInt idx(0); idx < count; ++idx) {
        std::vector<BigInt> c(f + 1);
        BigInt rest = idx;
        for (long i = 0; i < f; ++i) {
            c[i] = rest % p;
            rest /= p;
        }
        c[f] = 1;
        ZPoly cand(c);
        if (fp_is_irreducible(Fp, fp_from(Fp, cand))) return padic_field_with_modulus(p, k, cand);
    }
    raise(errc::internal_error, "no irreducible modulus found");
}

struct PadicNumber {
    PadicFieldPtr F;
    bool zflag = true;       // true: value is O(p^val), no digits known
    long val = 0;            // exact valuation when zflag is false
    long prec = 0;           // significant digits; value known mod p^(val+prec)
    std::vector<BigInt> u;   // unit part, degree < f, coefficients in [0, p^prec)

    static constexpr long kExactZeroOrd = 1L << 40;
    bool exact_zero() const { return zflag && val >= kExactZeroOrd; }
};

inline PadicNumber pad_exact_zero(const PadicFieldPtr& F) {
    return PadicNumber{F, true, PadicNumber::kExactZeroOrd, 0, {}};
}
inline PadicNumber pad_zero_at(const PadicFieldPtr& F, long ord) {
    return PadicNumber{F, true, ord, 0, {}};
}

namespace detail {

// Arithmetic in Z[x]/(modulus, p^m) on plain coefficient vectors.

inline ZPoly padfield_mul(const PadicField& F, const ZPoly& a, const ZPoly& b, const BigInt& pm) {
    ZPoly q, r;
    zmod_divrem_monic(zmod_mul(a, b, pm), F.modulus, pm, q, r);
    return r;
}

inline ZPoly padfield_eval(const PadicField& F, const ZPoly& g, const ZPoly& x, const BigInt& pm) {
    ZPoly acc;
    for (size_t i = g.coeffs().size(); i-- > 0;)
        acc = zmod_reduce(padfield_mul(F, acc, x, pm) + ZPoly::constant(g.coeffs()[i]), pm);
    return acc;
}

// Inverse of a unit by Newton lifting from the residue inverse.
inline ZPoly padfield_inv(const PadicField& F, const ZPoly& u, long m) {
    FqElem r0 = fq_zero(F.Fq);
    for (long i = 0; i <= u.degree() && i < F.f; ++i) r0[i] = F.Fp.reduce(u.coeff(i));
    FqElem y0 = fq_inv(F.Fq, r0);
    std::vector<BigInt> yv(F.f, BigInt(0));
    for (long i = 0; i < F.f; ++i) yv[i] = BigInt(static_cast<unsigned long>(y0[i]));
    ZPoly y{yv};
    long have = 1;
    while (have < m) {
        have = std::min(2 * have, m);
        BigInt pm = pow_int(F.p, have);
        ZPoly t = padfield_mul(F, u, y, pm);
        y = padfield_mul(F, y, zmod_reduce(ZPoly::constant(2) - t, pm), pm);
    }
    return zmod_reduce(y, pow_int(F.p, m));
}

// Assemble a number from polynomial coefficients times p^shift, all known
// modulo p^abs_prec in absolute terms: extracts the exact valuation.
inline PadicNumber pad_make(const PadicFieldPtr& Fptr, std::vector<BigInt> c, long shift,
                            long abs_prec) {
    const PadicField& F = *Fptr;
    long rel = abs_prec - shift;
    if (rel <= 0) return pad_zero_at(Fptr, abs_prec);
    BigInt pm = pow_int(F.p, rel);
    ZPoly red = zmod_reduce(ZPoly(std::move(c)), pm);
    ZPoly q, r;
    zmod_divrem_monic(red, F.modulus, pm, q, r);
    if (r.is_zero()) return pad_zero_at(Fptr, abs_prec);
    long v = rel;
    for (const auto& x : r.coeffs()) {
        if (sgn(x) == 0) continue;
        long vx = valuation_int(x, F.p);
        if (vx < v) v = vx;
    }
    if (v >= rel) return pad_zero_at(Fptr, abs_prec);
    PadicNumber out;
    out.F = Fptr;
    out.zflag = false;
    out.val = shift + v;
    out.prec = rel - v;
    BigInt scale = pow_int(F.p, v), pv = pow_int(F.p, rel - v);
    out.u.assign(F.f, BigInt(0));
    for (long i = 0; i <= r.degree(); ++i) {
        BigInt t = (r.coeff(i) / scale) % pv;
        if (sgn(t) < 0) t += pv;
        out.u[i] = t;
    }
    return out;
}

} // namespace detail

inline PadicNumber pad_from_rational(const PadicFieldPtr& F, const BigRational& x, long prec = -1) {
    if (prec < 0) prec = F->k;
    if (sgn(x) == 0) return pad_exact_zero(F);
    BigInt num = x.get_num(), den = x.get_den();
    long vn = valuation_int(num, F->p), vd = valuation_int(den, F->p);
    BigInt nu = num / F->pow_p(vn), du = den / F->pow_p(vd);
    long v = vn - vd;
    BigInt pm = F->pow_p(prec);
    BigInt dinv;
    require(mpz_invert(dinv.get_mpz_t(), du.get_mpz_t(), pm.get_mpz_t()) != 0, errc::internal_error,
            "denominator not invertible after removing p");
    BigInt digit = ((nu % pm) * dinv) % pm;
    if (sgn(digit) < 0) digit += pm;
    PadicNumber out;
    out.F = F;
    out.zflag = false;
    out.val = v;
    out.prec = prec;
    out.u.assign(F->f, BigInt(0));
    out.u[0] = digit;
    return out;
}

inline PadicNumber pad_from_int(const PadicFieldPtr& F, const BigInt& x, long prec = -1) {
    return pad_from_rational(F, BigRational(x), prec);
}

// the residue generator x as an element (only meaningful when f > 1)
inline PadicNumber pad_gen(const PadicFieldPtr& F, long prec = -1) {
    if (prec < 0) prec = F->k;
    require(F->f > 1, errc::invalid_argument, "generator of a trivial extension");
    PadicNumber out;
    out.F = F;
    out.zflag = false;
    out.val = 0;
    out.prec = prec;
    out.u.assign(F->f, BigInt(0));
    out.u[1] = 1;
    return out;
}

// Element from power-basis coordinates, i.e. the image of sum c_i theta^i
// under an embedding that sends theta to x.
inline PadicNumber pad_from_coords(const PadicFieldPtr& F, const std::vector<BigRational>& coords,
                                   long prec = -1) {
    if (prec < 0) prec = F->k;
    require(static_cast<long>(coords.size()) <= F->f, errc::invalid_argument,
            "coordinate vector longer than the residue degree");
    long shift = 0;
    bool nonzero = false;
    for (const auto& c : coords) {
        if (sgn(c) == 0) continue;
        long v = valuation_rat(c, F->p);
        if (!nonzero || v < shift) shift = v;
        nonzero = true;
    }
    if (!nonzero) return pad_exact_zero(F);
    BigInt pm = F->pow_p(prec);
    std::vector<BigInt> digits(F->f, BigInt(0));
    for (size_t i = 0; i < coords.size(); ++i) {
        if (sgn(coords[i]) == 0) continue;
        BigRational scaled = coords[i];
        if (shift >= 0)
            scaled /= BigRational(F->pow_p(shift));
        else
            scaled *= BigRational(F->pow_p(-shift));
        BigInt den = scaled.get_den(), dinv;
        require(mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), pm.get_mpz_t()) != 0,
                errc::internal_error, "denominator shares a factor with p after scaling");
        BigInt d = ((scaled.get_num() % pm) * dinv) % pm;
        if (sgn(d) < 0) d += pm;
        digits[i] = d;
    }
    return detail::pad_make(F, std::move(digits), shift, shift + prec);
}

inline bool pad_is_zero_to_prec(const PadicNumber& a) { return a.zflag; }

// Exact valuation.  A zero-at-precision value has no certain valuation.
inline long pad_val(const PadicNumber& a) {
    require(!a.zflag, errc::precision_exhausted,
            "valuation request on a value that vanishes to working precision (O(p^" +
                std::to_string(a.val) + "))");
    return a.val;
}

inline long pad_abs_prec(const PadicNumber& a) { return a.zflag ? a.val : a.val + a.prec; }

inline PadicNumber pad_neg(const PadicNumber& a) {
    if (a.zflag) return a;
    PadicNumber out = a;
    BigInt pm = a.F->pow_p(a.prec);
    for (auto& x : out.u)
        if (sgn(x) != 0) x = pm - x;
    return out;
}

inline PadicNumber pad_add(const PadicNumber& a, const PadicNumber& b) {
    const PadicFieldPtr& F = a.F;
    if (a.exact_zero()) return b;
    if (b.exact_zero()) return a;
    long M = std::min(pad_abs_prec(a), pad_abs_prec(b));
    if (a.zflag && b.zflag) return pad_zero_at(F, M);
    long vmin = std::min(a.val, b.val);
    std::vector<BigInt> acc(F->f, BigInt(0));
    auto fold = [&](const PadicNumber& x) {
        if (x.zflag) return;
        BigInt scale = F->pow_p(x.val - vmin);
        for (long i = 0; i < F->f && i < static_cast<long>(x.u.size()); ++i)
            acc[i] += x.u[i] * scale;
    };
    fold(a);
    fold(b);
    return detail::pad_make(F, std::move(acc), vmin, M);
}

inline PadicNumber pad_sub(const PadicNumber& a, const PadicNumber& b) {
    return pad_add(a, pad_neg(b));
}

inline PadicNumber pad_mul(const PadicNumber& a, const PadicNumber& b) {
    const PadicFieldPtr& F = a.F;
    if (a.exact_zero() || b.exact_zero()) return pad_exact_zero(F);
    if (a.zflag || b.zflag) return pad_zero_at(F, a.val + b.val);
    long m = std::min(a.prec, b.prec);
    BigInt pm = F->pow_p(m);
    ZPoly r = detail::padfield_mul(*F, ZPoly(std::vector<BigInt>(a.u)),
                                   ZPoly(std::vector<BigInt>(b.u)), pm);
    PadicNumber out;
    out.F = F;
    out.zflag = false;
    out.val = a.val + b.val;
    out.prec = m;
    out.u.assign(F->f, BigInt(0));
    for (long i = 0; i <= r.degree(); ++i) out.u[i] = r.coeff(i);
    // a product of units stays a unit in an unramified field
    bool unit = false;
    for (const auto& x : out.u)
        if (sgn(x) != 0 && valuation_int(x, F->p) == 0) unit = true;
    require(unit, errc::internal_error, "unit product lost its unit digit");
    return out;
}

inline PadicNumber pad_inv(const PadicNumber& a) {
    require(!a.zflag, errc::zero_element, "inverse of a value that may be zero");
    const PadicFieldPtr& F = a.F;
    ZPoly y = detail::padfield_inv(*F, ZPoly(std::vector<BigInt>(a.u)), a.prec);
    PadicNumber out;
    out.F = F;
    out.zflag = false;
    out.val = -a.val;
    out.prec = a.prec;
    out.u.assign(F->f, BigInt(0));
    for (long i = 0; i <= y.degree(); ++i) out.u[i] = y.coeff(i);
    return out;
}

inline PadicNumber pad_div(const PadicNumber& a, const PadicNumber& b) {
    return pad_mul(a, pad_inv(b));
}

inline PadicNumber pad_pow_ui(const PadicNumber& a, unsigned long e) {
    PadicNumber r = pad_from_int(a.F, 1, a.zflag ? a.F->k : a.prec);
    PadicNumber base = a;
    while (e) {
        if (e & 1) r = pad_mul(r, base);
        e >>= 1;
        if (e) base = pad_mul(base, base);
    }
    return r;
}

inline PadicNumber operator+(const PadicNumber& a, const PadicNumber& b) { return pad_add(a, b); }
inline PadicNumber operator-(const PadicNumber& a, const PadicNumber& b) { return pad_sub(a, b); }
inline PadicNumber operator-(const PadicNumber& a) { return pad_neg(a); }
inline PadicNumber operator*(const PadicNumber& a, const PadicNumber& b) { return pad_mul(a, b); }
inline PadicNumber operator/(const PadicNumber& a, const PadicNumber& b) { return pad_div(a, b); }

// true when a - b vanishes to the joint working precision
inline bool pad_agree(const PadicNumber& a, const PadicNumber& b) {
    return pad_sub(a, b).zflag;
}

// residue of an integral element in F_q
inline FqElem pad_residue(const PadicNumber& a) {
    const PadicFieldPtr& F = a.F;
    FqElem r = fq_zero(F->Fq);
    if (a.zflag) {
        require(a.val >= 1, errc::precision_exhausted, "residue of an O(p^0) value");
        return r;
    }
    require(a.val >= 0, errc::invalid_argument, "residue of a non-integral element");
    if (a.val >= 1) return r;
    for (long i = 0; i < F->f; ++i) r[i] = F->Fp.reduce(a.u[i]);
    return r;
}

// canonical integer representative for f = 1 and val >= 0
inline BigInt pad_lift_int(const PadicNumber& a) {
    require(a.F->f == 1, errc::invalid_argument, "integer lift needs a degree-1 field");
    if (a.zflag) return BigInt(0);
    require(a.val >= 0, errc::invalid_argument, "integer lift of a non-integral element");
    return a.u[0] * a.F->pow_p(a.val);
}

inline std::string pad_to_string(const PadicNumber& a) {
    if (a.exact_zero()) return "0";
    if (a.zflag) return "O(" + a.F->p.get_str() + "^" + std::to_string(a.val) + ")";
    std::string s = a.F->p.get_str() + "^" + std::to_string(a.val) + "*(";
    for (long i = 0; i < a.F->f; ++i) {
        if (i) s += " + ";
        s += a.u[i].get_str();
        if (i == 1) s += "*x";
        if (i > 1) s += "*x^" + std::to_string(i);
    }
    return s + ") + O(" + a.F->p.get_str() + "^" + std::to_string(a.val + a.prec) + ")";
}

// Horner evaluation of an exact integer polynomial at a p-adic point
inline PadicNumber pad_eval_zpoly(const ZPoly& g, const PadicNumber& x) {
    PadicNumber acc = pad_exact_zero(x.F);
    long pr = x.zflag ? x.F->k : x.prec;
    for (size_t i = g.coeffs().size(); i-- > 0;)
        acc = pad_add(pad_mul(acc, x), pad_from_int(x.F, g.coeffs()[i], pr));
    return acc;
}

// --- Hensel root lifting ---------------------------------------------------

// Root of g in the given unramified field, to the field's working precision.
// The residue root is searched in radix index order (for f = 1 that is the
// smallest nonnegative residue), so the result is deterministic.  Requires a
// root of the reduction with g'(root) != 0 there.
inline PadicNumber padic_hensel_root_in(const PadicFieldPtr& Fptr, const ZPoly& g) {
    const PadicField& F = *Fptr;
    require(g.degree() >= 1, errc::invalid_argument, "constant polynomial has no root");
    require(F.Fq.q <= BigInt(1000000), errc::cap_exceeded,
            "residue field too large for exhaustive root search");
    std::vector<FqElem> gq, dgq;
    for (long i = 0; i <= g.degree(); ++i)
        gq.push_back(fq_from_scalar(F.Fq, F.Fp.reduce(g.coeff(i))));
    for (long i = 1; i <= g.degree(); ++i)
        dgq.push_back(fq_from_scalar(F.Fq, F.Fp.reduce(g.coeff(i) * i)));
    auto eval_at = [&](const std::vector<FqElem>& poly, const FqElem& x) {
        FqElem acc = fq_zero(F.Fq);
        for (size_t i = poly.size(); i-- > 0;) acc = fq_add(F.Fq, fq_mul(F.Fq, acc, x), poly[i]);
        return acc;
    };
    std::optional<FqElem> seed;
    uint64_t qn = F.Fq.q.get_ui();
    for (uint64_t idx = 0; idx < qn; ++idx) {
        FqElem x = fq_from_index(F.Fq, idx);
        if (!fq_is_zero(eval_at(gq, x))) continue;
        if (fq_is_zero(eval_at(dgq, x))) continue; // multiple root, keep looking
        seed = x;
        break;
    }
    if (!seed)
        raise(errc::no_simple_root, "no simple root of the reduction mod " + F.p.get_str() +
                                        " (residue degree " + std::to_string(F.f) + ")");

    ZPoly dg;
    {
        std::vector<BigInt> d;
        for (long i = 1; i <= g.degree(); ++i) d.push_back(g.coeff(i) * i);
        dg = ZPoly(std::move(d));
    }
    std::vector<BigInt> xv(F.f, BigInt(0));
    for (long i = 0; i < F.f; ++i) xv[i] = BigInt(static_cast<unsigned long>((*seed)[i]));
    ZPoly x{xv};
    long target = F.k, have = 1;
    // Newton: x correct mod p^have is promoted to mod p^min(2*have, target)
    while (have < target) {
        have = std::min(2 * have, target);
        BigInt pm = pow_int(F.p, have);
        ZPoly gx = detail::padfield_eval(F, g, x, pm);
        if (gx.is_zero()) continue;
        ZPoly dgx = detail::padfield_eval(F, dg, x, pm);
        ZPoly step = detail::padfield_mul(F, gx, detail::padfield_inv(F, dgx, have), pm);
        x = detail::zmod_reduce(x - step, pm);
    }
    BigInt pk = pow_int(F.p, target);
    require(detail::padfield_eval(F, g, x, pk).is_zero(), errc::internal_error,
            "Hensel lift failed to reach the requested precision");
    std::vector<BigInt> out(x.coeffs());
    return detail::pad_make(Fptr, std::move(out), 0, target);
}

inline PadicNumber padic_hensel_root(const ZPoly& g, const BigInt& p, long k) {
    return padic_hensel_root_in(padic_field(p, 1, k), g);
}

} // namespace ntheight
