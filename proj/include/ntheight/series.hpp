#pragma once
// Truncated Laurent series over an abstract coefficient ring, plus dense
// bivariate power series over the rationals. A series knows its coefficients
// for exponents in [val, prec); everything at prec and beyond is unknown.
// Ring contexts are passed explicitly because p-adic coefficients carry
// their field with them and have no default identity.

#include <ntheight/padic.hpp>

#include <utility>
#include <vector>

namespace ntheight {

struct QRing {
    using Elem = BigRational;
    Elem zero() const { return BigRational(0); }
    Elem one() const { return BigRational(1); }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem neg(const Elem& a) const { return -a; }
    Elem inv(const Elem& a) const {
        require(sgn(a) != 0, errc::zero_element, "inverse of zero");
        return 1 / a;
    }
    bool is_zero(const Elem& a) const { return sgn(a) == 0; }
    // rational zeros are always certified, so trimming and testing coincide
    bool trim_zero(const Elem& a) const { return sgn(a) == 0; }
    Elem from_rational(const BigRational& r) const { return r; }
};

struct PadRing {
    PadicFieldPtr F;
    using Elem = PadicNumber;
    Elem zero() const { return pad_exact_zero(F); }
    Elem one() const { return pad_from_rational(F, BigRational(1)); }
    Elem add(const Elem& a, const Elem& b) const { return pad_add(a, b); }
    Elem sub(const Elem& a, const Elem& b) const { return pad_sub(a, b); }
    Elem mul(const Elem& a, const Elem& b) const { return pad_mul(a, b); }
    Elem neg(const Elem& a) const { return pad_neg(a); }
    Elem inv(const Elem& a) const { return pad_inv(a); }
    // a value indistinguishable from zero at working precision answers the
    // zero test, but only a certified zero may be dropped from storage;
    // discarding an unresolved coefficient would let a later valuation read
    // pass it off as exactly zero
    bool is_zero(const Elem& a) const { return a.zflag; }
    bool trim_zero(const Elem& a) const { return a.exact_zero(); }
    Elem from_rational(const BigRational& r) const { return pad_from_rational(F, r); }
};

template <typename Ring>
struct Series {
    using Elem = typename Ring::Elem;
    long val = 0;            // exponent of c[0]
    long prec = 0;           // coefficients known for exponents < prec
    std::vector<Elem> c;     // empty means zero to the stated precision
};

using QS = Series<QRing>;
using PS = Series<PadRing>;

template <typename Ring>
Series<Ring> ser_zero(const Ring&, long prec) {
    return {prec, prec, {}};
}

template <typename Ring>
Series<Ring> ser_normalize(const Ring& R, Series<Ring> a) {
    size_t lead = 0;
    while (lead < a.c.size() && R.trim_zero(a.c[lead])) ++lead;
    if (lead > 0) {
        a.c.erase(a.c.begin(), a.c.begin() + static_cast<long>(lead));
        a.val += static_cast<long>(lead);
    }
    while (!a.c.empty() && a.val + static_cast<long>(a.c.size()) > a.prec) a.c.pop_back();
    if (a.c.empty()) a.val = a.prec;
    return a;
}

template <typename Ring>
Series<Ring> ser_monomial(const Ring& R, const typename Ring::Elem& v, long exp, long prec) {
    if (exp >= prec || R.trim_zero(v)) return ser_zero(R, prec);
    Series<Ring> s{exp, prec, {v}};
    return s;
}

template <typename Ring>
typename Ring::Elem ser_coeff(const Ring& R, const Series<Ring>& a, long k) {
    require(k < a.prec, errc::precision_exhausted,
            "series coefficient requested beyond the truncation order");
    if (k < a.val || k >= a.val + static_cast<long>(a.c.size())) return R.zero();
    return a.c[static_cast<size_t>(k - a.val)];
}

template <typename Ring>
bool ser_is_zero(const Ring& R, const Series<Ring>& a) {
    for (const auto& e : a.c)
        if (!R.is_zero(e)) return false;
    return true;
}

// lowest known exponent with a nonzero coefficient
template <typename Ring>
long ser_order(const Ring& R, const Series<Ring>& a) {
    for (size_t i = 0; i < a.c.size(); ++i)
        if (!R.is_zero(a.c[i])) return a.val + static_cast<long>(i);
    raise(errc::zero_element, "order of a series that is zero to precision");
}

template <typename Ring>
Series<Ring> ser_truncate(const Ring& R, Series<Ring> a, long prec) {
    if (prec < a.prec) {
        a.prec = prec;
        return ser_normalize(R, std::move(a));
    }
    return a;
}

template <typename Ring>
Series<Ring> ser_shift(const Ring&, Series<Ring> a, long k) {
    a.val += k;
    a.prec += k;
    return a;
}

template <typename Ring>
Series<Ring> ser_add(const Ring& R, const Series<Ring>& a, const Series<Ring>& b) {
    long prec = std::min(a.prec, b.prec);
    if (a.c.empty() && b.c.empty()) return ser_zero(R, prec);
    long lo = std::min(a.c.empty() ? prec : a.val, b.c.empty() ? prec : b.val);
    Series<Ring> out{lo, prec, {}};
    long n = prec - lo;
    if (n <= 0) return ser_zero(R, prec);
    out.c.assign(static_cast<size_t>(n), R.zero());
    auto fold = [&](const Series<Ring>& s, bool negate) {
        (void)negate;
        for (size_t i = 0; i < s.c.size(); ++i) {
            long e = s.val + static_cast<long>(i);
            if (e >= prec) break;
            out.c[static_cast<size_t>(e - lo)] = R.add(out.c[static_cast<size_t>(e - lo)], s.c[i]);
        }
    };
    fold(a, false);
    fold(b, false);
    return ser_normalize(R, std::move(out));
}

template <typename Ring>
Series<Ring> ser_neg(const Ring& R, Series<Ring> a) {
    for (auto& v : a.c) v = R.neg(v);
    return a;
}

template <typename Ring>
Series<Ring> ser_sub(const Ring& R, const Series<Ring>& a, const Series<Ring>& b) {
    return ser_add(R, a, ser_neg(R, b));
}

template <typename Ring>
Series<Ring> ser_mul(const Ring& R, const Series<Ring>& a, const Series<Ring>& b) {
    // known exponent window of the product
    long prec = std::min(a.prec + (b.c.empty() ? b.prec : b.val),
                         b.prec + (a.c.empty() ? a.prec : a.val));
    if (a.c.empty() || b.c.empty()) return ser_zero(R, prec);
    long lo = a.val + b.val;
    long n = prec - lo;
    if (n <= 0) return ser_zero(R, prec);
    Series<Ring> out{lo, prec, {}};
    out.c.assign(static_cast<size_t>(n), R.zero());
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (static_cast<long>(i) >= n) break;
        for (size_t j = 0; j < b.c.size(); ++j) {
            long k = static_cast<long>(i + j);
            if (k >= n) break;
            out.c[static_cast<size_t>(k)] =
                R.add(out.c[static_cast<size_t>(k)], R.mul(a.c[i], b.c[j]));
        }
    }
    return ser_normalize(R, std::move(out));
}

template <typename Ring>
Series<Ring> ser_scale(const Ring& R, Series<Ring> a, const typename Ring::Elem& s) {
    if (R.is_zero(s)) return ser_zero(R, a.prec);
    for (auto& v : a.c) v = R.mul(v, s);
    return ser_normalize(R, std::move(a));
}

// inverse of a series with invertible leading coefficient
template <typename Ring>
Series<Ring> ser_inv(const Ring& R, const Series<Ring>& a) {
    require(!a.c.empty(), errc::zero_element, "inverse of a series that is zero to precision");
    long v = a.val;
    long n = a.prec - v; // relative terms available
    require(n >= 1, errc::precision_exhausted, "no relative precision left for series inverse");
    typename Ring::Elem lead_inv = R.inv(a.c[0]);
    // Newton-free forward substitution: b with (a z^{-v}) * b = 1 + O(z^n)
    std::vector<typename Ring::Elem> b(static_cast<size_t>(n), R.zero());
    b[0] = lead_inv;
    for (long k = 1; k < n; ++k) {
        typename Ring::Elem acc = R.zero();
        for (long i = 1; i <= k && i < static_cast<long>(a.c.size()); ++i) {
            acc = R.add(acc, R.mul(a.c[static_cast<size_t>(i)], b[static_cast<size_t>(k - i)]));
        }
        b[static_cast<size_t>(k)] = R.neg(R.mul(lead_inv, acc));
    }
    Series<Ring> out{-v, n - v, std::move(b)};
    return ser_normalize(R, std::move(out));
}

template <typename Ring>
Series<Ring> ser_div(const Ring& R, const Series<Ring>& a, const Series<Ring>& b) {
    return ser_mul(R, a, ser_inv(R, b));
}

template <typename Ring>
Series<Ring> ser_pow(const Ring& R, const Series<Ring>& a, long e) {
    require(e >= 0, errc::invalid_argument, "negative series power; invert first");
    Series<Ring> acc = ser_monomial(R, R.one(), 0,
                                    e == 0 ? a.prec : a.prec + (e - 1) * (a.c.empty() ? 0 : a.val));
    Series<Ring> base = a;
    while (e > 0) {
        if (e & 1) acc = ser_mul(R, acc, base);
        e >>= 1;
        if (e > 0) base = ser_mul(R, base, base);
    }
    return acc;
}

// composition f(s) for a power-series argument with ord(s) >= 1
template <typename Ring>
Series<Ring> ser_compose(const Ring& R, const Series<Ring>& f, const Series<Ring>& s) {
    require(f.val >= 0, errc::invalid_argument, "composition needs a power series on the left");
    require(s.c.empty() || s.val >= 1, errc::invalid_argument,
            "composition argument must vanish at the origin");
    long prec = std::min(f.prec, s.prec);
    Series<Ring> out = ser_zero(R, prec);
    // Horner from the top coefficient down
    for (long k = f.val + static_cast<long>(f.c.size()) - 1; k >= 0; --k) {
        out = ser_mul(R, out, s);
        out = ser_truncate(R, std::move(out), prec);
        typename Ring::Elem ck = k >= f.val ? f.c[static_cast<size_t>(k - f.val)] : R.zero();
        out = ser_add(R, out, ser_monomial(R, ck, 0, prec));
    }
    return out;
}

// map a rational series into another coefficient ring (used to push exact
// expansions into a p-adic completion)
template <typename Ring>
Series<Ring> ser_map(const Ring& R, const QS& a) {
    Series<Ring> out{a.val, a.prec, {}};
    out.c.reserve(a.c.size());
    for (const auto& v : a.c) out.c.push_back(R.from_rational(v));
    return ser_normalize(R, std::move(out));
}

inline std::string ser_to_string(const QS& a, const std::string& var = "z") {
    if (a.c.empty()) return "O(" + var + "^" + std::to_string(a.prec) + ")";
    std::string s;
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (sgn(a.c[i]) == 0) continue;
        long e = a.val + static_cast<long>(i);
        if (!s.empty()) s += " + ";
        s += rat_to_string(a.c[i]) + "*" + var + "^" + std::to_string(e);
    }
    if (s.empty()) s = "0";
    return s + " + O(" + var + "^" + std::to_string(a.prec) + ")";
}

// --- dense bivariate power series over Q, truncated at total degree --------

// coefficient of z1^i z2^j lives at c[i][j], kept for i + j < prec
struct BiSeries {
    long prec = 0;
    std::vector<std::vector<BigRational>> c;

    static BiSeries zero(long prec) {
        BiSeries b;
        b.prec = prec;
        b.c.assign(static_cast<size_t>(prec), {});
        for (long i = 0; i < prec; ++i)
            b.c[static_cast<size_t>(i)].assign(static_cast<size_t>(prec - i), BigRational(0));
        return b;
    }

    BigRational coeff(long i, long j) const {
        if (i < 0 || j < 0 || i + j >= prec) return BigRational(0);
        return c[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    void set(long i, long j, const BigRational& v) {
        require(i >= 0 && j >= 0 && i + j < prec, errc::invalid_argument,
                "bivariate coefficient outside the truncation triangle");
        c[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
    }
    bool is_zero() const {
        for (const auto& row : c)
            for (const auto& v : row)
                if (sgn(v) != 0) return false;
        return true;
    }
};

inline BiSeries bi_add(const BiSeries& a, const BiSeries& b) {
    long prec = std::min(a.prec, b.prec);
    BiSeries out = BiSeries::zero(prec);
    for (long i = 0; i < prec; ++i)
        for (long j = 0; i + j < prec; ++j) out.set(i, j, a.coeff(i, j) + b.coeff(i, j));
    return out;
}

inline BiSeries bi_neg(const BiSeries& a) {
    BiSeries out = BiSeries::zero(a.prec);
    for (long i = 0; i < a.prec; ++i)
        for (long j = 0; i + j < a.prec; ++j) out.set(i, j, -a.coeff(i, j));
    return out;
}

inline BiSeries bi_sub(const BiSeries& a, const BiSeries& b) { return bi_add(a, bi_neg(b)); }

inline BiSeries bi_mul(const BiSeries& a, const BiSeries& b) {
    long prec = std::min(a.prec, b.prec);
    BiSeries out = BiSeries::zero(prec);
    for (long i1 = 0; i1 < a.prec && i1 < prec; ++i1)
        for (long j1 = 0; i1 + j1 < a.prec && i1 + j1 < prec; ++j1) {
            const BigRational& v1 = a.c[static_cast<size_t>(i1)][static_cast<size_t>(j1)];
            if (sgn(v1) == 0) continue;
            for (long i2 = 0; i1 + j1 + i2 < prec && i2 < b.prec; ++i2)
                for (long j2 = 0; i1 + j1 + i2 + j2 < prec && i2 + j2 < b.prec; ++j2) {
                    const BigRational& v2 = b.c[static_cast<size_t>(i2)][static_cast<size_t>(j2)];
                    if (sgn(v2) == 0) continue;
                    long i = i1 + i2, j = j1 + j2;
                    out.c[static_cast<size_t>(i)][static_cast<size_t>(j)] += v1 * v2;
                }
        }
    return out;
}

inline BiSeries bi_scale(const BiSeries& a, const BigRational& s) {
    BiSeries out = BiSeries::zero(a.prec);
    for (long i = 0; i < a.prec; ++i)
        for (long j = 0; i + j < a.prec; ++j) out.set(i, j, a.coeff(i, j) * s);
    return out;
}

// inverse of a bivariate series with nonzero constant term, by degree-graded
// forward substitution
inline BiSeries bi_inv(const BiSeries& a) {
    require(sgn(a.coeff(0, 0)) != 0, errc::zero_element,
            "bivariate inverse needs a unit constant term");
    BigRational c0 = 1 / a.coeff(0, 0);
    BiSeries out = BiSeries::zero(a.prec);
    out.set(0, 0, c0);
    // b_d determined by sum_{e < d} a_{d-e} b_e
    for (long d = 1; d < a.prec; ++d) {
        for (long i = 0; i <= d; ++i) {
            long j = d - i;
            BigRational acc(0);
            for (long i2 = 0; i2 <= i; ++i2)
                for (long j2 = 0; j2 <= j; ++j2) {
                    if (i2 + j2 == d) continue;
                    acc += a.coeff(i - i2, j - j2) * out.coeff(i2, j2);
                }
            out.set(i, j, -c0 * acc);
        }
    }
    return out;
}

// substitute univariate power series (ord >= 1) for the two variables
inline QS bi_eval(const QRing& R, const BiSeries& f, const QS& s1, const QS& s2) {
    long prec = std::min({f.prec, s1.prec, s2.prec});
    QS out = ser_zero(R, prec);
    std::vector<QS> p1(static_cast<size_t>(f.prec)), p2(static_cast<size_t>(f.prec));
    p1[0] = ser_monomial(R, R.one(), 0, prec);
    p2[0] = p1[0];
    for (long i = 1; i < f.prec; ++i) {
        p1[static_cast<size_t>(i)] =
            ser_truncate(R, ser_mul(R, p1[static_cast<size_t>(i - 1)], s1), prec);
        p2[static_cast<size_t>(i)] =
            ser_truncate(R, ser_mul(R, p2[static_cast<size_t>(i - 1)], s2), prec);
    }
    for (long i = 0; i < f.prec; ++i)
        for (long j = 0; i + j < f.prec; ++j) {
            const BigRational& v = f.c[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (sgn(v) == 0) continue;
            out = ser_add(R, out,
                          ser_scale(R, ser_mul(R, p1[static_cast<size_t>(i)], p2[static_cast<size_t>(j)]), v));
        }
    return out;
}

} // namespace ntheight
