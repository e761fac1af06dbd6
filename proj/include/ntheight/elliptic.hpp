#pragma once
// Short Weierstrass curves y^2 = x^3 + a x + b over a number field: exact
// chord-tangent arithmetic, reduction of points at good unramified places,
// exhaustive point counts over small residue fields, amplification by the
// reduced group order, and the log-norm sum over places where a point sits
// in the kernel of reduction.

#include <ntheight/places.hpp>

#include <cmath>
#include <set>
#include <utility>
#include <vector>

namespace ntheight {

struct Curve;
using CurvePtr = std::shared_ptr<const Curve>;

struct Curve {
    NfPtr base;
    NfElement a, b;
    NfElement disc;              // -16 (4a^3 + 27b^2), nonzero
    std::set<BigInt> bad_primes; // rational primes the reduction machinery refuses
};

// The refused set always contains 2 and 3 (so residue characteristics are
// >= 5 and the tangent slope denominators stay invertible), every prime
// dividing the field discriminant (so dedekind_factor never meets an index
// prime), every prime in a coordinate denominator of a or b, and every prime
// dividing the numerator of N(disc). Everything else is a place of good
// reduction for this model.
inline CurvePtr curve(const NfPtr& K, const NfElement& a, const NfElement& b) {
    require(a.K->defining_poly() == K->defining_poly() &&
                b.K->defining_poly() == K->defining_poly(),
            errc::invalid_argument, "curve coefficients live in a different field");
    NfElement a3 = a * a * a, b2 = b * b;
    NfElement disc = nf_from_rational(K, BigRational(-64)) * a3 +
                     nf_from_rational(K, BigRational(-432)) * b2;
    require(!disc.is_zero(), errc::invalid_argument, "singular model: 4a^3 + 27b^2 = 0");

    std::set<BigInt> bad{BigInt(2), BigInt(3)};
    auto absorb = [&bad](const BigInt& n) {
        if (cmp(abs(n), 1) <= 0) return;
        for (const auto& p : prime_divisors(n)) bad.insert(p);
    };
    absorb(K->disc());
    absorb(common_denominator(a.c));
    absorb(common_denominator(b.c));
    BigRational nd = nf_norm(disc);
    absorb(nd.get_num());
    absorb(nd.get_den());

    Curve C{K, a, b, disc, std::move(bad)};
    return std::make_shared<const Curve>(std::move(C));
}

inline CurvePtr curve_q(const BigRational& a, const BigRational& b) {
    NfPtr Q = nf_rationals();
    return curve(Q, nf_from_rational(Q, a), nf_from_rational(Q, b));
}

// --- points and the group law ------------------------------------------------

struct CurvePoint {
    CurvePtr E;
    bool at_infinity = true;
    NfElement x, y;
};

inline CurvePoint point_infinity(const CurvePtr& E) {
    return {E, true, nf_zero(E->base), nf_zero(E->base)};
}

inline CurvePoint point(const CurvePtr& E, const NfElement& x, const NfElement& y) {
    NfElement rhs = x * x * x + E->a * x + E->b;
    require((y * y - rhs).is_zero(), errc::invalid_argument,
            "coordinates do not satisfy the curve equation");
    return {E, false, x, y};
}

inline CurvePoint point_q(const CurvePtr& E, const BigRational& x, const BigRational& y) {
    return point(E, nf_from_rational(E->base, x), nf_from_rational(E->base, y));
}

inline bool same_curve(const CurvePoint& P, const CurvePoint& Q) {
    if (P.E == Q.E) return true;
    return P.E->base->defining_poly() == Q.E->base->defining_poly() &&
           P.E->a == Q.E->a && P.E->b == Q.E->b;
}

inline bool point_eq(const CurvePoint& P, const CurvePoint& Q) {
    if (P.at_infinity || Q.at_infinity) return P.at_infinity == Q.at_infinity;
    return P.x == Q.x && P.y == Q.y;
}

inline CurvePoint point_neg(const CurvePoint& P) {
    if (P.at_infinity) return P;
    return {P.E, false, P.x, nf_zero(P.E->base) - P.y};
}

inline CurvePoint point_add(const CurvePoint& P, const CurvePoint& Q) {
    require(same_curve(P, Q), errc::invalid_argument, "points on different curves");
    if (P.at_infinity) return Q;
    if (Q.at_infinity) return P;
    const CurvePtr& E = P.E;
    NfElement lambda = nf_zero(E->base);
    if (P.x == Q.x) {
        NfElement ys = P.y + Q.y;
        if (ys.is_zero()) return point_infinity(E);
        // equal x with y2 != -y1 forces P = Q: tangent slope
        NfElement three = nf_from_rational(E->base, BigRational(3));
        NfElement two = nf_from_rational(E->base, BigRational(2));
        lambda = (three * P.x * P.x + E->a) / (two * P.y);
    } else {
        lambda = (Q.y - P.y) / (Q.x - P.x);
    }
    NfElement x3 = lambda * lambda - P.x - Q.x;
    NfElement y3 = lambda * (P.x - x3) - P.y;
    return {E, false, x3, y3};
}

inline CurvePoint point_sub(const CurvePoint& P, const CurvePoint& Q) {
    return point_add(P, point_neg(Q));
}

inline CurvePoint point_mul(const BigInt& n_in, const CurvePoint& P) {
    BigInt n = n_in;
    CurvePoint base = P;
    if (sgn(n) < 0) {
        n = -n;
        base = point_neg(base);
    }
    CurvePoint acc = point_infinity(P.E);
    long bits = sgn(n) == 0 ? 0 : static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2));
    for (long i = bits - 1; i >= 0; --i) {
        acc = point_add(acc, acc);
        if (mpz_tstbit(n.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = point_add(acc, base);
    }
    return acc;
}

inline CurvePoint point_mul(long n, const CurvePoint& P) { return point_mul(BigInt(n), P); }

inline std::string point_to_string(const CurvePoint& P) {
    if (P.at_infinity) return "O";
    return "(" + nf_to_poly(P.x).to_string("t") + ", " + nf_to_poly(P.y).to_string("t") + ")";
}

// --- reduction at a good place ----------------------------------------------

// Result of reducing at a good unramified place: either residue coordinates
// or the O-flag that the point lies in the kernel of reduction. For a finite
// kernel point m = v_w(-x/y) >= 1; for the exact point at infinity m = 0.
struct Reduction {
    bool o_flag = false;
    long m = 0;
    FqElem x, y;
};

struct ReducedCurve {
    explicit ReducedCurve(FqCtx ctx) : K(std::move(ctx)) {}
    FqCtx K;
    BigInt p;
    long f = 1;
    BigInt q;
    FqElem a, b;
    BigInt order; // #E(F_q), point at infinity included
};

inline void require_good(const Curve& E, const PrimeIdeal& w) {
    require(E.bad_primes.find(w.p) == E.bad_primes.end(), errc::bad_prime,
            "refused prime " + w.p.get_str());
    require(w.ramification == 1, errc::bad_prime, "ramified place " + w.to_string());
}

inline Reduction reduce_point(const CurvePoint& P, const PrimeIdeal& w) {
    require_good(*P.E, w);
    if (P.at_infinity) return {true, 0, {}, {}};
    const NfPtr& K = P.E->base;
    for (long digits = 64; digits <= (1L << 14); digits *= 2) {
        Completion C = complete_at(K, w, digits);
        PadicNumber xi = C.embed(P.x), yi = C.embed(P.y);
        // a non-exact zero at this many digits leaves the valuation
        // undetermined; retry deeper
        if ((xi.zflag && !xi.exact_zero()) || (yi.zflag && !yi.exact_zero())) continue;
        long vx = xi.val, vy = yi.val;
        if (vx >= 0) {
            require(vy >= 0, errc::internal_error,
                    "integral x with non-integral y at a good place");
            Reduction r{false, 0, pad_residue(xi), pad_residue(yi)};
            const FqCtx& Fq = C.W->Fq;
            FqElem ra = pad_residue(C.embed(P.E->a));
            FqElem rb = pad_residue(C.embed(P.E->b));
            FqElem rhs = fq_add(Fq, fq_mul(Fq, fq_mul(Fq, r.x, r.x), r.x),
                                fq_add(Fq, fq_mul(Fq, ra, r.x), rb));
            require(fq_mul(Fq, r.y, r.y) == rhs, errc::internal_error,
                    "residue point fell off the reduced curve");
            return r;
        }
        require(vx % 2 == 0 && 2 * vy == 3 * vx, errc::internal_error,
                "kernel valuations do not match the (-2m, -3m) pattern");
        return {true, -vx / 2, {}, {}};
    }
    raise(errc::precision_exhausted,
          "valuations did not stabilize while reducing at " + w.to_string());
}

inline constexpr long kPointCountCap = 1000000;

inline ReducedCurve count_points(const Curve& E, const PrimeIdeal& w) {
    require_good(E, w);
    require(cmp(w.norm, kPointCountCap) <= 0, errc::cap_exceeded,
            "residue field larger than the exhaustive-count cap: q = " + w.norm.get_str());
    Completion C = complete_at(E.base, w, 4);
    ReducedCurve rc(C.W->Fq);
    rc.p = w.p;
    rc.f = w.residue_degree;
    rc.q = w.norm;
    rc.a = pad_residue(C.embed(E.a));
    rc.b = pad_residue(C.embed(E.b));
    require(!fq_is_zero(pad_residue(C.embed(E.disc))), errc::internal_error,
            "discriminant vanished at a place marked good");

    // #E = 1 + sum_x (1 + chi(x^3 + ax + b)) with chi the quadratic character
    const FqCtx& Fq = rc.K;
    BigInt e = (rc.q - 1) / 2;
    FqElem one = fq_one(Fq);
    uint64_t n = rc.q.get_ui();
    BigInt order = 1;
    for (uint64_t i = 0; i < n; ++i) {
        FqElem x = fq_from_index(Fq, i);
        FqElem z = fq_add(Fq, fq_mul(Fq, fq_mul(Fq, x, x), x),
                          fq_add(Fq, fq_mul(Fq, rc.a, x), rc.b));
        if (fq_is_zero(z)) {
            order += 1;
        } else if (fq_pow(Fq, z, e) == one) {
            order += 2;
        }
    }
    rc.order = order;
    BigInt dev = rc.order - rc.q - 1;
    require(cmp(dev * dev, 4 * rc.q) <= 0, errc::internal_error,
            "point count outside the Hasse interval");
    return rc;
}

// --- arithmetic on the reduced curve ------------------------------------------

struct FqPoint {
    bool inf = true;
    FqElem x, y;
};

inline FqPoint reduction_to_fq(const Reduction& r) {
    if (r.o_flag) return {};
    return {false, r.x, r.y};
}

inline FqPoint rc_neg(const ReducedCurve& rc, FqPoint P) {
    if (!P.inf) P.y = fq_neg(rc.K, P.y);
    return P;
}

inline FqPoint rc_add(const ReducedCurve& rc, const FqPoint& P, const FqPoint& Q) {
    if (P.inf) return Q;
    if (Q.inf) return P;
    const FqCtx& K = rc.K;
    FqElem lambda;
    if (P.x == Q.x) {
        FqElem ys = fq_add(K, P.y, Q.y);
        if (fq_is_zero(ys)) return {};
        FqElem num = fq_add(K, fq_mul(K, fq_from_scalar(K, 3), fq_mul(K, P.x, P.x)), rc.a);
        lambda = fq_mul(K, num, fq_inv(K, ys));
    } else {
        lambda = fq_mul(K, fq_sub(K, Q.y, P.y), fq_inv(K, fq_sub(K, Q.x, P.x)));
    }
    FqElem x3 = fq_sub(K, fq_sub(K, fq_mul(K, lambda, lambda), P.x), Q.x);
    FqElem y3 = fq_sub(K, fq_mul(K, lambda, fq_sub(K, P.x, x3)), P.y);
    return {false, x3, y3};
}

inline FqPoint rc_mul(const ReducedCurve& rc, const BigInt& n_in, FqPoint P) {
    BigInt n = n_in;
    if (sgn(n) < 0) {
        n = -n;
        P = rc_neg(rc, P);
    }
    FqPoint acc;
    long bits = sgn(n) == 0 ? 0 : static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2));
    for (long i = bits - 1; i >= 0; --i) {
        acc = rc_add(rc, acc, acc);
        if (mpz_tstbit(n.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = rc_add(rc, acc, P);
    }
    return acc;
}

inline BigInt reduced_point_order(const ReducedCurve& rc, const FqPoint& P) {
    for (const auto& d : all_divisors(rc.order)) {
        if (rc_mul(rc, d, P).inf) return d;
    }
    raise(errc::internal_error, "point order does not divide the group order");
}

// --- amplification and the kernel-place statistic -----------------------------

struct AmplifyResult {
    BigInt m; // #E(F_q) at the chosen place
    CurvePoint Q;
};

inline AmplifyResult amplify(const CurvePoint& P, const PrimeIdeal& w) {
    ReducedCurve rc = count_points(*P.E, w);
    CurvePoint Q = point_mul(rc.order, P);
    require(reduce_point(Q, w).o_flag, errc::internal_error,
            "amplified point escaped the kernel of reduction");
    return {rc.order, Q};
}

// Sum of f_w log p over places w of norm <= X, p outside both refusal sets,
// where the point reduces to the identity. Kept exact as (p, multiplicity)
// pairs alongside the floating total.
struct PlaceLogSum {
    std::vector<std::pair<BigInt, long>> terms;
    double total = 0;
};

inline PlaceLogSum phi_X(const CurvePoint& P, const NfPtr& E_field, double X,
                         const std::set<BigInt>& P_bad) {
    require(E_field->defining_poly() == P.E->base->defining_poly(), errc::invalid_argument,
            "statistic requested over a different field than the curve's");
    PlaceLogSum out;
    for (BigInt p = 2; p.get_d() <= X; p = next_prime_above(p)) {
        if (P_bad.count(p) || P.E->bad_primes.count(p)) continue;
        long mult = 0;
        for (const auto& w : dedekind_factor(E_field, p)) {
            if (w.norm.get_d() > X) continue;
            if (reduce_point(P, w).o_flag) mult += w.residue_degree;
        }
        if (mult > 0) {
            out.terms.emplace_back(p, mult);
            out.total += static_cast<double>(mult) * std::log(p.get_d());
        }
    }
    return out;
}

} // namespace ntheight
