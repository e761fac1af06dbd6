#pragma once
// Naive and canonical heights on short Weierstrass curves, torsion detection
// with an exact reduction certificate, and bounded-height point search.
//
// The canonical height is the doubling limit 4^{-N} h_x([2^N]P) against the
// x-coordinate bundle (divisor 2(O)). Over the rationals the iteration never
// materializes the coordinates of [2^N]P: the common factor removed at each
// duplication divides the resultant R of the duplication forms, so tracking
// the numerator/denominator pair modulo a power of R recovers every gcd
// exactly, while a directed-rounding float pair carries the archimedean size.
// Over larger fields the doubling is performed on exact coordinates with a
// byte cap.

#include <ntheight/elliptic.hpp>

#include <algorithm>
#include <cmath>
#include <optional>

namespace ntheight {

struct HeightValue {
    double value = 0;
    double error = 0;   // certified: tail bound of the limit plus rounding slop
    long iterations = 0;
};

inline double naive_height(const CurvePoint& P) {
    require(!P.at_infinity, errc::infinity_point, "naive height of the point at infinity");
    return weil_height(P.x).value;
}

// --- torsion certificate -------------------------------------------------------

inline constexpr long kTorsionPrimeCap = 20000;

// Reduction is injective on torsion at a good unramified place of odd residue
// characteristic, so the order of P is pinned by the orders of its reductions
// at two places over distinct primes; the gcd of those orders is then tested
// against P by one exact multiplication.
struct TorsionCertificate {
    bool torsion = false;
    PrimeIdeal w1, w2;
    BigInt order1, order2, d;
    explicit operator bool() const { return torsion; }
};

inline TorsionCertificate is_torsion(const CurvePoint& P) {
    const CurvePtr& E = P.E;
    std::vector<PrimeIdeal> chosen;
    for (BigInt p = 5; chosen.size() < 2 && cmp(p, kTorsionPrimeCap) <= 0;
         p = next_prime_above(p)) {
        if (E->bad_primes.count(p)) continue;
        for (const auto& w : dedekind_factor(E->base, p)) {
            if (cmp(w.norm, kPointCountCap) <= 0) {
                chosen.push_back(w);
                break;
            }
        }
    }
    require(chosen.size() == 2, errc::insufficient_primes,
            "fewer than two countable good places below the prime cap");

    BigInt ords[2];
    for (int i = 0; i < 2; ++i) {
        ReducedCurve rc = count_points(*E, chosen[i]);
        FqPoint R = reduction_to_fq(reduce_point(P, chosen[i]));
        ords[i] = reduced_point_order(rc, R);
    }
    BigInt d = gcd(ords[0], ords[1]);
    TorsionCertificate cert;
    cert.w1 = chosen[0];
    cert.w2 = chosen[1];
    cert.order1 = ords[0];
    cert.order2 = ords[1];
    cert.d = d;
    cert.torsion = point_mul(d, P).at_infinity;
    return cert;
}

// --- canonical height ----------------------------------------------------------

namespace detail {

inline double log_abs_int(const BigInt& n) {
    if (sgn(n) == 0) return 0;
    signed long e = 0;
    double m = mpz_get_d_2exp(&e, n.get_mpz_t());
    return std::log(std::fabs(m)) + std::log(2.0) * static_cast<double>(e);
}

inline BigInt mod_nonneg(BigInt v, const BigInt& M) {
    v %= M;
    if (sgn(v) < 0) v += M;
    return v;
}

// doublings needed so the geometric tail delta/3 * 4^{-N} sinks under tol,
// with 10% headroom for rounding slop
inline long doubling_count(double delta, double tol) {
    long N = 0;
    double bound = delta / 3.0;
    while (bound > 0.9 * tol) {
        bound /= 4.0;
        ++N;
        require(N <= 200, errc::precision_exhausted, "tolerance beyond the doubling budget");
    }
    return N;
}

inline constexpr long kResidueBitCap = 1L << 26;     // modulus size, in bits
inline constexpr long kCoordByteCap = 1L << 24;      // exact-coordinate path, per point

// Rational fast path. The model is first rescaled to integral coefficients
// (x, y) -> (u^2 x, u^3 y), which leaves the limit untouched. With x = p/q in
// lowest terms, one duplication sends (p, q) to (phi(p,q)/d, psi(p,q)/d),
//   phi = X^4 - 2aX^2Z^2 - 8bXZ^3 + a^2Z^4,  psi = 4Z(X^3 + aXZ^2 + bZ^3),
// where d = gcd(phi, psi) divides R = Res(phi, psi). Residues mod M = R^{N+2}
// determine every d exactly (gcd(F mod M, R) = gcd(F, R) because R | M), and
// M shrinks by d per step, staying above R^2. The float pair tracks the
// normalized coordinates; the accumulator A_k = log max(|p_k|, |q_k|) is the
// exact naive height of the k-th doubling.
inline HeightValue canonical_q(const CurvePoint& P, double tol) {
    BigRational a0 = P.E->a.rational_value(), b0 = P.E->b.rational_value();

    BigInt u = 1;
    BigInt dens = a0.get_den() * b0.get_den();
    for (const auto& p : prime_divisors(dens)) {
        long va = valuation_int(a0.get_den(), p), vb = valuation_int(b0.get_den(), p);
        long k = std::max((va + 3) / 4, (vb + 5) / 6);
        u *= pow_int(p, k);
    }
    BigRational aq = a0 * BigRational(pow_int(u, 4)), bq = b0 * BigRational(pow_int(u, 6));
    require(aq.get_den() == 1 && bq.get_den() == 1, errc::internal_error,
            "model rescaling failed to clear denominators");
    BigInt A = aq.get_num(), B = bq.get_num();

    double delta = 8 + 4 * std::max({log_abs_int(A), log_abs_int(B), 1.0});
    long N = doubling_count(delta, tol);

    ZPoly phi({A * A, -8 * B, -2 * A, BigInt(0), BigInt(1)});
    ZPoly psi({4 * B, 4 * A, BigInt(0), BigInt(4)});
    BigRational Rq = resultant(to_qpoly(phi), to_qpoly(psi));
    BigInt R = abs(Rq.get_num());
    require(Rq.get_den() == 1 && sgn(R) > 0, errc::internal_error,
            "duplication forms have a vanishing resultant");
    long rbits = static_cast<long>(mpz_sizeinbase(R.get_mpz_t(), 2));
    require((N + 2) * rbits <= kResidueBitCap, errc::coordinate_blowup,
            "residue modulus would exceed the bit cap; retry with a larger tolerance");

    BigRational x0 = P.x.rational_value() * BigRational(u * u);
    BigInt M = pow_int(R, N + 2);
    BigInt p = mod_nonneg(x0.get_num(), M), q = mod_nonneg(x0.get_den(), M);

    const mpfr_prec_t prec = 320;
    BigInt mx0 = abs(x0.get_num());
    if (cmp(mx0, x0.get_den()) < 0) mx0 = x0.get_den();
    Iv acc = mx0 == 1 ? Iv::zero(prec) : iv_log_pos(Iv::point_int(mx0, prec), prec);
    BigRational unum(x0.get_num(), mx0), uden(x0.get_den(), mx0);
    unum.canonicalize();
    uden.canonicalize();
    Iv uf = Iv::point_rat(unum, prec);
    Iv vf = Iv::point_rat(uden, prec);

    BigRational c2a(-2 * A), c8b(-8 * B), ca2(A * A), cA(A), cB(B);
    for (long k = 0; k < N; ++k) {
        BigInt p2 = p * p % M, q2 = q * q % M;
        BigInt p4 = p2 * p2 % M, q4 = q2 * q2 % M, q3 = q2 * q % M;
        BigInt F = mod_nonneg(p4 - 2 * A % M * p2 % M * q2 - 8 * B % M * p % M * q3 +
                                  A * A % M * q4,
                              M);
        BigInt G = mod_nonneg(4 * q % M * (p2 * p % M + A % M * p % M * q2 + B % M * q3),
                              M);
        BigInt d = gcd(gcd(F, R), gcd(G, R));

        Iv u2 = iv_mul(uf, uf, prec), v2 = iv_mul(vf, vf, prec);
        Iv u3 = iv_mul(u2, uf, prec), v3 = iv_mul(v2, vf, prec);
        Iv Fi = iv_add(iv_add(iv_mul(u2, u2, prec), iv_mul_rat(iv_mul(u2, v2, prec), c2a, prec), prec),
                       iv_add(iv_mul_rat(iv_mul(uf, v3, prec), c8b, prec),
                              iv_mul_rat(iv_mul(v2, v2, prec), ca2, prec), prec),
                       prec);
        Iv inner = iv_add(u3, iv_add(iv_mul_rat(iv_mul(uf, v2, prec), cA, prec),
                                     iv_mul_rat(v3, cB, prec), prec),
                          prec);
        Iv Gi = iv_mul_long(iv_mul(vf, inner, prec), 4, prec);
        Iv mx = iv_max(iv_abs(Fi, prec), iv_abs(Gi, prec));
        require(mx.lo.sign() > 0, errc::precision_exhausted,
                "normalized duplication pair lost all certified digits");
        Iv logd = d == 1 ? Iv::zero(prec) : iv_log_pos(Iv::point_int(d, prec), prec);
        acc = iv_sub(iv_add(iv_mul_long(acc, 4, prec), iv_log_pos(mx, prec), prec), logd, prec);
        uf = iv_div_pos(Fi, mx, prec);
        vf = iv_div_pos(Gi, mx, prec);

        M /= d;
        p = F / d % M;
        q = G / d % M;
    }

    Iv val = iv_mul_rat(acc, BigRational(BigInt(1), pow_int(BigInt(4), N)), prec);
    double tail = delta * std::pow(4.0, static_cast<double>(-N)) / 3.0;
    return {val.mid(), tail + val.width() / 2, N};
}

inline long nf_coord_bytes(const NfElement& a) {
    long total = 0;
    for (const auto& c : a.c) {
        total += static_cast<long>(mpz_sizeinbase(c.get_num().get_mpz_t(), 2) / 8);
        total += static_cast<long>(mpz_sizeinbase(c.get_den().get_mpz_t(), 2) / 8);
    }
    return total;
}

// general number fields: exact doubling with a size cap
inline HeightValue canonical_nf(const CurvePoint& P, double tol) {
    Iv ha = weil_height_iv(P.E->a), hb = weil_height_iv(P.E->b);
    double delta = 8 + 4 * std::max({ha.hi.to_double(), hb.hi.to_double(), 1.0});
    long N = doubling_count(delta, tol);
    CurvePoint Q = P;
    for (long k = 0; k < N; ++k) {
        Q = point_add(Q, Q);
        require(nf_coord_bytes(Q.x) + nf_coord_bytes(Q.y) <= kCoordByteCap,
                errc::coordinate_blowup,
                "doubling coordinates exceed the byte cap; retry with a larger tolerance");
    }
    Iv h = weil_height_iv(Q.x);
    Iv val = iv_mul_rat(h, BigRational(BigInt(1), pow_int(BigInt(4), N)), kPlacePrec);
    double tail = delta * std::pow(4.0, static_cast<double>(-N)) / 3.0;
    return {val.mid(), tail + val.width() / 2, N};
}

} // namespace detail

inline HeightValue canonical_height(const CurvePoint& P, double tol) {
    require(tol > 0, errc::invalid_argument, "tolerance must be positive");
    // the limit vanishes exactly on torsion, and settling this first keeps
    // the duplication forms away from their common zeros at 2-power torsion
    if (P.at_infinity || is_torsion(P).torsion) return {0, 0, 0};
    if (P.E->base->is_rational()) return detail::canonical_q(P, tol);
    return detail::canonical_nf(P, tol);
}

// --- bounded search ------------------------------------------------------------

struct SearchRecord {
    NfPtr field;
    double bound = 0;
    long points_found = 0;
    std::optional<HeightValue> min_nonzero_hhat;
    std::optional<CurvePoint> min_point;
    std::vector<CurvePoint> torsion_found;
    // every non-torsion point that cleared the height cap, with its height
    std::vector<std::pair<CurvePoint, HeightValue>> kept;
};

// Enumerates x-coordinates whose coefficient numerators and common
// denominator sit in the box exp(naive_cap), in lexicographic order on
// (denominator, numerator vector), solves for y exactly, and buckets each
// point as certified torsion or by its canonical height.
inline SearchRecord search_small_points(const CurvePtr& E, const NfPtr& field,
                                        double naive_cap, double hhat_cap,
                                        long budget = 2000000) {
    require(field->degree() <= 6, errc::invalid_argument, "search fields are capped at degree 6");
    require(naive_cap >= 0, errc::invalid_argument, "negative naive-height cap");
    CurvePtr EK = E;
    if (E->base->defining_poly() != field->defining_poly()) {
        require(E->base->is_rational(), errc::invalid_argument,
                "curve must be rational or already defined over the search field");
        EK = curve(field, nf_from_rational(field, E->a.rational_value()),
                   nf_from_rational(field, E->b.rational_value()));
    }
    SearchRecord rec;
    rec.field = field;
    rec.bound = naive_cap;

    long H = static_cast<long>(std::floor(std::exp(naive_cap) + 1e-9));
    long deg = field->degree();
    double tol = field->is_rational() ? 1e-8 : std::max(2e-4, hhat_cap / 16);

    auto consider = [&](const NfElement& x) {
        NfElement rhs = x * x * x + EK->a * x + EK->b;
        for (const NfElement& y : sqrt_in_field(rhs)) {
            CurvePoint pt = point(EK, x, y);
            TorsionCertificate cert = is_torsion(pt);
            if (cert.torsion) {
                rec.torsion_found.push_back(pt);
                rec.points_found += 1;
                continue;
            }
            HeightValue hv = canonical_height(pt, tol);
            if (hv.value < hhat_cap) {
                rec.points_found += 1;
                rec.kept.emplace_back(pt, hv);
                if (!rec.min_nonzero_hhat || hv.value < rec.min_nonzero_hhat->value) {
                    rec.min_nonzero_hhat = hv;
                    rec.min_point = pt;
                }
            }
        }
    };

    long spent = 0;
    auto charge = [&]() {
        spent += 1;
        require(spent <= budget, errc::cap_exceeded, "search enumeration budget exhausted");
    };

    if (deg == 1) {
        for (long den = 1; den <= H; ++den) {
            for (long num = -H; num <= H; ++num) {
                if (gcd(BigInt(num), BigInt(den)) != 1) continue;
                charge();
                BigRational r(num, den);
                r.canonicalize();
                consider(nf_from_rational(field, r));
            }
        }
    } else {
        std::vector<long> n(deg, -H);
        for (long den = 1; den <= H; ++den) {
            std::fill(n.begin(), n.end(), -H);
            while (true) {
                BigInt content(den);
                for (long v : n) content = gcd(content, BigInt(v));
                if (content == 1) {
                    charge();
                    NfElement x{field, std::vector<BigRational>(deg)};
                    for (long i = 0; i < deg; ++i) {
                        x.c[i] = BigRational(n[i], den);
                        x.c[i].canonicalize();
                    }
                    // the box is a superset of the height ball; drop candidates
                    // certified above the cap
                    if (x.is_zero() || weil_height_iv(x).lo.to_double() <= naive_cap + 1e-9)
                        consider(x);
                }
                long i = deg - 1;
                while (i >= 0 && n[i] == H) {
                    n[i] = -H;
                    --i;
                }
                if (i < 0) break;
                n[i] += 1;
            }
        }
    }
    return rec;
}

} // namespace ntheight
