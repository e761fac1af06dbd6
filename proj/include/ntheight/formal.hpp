#pragma once
// Formal expansions at the origin of a short Weierstrass curve: the parameter
// w(z) solving w = z^3 + a z w^2 + b w^3, the Laurent expansions of the
// coordinate functions, the two-variable addition law, and the
// multiplication-by-N series. Everything here works over the rationals; the
// p-adic layers embed these expansions coefficientwise.

#include <ntheight/elliptic.hpp>
#include <ntheight/series.hpp>

namespace ntheight {

inline constexpr long kFormalPrecCap = 400;
inline constexpr long kBivariatePrecCap = 60;

namespace detail {

inline std::pair<BigRational, BigRational> rational_curve_coeffs(const CurvePtr& E) {
    require(E->base->is_rational(), errc::invalid_argument,
            "formal expansions are implemented for curves over the rationals");
    return {E->a.rational_value(), E->b.rational_value()};
}

} // namespace detail

// w(z) with w = z^3 + a z w^2 + b w^3, as a power series known through
// z^(prec-1); the low-order expansion is z^3 + a z^7 + b z^9 + ...
inline QS formal_w(const CurvePtr& E, long prec) {
    require(prec >= 4 && prec <= kFormalPrecCap, errc::invalid_argument,
            "formal parameter precision out of range");
    auto [a, b] = detail::rational_curve_coeffs(E);
    QRing R;
    QS z3 = ser_monomial(R, R.one(), 3, prec);
    QS z1 = ser_monomial(R, R.one(), 1, prec);
    QS w = z3;
    // Newton iteration on G(w) = w - z^3 - a z w^2 - b w^3; the derivative
    // 1 - 2 a z w - 3 b w^2 is a unit, so each step doubles the correct range
    for (int iter = 0; iter < 64; ++iter) {
        QS w2 = ser_truncate(R, ser_mul(R, w, w), prec);
        QS w3 = ser_truncate(R, ser_mul(R, w2, w), prec);
        QS g = ser_sub(R, w, z3);
        g = ser_sub(R, g, ser_scale(R, ser_mul(R, z1, w2), a));
        g = ser_sub(R, g, ser_scale(R, w3, b));
        g = ser_truncate(R, std::move(g), prec);
        if (ser_is_zero(R, g)) return w;
        QS gp = ser_monomial(R, R.one(), 0, prec);
        gp = ser_sub(R, gp, ser_scale(R, ser_mul(R, z1, w), 2 * a));
        gp = ser_sub(R, gp, ser_scale(R, w2, 3 * b));
        w = ser_truncate(R, ser_sub(R, w, ser_div(R, g, gp)), prec);
    }
    raise(errc::internal_error, "formal parameter iteration failed to stabilize");
}

// Laurent expansions x(z) = z/w and y(z) = -1/w, with coefficients known
// through z^(prec-1); x has a double pole and y a triple pole
inline std::pair<QS, QS> weierstrass_laurent(const CurvePtr& E, long prec) {
    require(prec >= 1, errc::invalid_argument, "precision must be positive");
    long wp = std::min(prec + 8, kFormalPrecCap);
    require(prec + 8 <= kFormalPrecCap, errc::invalid_argument,
            "requested expansion exceeds the formal precision cap");
    QRing R;
    QS w = formal_w(E, wp);
    QS winv = ser_inv(R, w);
    QS x = ser_truncate(R, ser_mul(R, ser_monomial(R, R.one(), 1, wp), winv), prec);
    QS y = ser_truncate(R, ser_neg(R, winv), prec);
    return {x, y};
}

// Expansions of x([N]z) and y([N]z) by repeated chord addition on series:
// the tangent formula gives the doubling step and P_(k+1) = P_k + P_1 the
// rest, with every division by X_1 - X_k a unit Laurent division (the leading
// coefficients 1 and 1/k^2 differ for k >= 2).
inline std::pair<QS, QS> mult_xy(const CurvePtr& E, long N, long prec) {
    require(N >= 1, errc::invalid_argument, "multiplication degree must be positive");
    auto [a, b] = detail::rational_curve_coeffs(E);
    QRing R;
    long wp = prec + 4 * N + 8;
    require(wp <= kFormalPrecCap, errc::invalid_argument,
            "requested expansion exceeds the formal precision cap");
    auto [X1, Y1] = weierstrass_laurent(E, wp);
    if (N == 1) return {ser_truncate(R, X1, prec), ser_truncate(R, Y1, prec)};
    // tangent doubling
    QS num = ser_scale(R, ser_mul(R, X1, X1), BigRational(3));
    num = ser_add(R, num, ser_monomial(R, a, 0, num.prec));
    QS lam = ser_div(R, num, ser_scale(R, Y1, BigRational(2)));
    QS Xk = ser_sub(R, ser_mul(R, lam, lam), ser_scale(R, X1, BigRational(2)));
    QS Yk = ser_sub(R, ser_mul(R, lam, ser_sub(R, X1, Xk)), Y1);
    for (long k = 2; k < N; ++k) {
        QS l = ser_div(R, ser_sub(R, Y1, Yk), ser_sub(R, X1, Xk));
        QS Xn = ser_sub(R, ser_sub(R, ser_mul(R, l, l), Xk), X1);
        QS Yn = ser_sub(R, ser_mul(R, l, ser_sub(R, Xk, Xn)), Yk);
        Xk = std::move(Xn);
        Yk = std::move(Yn);
    }
    return {ser_truncate(R, Xk, prec), ser_truncate(R, Yk, prec)};
}

// two-variable addition law F(z1, z2) = z1 + z2 + ..., commutative, with
// F(z, 0) = z; obtained by intersecting the chord through (z1, w1), (z2, w2)
// with the cubic in (z, w) coordinates and negating the third root
inline BiSeries formal_group_law(const CurvePtr& E, long prec) {
    require(prec >= 2 && prec <= kBivariatePrecCap, errc::invalid_argument,
            "bivariate precision out of range");
    auto [a, b] = detail::rational_curve_coeffs(E);
    QRing R;
    long wp = prec + 8;
    QS w = formal_w(E, std::min(wp, kFormalPrecCap));
    // lambda = (w(z2) - w(z1)) / (z2 - z1) via divided differences:
    // contributes w_n * sum_{i+j=n-1} z1^i z2^j for each n
    BiSeries lam = BiSeries::zero(prec);
    for (long n = 3; n < wp && n <= prec; ++n) {
        BigRational wn = n < w.prec ? ser_coeff(R, w, n) : BigRational(0);
        if (sgn(wn) == 0) continue;
        for (long i = 0; i <= n - 1; ++i) {
            long j = n - 1 - i;
            if (i + j >= prec) continue;
            lam.set(i, j, lam.coeff(i, j) + wn);
        }
    }
    // nu = w(z1) - lambda z1
    BiSeries nu = BiSeries::zero(prec);
    for (long n = 3; n < w.prec && n < prec; ++n) {
        BigRational wn = ser_coeff(R, w, n);
        if (sgn(wn) != 0) nu.set(n, 0, wn);
    }
    BiSeries lam_z1 = BiSeries::zero(prec);
    for (long i = 0; i + 1 < prec; ++i)
        for (long j = 0; i + 1 + j < prec; ++j) lam_z1.set(i + 1, j, lam.coeff(i, j));
    nu = bi_sub(nu, lam_z1);
    // substitute the chord w = lambda z + nu into the cubic; with
    // c3 = 1 + a lambda^2 + b lambda^3 and c2 = 2 a lambda nu + 3 b lambda^2 nu,
    // the three intersection parameters satisfy z1 + z2 + z3 = -c2/c3, and
    // inversion is z -> -z on a short Weierstrass model
    BiSeries lam2 = bi_mul(lam, lam);
    BiSeries lam3 = bi_mul(lam2, lam);
    BiSeries c3 = bi_add(bi_scale(lam2, a), bi_scale(lam3, b));
    c3.set(0, 0, c3.coeff(0, 0) + 1);
    BiSeries c2 = bi_mul(bi_add(bi_scale(lam, 2 * a), bi_scale(lam2, 3 * b)), nu);
    BiSeries F = bi_mul(c2, bi_inv(c3));
    F.set(1, 0, F.coeff(1, 0) + 1);
    F.set(0, 1, F.coeff(0, 1) + 1);
    return F;
}

// [N](z) as a power series N z + ...; for small precision this iterates the
// addition law, [k+1](z) = F([k](z), z), and beyond the bivariate range it
// falls back to the chord expansions via [N](z) = -x([N]z)/y([N]z)
inline QS mult_series(const CurvePtr& E, long N, long prec) {
    require(N >= 1, errc::invalid_argument, "multiplication degree must be positive");
    require(prec >= 2, errc::invalid_argument, "precision must be at least 2");
    QRing R;
    QS z = ser_monomial(R, R.one(), 1, prec);
    if (N == 1) return z;
    if (prec <= kBivariatePrecCap) {
        BiSeries F = formal_group_law(E, prec);
        QS s = z;
        for (long k = 2; k <= N; ++k) s = bi_eval(R, F, s, z);
        return s;
    }
    auto [X, Y] = mult_xy(E, N, prec + 6);
    return ser_truncate(R, ser_neg(R, ser_div(R, X, Y)), prec);
}

} // namespace ntheight
