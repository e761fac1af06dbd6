#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "ball.hpp"
#include "poly.hpp"

namespace ntheight {

// Certified complex root isolation.
//
// Strategy: Aberth-Ehrlich iteration in plain floating point to get candidate
// centers, then a Weierstrass a-posteriori bound to turn the candidates into
// disks that provably contain one root each.  With W_i = f(z_i) / prod_{j!=i}
// (z_i - z_j) for monic f, the union of the disks D(z_i, n|W_i|) contains
// every root, and a connected component made of k disks contains exactly k
// roots.  Pairwise disjoint disks therefore certify one root per disk.
// Realness is settled by an exact Sturm count: disks that stay clear of the
// real axis are certainly non-real, and if the number of axis-touching disks
// equals the Sturm count, each of those holds exactly one real root.

// --- exact Sturm machinery ---------------------------------------------------

inline std::vector<QPoly> sturm_chain(const QPoly& f) {
    std::vector<QPoly> chain;
    chain.push_back(f);
    QPoly d = f.derivative();
    if (!d.is_zero()) chain.push_back(d);
    while (chain.size() >= 2 && !chain.back().is_zero()) {
        QPoly r = chain[chain.size() - 2] % chain.back();
        if (r.is_zero()) break;
        chain.push_back(r * BigRational(-1));
    }
    return chain;
}

namespace detail {

inline int sign_at_pos_inf(const QPoly& p) { return sgn(p.lc()); }
inline int sign_at_neg_inf(const QPoly& p) {
    int s = sgn(p.lc());
    return (p.degree() % 2 == 0) ? s : -s;
}

inline long sign_variations(const std::vector<int>& signs) {
    long v = 0;
    int prev = 0;
    for (int s : signs) {
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++v;
        prev = s;
    }
    return v;
}

} // namespace detail

// Number of distinct real roots of a squarefree polynomial.
inline long count_real_roots(const QPoly& f) {
    require(f.degree() >= 0, errc::invalid_argument, "zero polynomial has no root count");
    if (f.degree() == 0) return 0;
    require(is_squarefree(f), errc::invalid_argument, "Sturm count requires a squarefree polynomial");
    auto chain = sturm_chain(f);
    std::vector<int> at_neg, at_pos;
    for (const auto& p : chain) {
        at_neg.push_back(detail::sign_at_neg_inf(p));
        at_pos.push_back(detail::sign_at_pos_inf(p));
    }
    return detail::sign_variations(at_neg) - detail::sign_variations(at_pos);
}

// Real roots in the half-open interval (a, b].
inline long count_real_roots_in(const QPoly& f, const BigRational& a, const BigRational& b) {
    require(f.degree() >= 1, errc::invalid_argument, "need a nonconstant polynomial");
    require(is_squarefree(f), errc::invalid_argument, "Sturm count requires a squarefree polynomial");
    require(a < b, errc::invalid_argument, "empty interval in root count");
    auto chain = sturm_chain(f);
    std::vector<int> at_a, at_b;
    for (const auto& p : chain) {
        at_a.push_back(sgn(p.eval(a)));
        at_b.push_back(sgn(p.eval(b)));
    }
    return detail::sign_variations(at_a) - detail::sign_variations(at_b);
}

// --- plain complex arithmetic used only inside the iteration -----------------

namespace detail {

struct Cpx {
    Bf re, im;
};

inline Cpx cx_make(double re, double im, mpfr_prec_t prec) {
    return {Bf::of_double(re, prec), Bf::of_double(im, prec)};
}
inline Cpx cx_add(const Cpx& a, const Cpx& b, mpfr_prec_t p) {
    return {bf_add(a.re, b.re, p, MPFR_RNDN), bf_add(a.im, b.im, p, MPFR_RNDN)};
}
inline Cpx cx_sub(const Cpx& a, const Cpx& b, mpfr_prec_t p) {
    return {bf_sub(a.re, b.re, p, MPFR_RNDN), bf_sub(a.im, b.im, p, MPFR_RNDN)};
}
inline Cpx cx_mul(const Cpx& a, const Cpx& b, mpfr_prec_t p) {
    return {bf_sub(bf_mul(a.re, b.re, p, MPFR_RNDN), bf_mul(a.im, b.im, p, MPFR_RNDN), p, MPFR_RNDN),
            bf_add(bf_mul(a.re, b.im, p, MPFR_RNDN), bf_mul(a.im, b.re, p, MPFR_RNDN), p, MPFR_RNDN)};
}
inline Cpx cx_div(const Cpx& a, const Cpx& b, mpfr_prec_t p) {
    Bf n2 = bf_add(bf_mul(b.re, b.re, p, MPFR_RNDN), bf_mul(b.im, b.im, p, MPFR_RNDN), p, MPFR_RNDN);
    Cpx num = cx_mul(a, Cpx{b.re, bf_neg(b.im, p, MPFR_RNDN)}, p);
    return {bf_div(num.re, n2, p, MPFR_RNDN), bf_div(num.im, n2, p, MPFR_RNDN)};
}
inline bool cx_is_zero(const Cpx& a) { return a.re.is_zero() && a.im.is_zero(); }
inline Bf cx_abs_ub(const Cpx& a) { return bf_hypot(a.re, a.im, kRadPrec, MPFR_RNDU); }

// Horner with simultaneous derivative
inline void cx_eval_fd(const std::vector<Cpx>& monic, const Cpx& z, mpfr_prec_t p, Cpx& f, Cpx& df) {
    f = cx_make(1.0, 0.0, p); // leading coefficient of the monic input
    df = cx_make(0.0, 0.0, p);
    for (size_t i = monic.size(); i-- > 0;) {
        df = cx_add(cx_mul(df, z, p), f, p);
        f = cx_add(cx_mul(f, z, p), monic[i], p);
    }
}

} // namespace detail

struct RootEnclosure {
    CBall disk;   // certified to contain exactly one root of the input
    bool is_real; // certified via the Sturm count

    // Real roots get a tight real interval view of the disk.
    Iv real_interval(mpfr_prec_t prec) const {
        require(is_real, errc::invalid_argument, "real_interval on a non-real root");
        Bf rad_up = disk.rad;
        return {bf_sub(disk.re, rad_up, prec, MPFR_RNDD), bf_add(disk.re, rad_up, prec, MPFR_RNDU)};
    }
};

struct RootSet {
    std::vector<RootEnclosure> roots; // reals first (ascending), then conjugate pairs
    long n_real = 0;
    mpfr_prec_t prec_used = 0;
};

inline constexpr mpfr_prec_t kRootPrecCap = 4096;

// Isolate all complex roots of a squarefree polynomial into pairwise disjoint
// certified disks of radius at most 2^-acc_bits * max(1, |center|).  Raises
// precision_exhausted if the working precision cap is reached first.
inline RootSet isolate_roots(const QPoly& f_in, long acc_bits = 128) {
    require(f_in.degree() >= 0, errc::invalid_argument, "cannot isolate roots of the zero polynomial");
    require(acc_bits >= 8, errc::invalid_argument, "accuracy request too small");
    const long n = f_in.degree();
    RootSet out;
    if (n == 0) return out;
    require(is_squarefree(f_in), errc::invalid_argument, "root isolation requires a squarefree input");

    QPoly f = f_in * (BigRational(1) / f_in.lc()); // monic, exact
    const long n_real_exact = count_real_roots(f);

    // Cauchy bound: all roots lie in |z| <= 1 + max |a_i|
    double root_bound = 1.0;
    for (long i = 0; i < n; ++i) {
        double c = std::abs(f.coeff(i).get_d());
        if (c + 1.0 > root_bound) root_bound = c + 1.0;
    }
    if (!std::isfinite(root_bound) || root_bound > 1e280) root_bound = 1e280;

    mpfr_prec_t prec = std::max<mpfr_prec_t>(192, 2 * acc_bits + 64);
    for (; prec <= kRootPrecCap; prec *= 2) {
        // deterministic starting configuration on a spiral inside the bound
        std::vector<detail::Cpx> z;
        std::vector<detail::Cpx> coeffs;
        for (long i = 0; i < n; ++i) {
            BigRational c = f.coeff(i);
            coeffs.push_back({Bf::of_rat(c, prec, MPFR_RNDN), Bf::of_long(0, prec)});
        }
        for (long k = 0; k < n; ++k) {
            double theta = 2.0 * 3.14159265358979323846 * (double)k / (double)n + 0.376;
            double r = root_bound * (0.3 + 0.6 * (double)(k + 1) / (double)n);
            z.push_back(detail::cx_make(r * std::cos(theta), r * std::sin(theta), prec));
        }

        const long max_sweeps = 80 + 10 * n;
        Bf tol = bf_pow2(-(acc_bits + 8), kRadPrec);
        for (long sweep = 0; sweep < max_sweeps; ++sweep) {
            Bf worst = Bf::of_long(0, kRadPrec);
            for (long i = 0; i < n; ++i) {
                detail::Cpx fv, dv;
                detail::cx_eval_fd(coeffs, z[i], prec, fv, dv);
                if (detail::cx_is_zero(fv)) continue;
                if (detail::cx_is_zero(dv)) {
                    // nudge off the critical point, deterministically
                    z[i].re = bf_add(z[i].re, bf_pow2(-(long)prec / 3, prec), prec, MPFR_RNDN);
                    detail::cx_eval_fd(coeffs, z[i], prec, fv, dv);
                    if (detail::cx_is_zero(dv)) continue;
                }
                detail::Cpx w = detail::cx_div(fv, dv, prec); // Newton correction
                detail::Cpx s = detail::cx_make(0.0, 0.0, prec);
                for (long j = 0; j < n; ++j) {
                    if (j == i) continue;
                    detail::Cpx d = detail::cx_sub(z[i], z[j], prec);
                    if (detail::cx_is_zero(d)) d.re = bf_pow2(-(long)prec / 3, prec);
                    s = detail::cx_add(s, detail::cx_div(detail::cx_make(1.0, 0.0, prec), d, prec), prec);
                }
                detail::Cpx denom = detail::cx_sub(detail::cx_make(1.0, 0.0, prec),
                                                   detail::cx_mul(w, s, prec), prec);
                detail::Cpx corr = detail::cx_is_zero(denom) ? w : detail::cx_div(w, denom, prec);
                z[i] = detail::cx_sub(z[i], corr, prec);
                Bf mag = detail::cx_abs_ub(corr);
                Bf scale = detail::cx_abs_ub(z[i]);
                if (bf_cmp(scale, Bf::of_long(1, kRadPrec)) < 0) scale = Bf::of_long(1, kRadPrec);
                Bf rel = bf_div(mag, scale, kRadPrec, MPFR_RNDU);
                if (bf_cmp(rel, worst) > 0) worst = rel;
            }
            if (bf_cmp(worst, tol) < 0) break;
        }

        // certification: Weierstrass disks around the candidates
        std::vector<CBall> disks;
        bool cert_ok = true;
        for (long i = 0; i < n && cert_ok; ++i) {
            CBall zi = CBall::of_centers(z[i].re, z[i].im);
            CBall fz = cb_eval_poly(f, zi, prec);
            Bf num_ub = cb_abs(fz, kRadPrec).hi;
            Bf den_lb = Bf::of_long(1, kRadPrec);
            for (long j = 0; j < n; ++j) {
                if (j == i) continue;
                CBall zj = CBall::of_centers(z[j].re, z[j].im);
                Bf d = cb_center_dist_lb(zi, zj);
                if (d.sign() <= 0) {
                    cert_ok = false;
                    break;
                }
                den_lb = bf_mul(den_lb, d, kRadPrec, MPFR_RNDD);
            }
            if (!cert_ok) break;
            Bf rad = bf_mul_long(bf_div(num_ub, den_lb, kRadPrec, MPFR_RNDU), n, kRadPrec, MPFR_RNDU);
            zi.rad = rad;
            disks.push_back(zi);
        }
        if (!cert_ok) continue;

        // pairwise disjoint and tight enough?
        for (long i = 0; i < n && cert_ok; ++i) {
            Bf scale = cb_center_abs_ub(disks[i]);
            if (bf_cmp(scale, Bf::of_long(1, kRadPrec)) < 0) scale = Bf::of_long(1, kRadPrec);
            Bf want = bf_mul(bf_pow2(-acc_bits, kRadPrec), scale, kRadPrec, MPFR_RNDD);
            if (bf_cmp(disks[i].rad, want) > 0) cert_ok = false;
            for (long j = i + 1; j < n && cert_ok; ++j) {
                Bf gap = cb_center_dist_lb(disks[i], disks[j]);
                Bf need = bf_add(disks[i].rad, disks[j].rad, kRadPrec, MPFR_RNDU);
                if (bf_cmp(gap, need) <= 0) cert_ok = false;
            }
        }
        if (!cert_ok) continue;

        // realness: disks clear of the axis are non-real; the rest must match
        // the exact real-root count one-for-one
        std::vector<bool> touches(n);
        long n_touch = 0;
        for (long i = 0; i < n; ++i) {
            Bf im_lb = bf_sub(bf_abs(disks[i].im, kRadPrec, MPFR_RNDD), disks[i].rad, kRadPrec, MPFR_RNDD);
            touches[i] = (im_lb.sign() <= 0);
            if (touches[i]) ++n_touch;
        }
        if (n_touch != n_real_exact) continue; // ambiguous; retry at higher precision

        for (long i = 0; i < n; ++i) {
            RootEnclosure e{disks[i], touches[i]};
            if (e.is_real) {
                // pin the center onto the axis; the disk still contains the root
                Bf widened = bf_add(e.disk.rad, bf_abs(e.disk.im, kRadPrec, MPFR_RNDU), kRadPrec, MPFR_RNDU);
                e.disk.im = Bf::of_long(0, prec);
                e.disk.rad = widened;
            }
            out.roots.push_back(std::move(e));
        }
        std::sort(out.roots.begin(), out.roots.end(), [](const RootEnclosure& a, const RootEnclosure& b) {
            if (a.is_real != b.is_real) return a.is_real;
            int c = bf_cmp(a.disk.re, b.disk.re);
            if (c != 0) return c < 0;
            Bf ia = bf_abs(a.disk.im, kRadPrec, MPFR_RNDU), ib = bf_abs(b.disk.im, kRadPrec, MPFR_RNDU);
            c = bf_cmp(ia, ib);
            if (c != 0) return c < 0;
            return a.disk.im.sign() > b.disk.im.sign();
        });
        out.n_real = n_real_exact;
        out.prec_used = prec;
        return out;
    }
    raise(errc::precision_exhausted, "root isolation hit the precision cap at " +
                                         std::to_string((long)kRootPrecCap) + " bits");
}

// Enclosure of sum log max(1, |root_i|) over all enclosed roots: the
// archimedean block of a height computed from a minimal polynomial.
inline Iv sum_log_plus_roots(const RootSet& rs, mpfr_prec_t prec) {
    Iv acc = Iv::zero(prec);
    for (const auto& r : rs.roots) {
        Iv a = cb_abs(r.disk, prec);
        acc = iv_add(acc, iv_log_pos(iv_max1(a, prec), prec), prec);
    }
    return acc;
}

} // namespace ntheight
