#pragma once

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

#include "ball.hpp"
#include "number_field.hpp"
#include "padic.hpp"
#include "roots.hpp"
#include "splitting.hpp"

namespace ntheight {

// Places of a number field and the height machine built on them: completions
// at finite places, local valuations, the Weil height of an algebraic number,
// the product-formula defect as a certified enclosure, and the Liouville
// two-sided bound on products of local distances.

// An archimedean place, identified by its representative root among the
// field's embeddings (reals first, then one of each conjugate pair).
struct ArchPlace {
    long root_index = 0;
    long local_degree = 1; // 1 real, 2 complex
};

using Place = std::variant<ArchPlace, PrimeIdeal>;

inline std::vector<ArchPlace> arch_places(const NfPtr& K) {
    std::vector<ArchPlace> out;
    for (long i = 0; i < K->r1(); ++i) out.push_back({i, 1});
    for (long j = 0; j < K->r2(); ++j) out.push_back({K->r1() + 2 * j, 2});
    return out;
}

// --- completions at finite places -------------------------------------------

// K_w for an unramified place w | p: the defining polynomial factors mod p,
// the factor belonging to w is Hensel-lifted to p^digits, and theta maps to
// the class of x.  Embedding an element is then polynomial remainder.
struct Completion {
    NfPtr K;
    PrimeIdeal w;
    PadicFieldPtr W;

    PadicNumber embed(const NfElement& a) const {
        require(a.K->defining_poly() == K->defining_poly(), errc::invalid_argument,
                "element belongs to a different field");
        long prec = W->k;
        long shift = 0;
        bool nonzero = false;
        for (const auto& c : a.c) {
            if (sgn(c) == 0) continue;
            long v = valuation_rat(c, W->p);
            if (!nonzero || v < shift) shift = v;
            nonzero = true;
        }
        if (!nonzero) return pad_exact_zero(W);
        BigInt pm = W->pow_p(prec);
        std::vector<BigInt> digits(a.c.size(), BigInt(0));
        for (size_t i = 0; i < a.c.size(); ++i) {
            if (sgn(a.c[i]) == 0) continue;
            BigRational scaled = a.c[i];
            if (shift >= 0)
                scaled /= BigRational(W->pow_p(shift));
            else
                scaled *= BigRational(W->pow_p(-shift));
            BigInt den = scaled.get_den(), dinv;
            require(mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), pm.get_mpz_t()) != 0,
                    errc::internal_error, "denominator kept a factor of p after scaling");
            BigInt d = ((scaled.get_num() % pm) * dinv) % pm;
            if (sgn(d) < 0) d += pm;
            digits[i] = d;
        }
        return detail::pad_make(W, std::move(digits), shift, shift + prec);
    }
};

inline Completion complete_at(const NfPtr& K, const PrimeIdeal& w, long digits = 64) {
    require(w.ramification == 1, errc::invalid_argument, "completions are built unramified only");
    Completion C;
    C.K = K;
    C.w = w;
    if (w.residue_degree == K->degree()) {
        // inert: the defining polynomial itself is the local modulus
        C.W = padic_field_with_modulus(w.p, digits, K->defining_poly());
        return C;
    }
    FpCtx F(static_cast<uint64_t>(w.p.get_ui()));
    FpPoly fbar = fp_from(F, K->defining_poly());
    FpPoly q, h0;
    fp_divrem(F, fbar, w.factor_poly, q, h0);
    require(h0.is_zero(), errc::internal_error, "place factor does not divide f mod p");
    auto pair = detail::hensel_lift_pair(K->defining_poly(), F, w.factor_poly, q,
                                         pow_int(w.p, digits));
    C.W = padic_field_with_modulus(w.p, digits, pair.g);
    return C;
}

// Exact valuation of a nonzero element at w, with automatic digit escalation
// when the element vanishes deeper than the working precision.
inline long v_w(const NfElement& a, const PrimeIdeal& w) {
    require(!a.is_zero(), errc::zero_element, "valuation of zero");
    // a lives in Z[theta] localized; bind a field handle for the completion
    NfPtr K = a.K;
    for (long digits = 64; digits <= (1 << 14); digits *= 2) {
        Completion C = complete_at(K, w, digits);
        PadicNumber img = C.embed(a);
        if (!img.zflag) return img.val;
    }
    raise(errc::precision_exhausted, "valuation exceeds the digit escalation cap at " +
                                         w.to_string());
}

// --- heights ----------------------------------------------------------------

struct Enclosure {
    double value = 0;
    double error = 0;
};

inline constexpr mpfr_prec_t kPlacePrec = 256;

namespace detail {

inline Enclosure to_enclosure(const Iv& iv) {
    Enclosure e;
    e.value = iv.mid();
    e.error = iv.width() / 2;
    return e;
}

} // namespace detail

// Weil height of alpha via its minimal polynomial: with G the primitive
// integer form of the minimal polynomial, d its degree and alpha_i its roots,
//   h(alpha) = (1/d) (log|lc(G)| + sum_i log max(1, |alpha_i|)).
// The finite part is exact by Gauss's lemma; the archimedean block comes from
// certified root enclosures.
inline Iv weil_height_iv(const NfElement& a) {
    if (a.is_rational()) {
        BigRational x = a.rational_value();
        if (sgn(x) == 0) return Iv::zero(kPlacePrec);
        BigInt num = abs(x.get_num()), den = x.get_den();
        BigInt mx = cmp(num, den) >= 0 ? num : den;
        if (mx == 1) return Iv::zero(kPlacePrec);
        return iv_log_pos(Iv::point_int(mx, kPlacePrec), kPlacePrec);
    }
    QPoly mp = nf_minpoly(a);
    long d = mp.degree();
    ZPoly G = to_primitive(mp);
    BigInt lc = abs(G.lc());
    RootSet rs = isolate_roots(to_qpoly(G), 192);
    Iv arch = sum_log_plus_roots(rs, kPlacePrec);
    Iv lead = (lc == 1) ? Iv::zero(kPlacePrec) : iv_log_pos(Iv::point_int(lc, kPlacePrec), kPlacePrec);
    Iv total = iv_add(lead, arch, kPlacePrec);
    return iv_mul_rat(total, BigRational(1, static_cast<unsigned long>(d)), kPlacePrec);
}

inline Enclosure weil_height(const NfElement& a) { return detail::to_enclosure(weil_height_iv(a)); }

// Same height summed place by place: exact finite valuations plus embedding
// moduli.  Only usable when every denominator prime avoids disc; serves as an
// independent route for agreement tests.
inline Iv weil_height_by_places_iv(const NfElement& a) {
    const long n = a.K->degree();
    if (a.is_zero()) return Iv::zero(kPlacePrec);
    Iv total = Iv::zero(kPlacePrec);
    // archimedean: (1/n) sum over all embeddings of log max(1, |sigma(a)|)
    for (const auto& z : nf_conjugates(a, kPlacePrec)) {
        Iv m = iv_max1(cb_abs(z, kPlacePrec), kPlacePrec);
        total = iv_add(total, iv_log_pos(m, kPlacePrec), kPlacePrec);
    }
    // finite: only primes dividing a coordinate denominator can see a pole
    BigInt den = common_denominator(a.c);
    for (const BigInt& p : prime_divisors(den)) {
        long weighted = 0;
        for (const auto& w : dedekind_factor(a.K, p)) {
            long v = v_w(a, w);
            if (v < 0) weighted += -v * w.residue_degree;
        }
        if (weighted == 0) continue;
        Iv logp = iv_log_pos(Iv::point_int(p, kPlacePrec), kPlacePrec);
        total = iv_add(total, iv_mul_long(logp, weighted, kPlacePrec), kPlacePrec);
    }
    return iv_mul_rat(total, BigRational(1, static_cast<unsigned long>(n)), kPlacePrec);
}

inline Enclosure weil_height_by_places(const NfElement& a) {
    return detail::to_enclosure(weil_height_by_places_iv(a));
}

// Sum over every place of d_v log|alpha|_v.  The product formula makes the
// true value 0; the returned enclosure must contain it.  Finite contributions
// are taken from the factored field norm, which equals the valuation sum
// without needing prime splitting; at non-index primes the per-place
// valuations are recomputed and checked against that shortcut.
inline Iv product_formula_defect_iv(const NfElement& a) {
    require(!a.is_zero(), errc::zero_element, "product formula needs a nonzero element");
    Iv total = Iv::zero(kPlacePrec);
    for (const auto& z : nf_conjugates(a, kPlacePrec))
        total = iv_add(total, iv_log_pos(cb_abs(z, kPlacePrec), kPlacePrec), kPlacePrec);
    BigRational N = nf_norm(a);
    auto fold_prime = [&](const BigInt& p, long vp) {
        // sum over w|p of f_w * v_w(a) equals v_p of the norm
        if (sgn(a.K->disc() % p) != 0) {
            long check = 0;
            for (const auto& w : dedekind_factor(a.K, p)) check += w.residue_degree * v_w(a, w);
            require(check == vp, errc::internal_error,
                    "per-place valuations disagree with the norm at p = " + p.get_str());
        }
        Iv logp = iv_log_pos(Iv::point_int(p, kPlacePrec), kPlacePrec);
        total = iv_sub(total, iv_mul_long(logp, vp, kPlacePrec), kPlacePrec);
    };
    for (const auto& [p, e] : factor_int(N.get_num())) fold_prime(p, e);
    for (const auto& [p, e] : factor_int(N.get_den())) fold_prime(p, -e);
    return total;
}

inline Enclosure product_formula_defect(const NfElement& a) {
    return detail::to_enclosure(product_formula_defect_iv(a));
}

// --- Liouville --------------------------------------------------------------

struct LiouvilleReport {
    double lower = 0; // (2 H(alpha) H(beta))^(-[L:K]), outward rounded down
    double value = 0; // product over S of |N_{L_w/K_v}(alpha - beta)|_v
    double upper = 0; // (2 H(alpha) H(beta))^([L:K]), outward rounded up
};

// Two-sided bound on the product of local distances between alpha in L and
// beta in K over a chosen place set S of L.  The subfield K enters through
// theta_image, the image in L of K's generator (pass the zero element of L
// when K is the rationals).  Supported subfields: K = Q and K = L.
inline LiouvilleReport liouville_check(const NfElement& alpha, const NfElement& beta,
                                       const NfElement& theta_image,
                                       const std::vector<Place>& S) {
    const NfPtr& L = alpha.K;
    const NfPtr& K = beta.K;
    require(theta_image.K->defining_poly() == L->defining_poly(), errc::invalid_argument,
            "theta image must live in the top field");
    require(L->degree() % K->degree() == 0, errc::invalid_argument,
            "subfield degree must divide the top degree");
    const long rel = L->degree() / K->degree();
    require(K->degree() == 1 || K->degree() == L->degree(), errc::invalid_argument,
            "only K = Q and K = L subfields are supported");
    {
        // the claimed image must actually be a root of K's defining polynomial
        const QPoly fK = to_qpoly(K->defining_poly());
        NfElement acc = nf_zero(L);
        for (long k = fK.degree(); k >= 0; --k)
            acc = acc * theta_image + nf_from_rational(L, fK.coeff(k));
        require(acc.is_zero(), errc::invalid_argument, "theta image is not a root in L");
    }
    NfElement beta_L = nf_zero(L);
    for (size_t i = beta.c.size(); i-- > 0;)
        beta_L = beta_L * theta_image + nf_from_rational(L, beta.c[i]);
    NfElement gamma = alpha - beta_L;
    require(!gamma.is_zero(), errc::equal_inputs, "alpha equals beta");

    const bool norm_to_q = (K->degree() == 1);
    // product of the local norms over S: exact rational part from finite
    // places, certified intervals from archimedean ones
    BigRational finite(1);
    Iv arch = iv_exp(Iv::zero(kPlacePrec), kPlacePrec); // the point 1
    auto conj = nf_conjugates(gamma, kPlacePrec);
    for (const auto& pl : S) {
        if (std::holds_alternative<PrimeIdeal>(pl)) {
            const PrimeIdeal& w = std::get<PrimeIdeal>(pl);
            long v = v_w(gamma, w);
            long expo = norm_to_q ? v * w.residue_degree : v;
            if (expo >= 0)
                finite /= BigRational(pow_int(w.p, expo));
            else
                finite *= BigRational(pow_int(w.p, -expo));
        } else {
            const ArchPlace& w = std::get<ArchPlace>(pl);
            require(w.root_index >= 0 && w.root_index < static_cast<long>(conj.size()),
                    errc::invalid_argument, "archimedean place index out of range");
            Iv m = cb_abs(conj[w.root_index], kPlacePrec);
            long d = norm_to_q ? w.local_degree : 1;
            for (long t = 0; t < d; ++t) arch = iv_mul_nonneg(arch, m, kPlacePrec);
        }
    }
    Iv value = iv_mul_nonneg(arch, Iv::point_rat(abs(finite), kPlacePrec), kPlacePrec);

    // bounds (2 H(alpha) H(beta))^{+-[L:K]}
    Iv ha = weil_height_iv(alpha), hb = weil_height_iv(beta);
    Iv log2pt = iv_log_pos(Iv::point_int(BigInt(2), kPlacePrec), kPlacePrec);
    Iv logB = iv_add(log2pt, iv_add(ha, hb, kPlacePrec), kPlacePrec);
    Iv upper = iv_exp(iv_mul_long(logB, rel, kPlacePrec), kPlacePrec);
    Iv lower = iv_exp(iv_mul_long(logB, -rel, kPlacePrec), kPlacePrec);

    // the lemma must hold for the true values: the enclosures cannot be
    // disjoint on the wrong side
    require(bf_cmp(value.hi, lower.lo) >= 0, errc::internal_error,
            "computed product sits strictly below the Liouville lower bound");
    require(bf_cmp(value.lo, upper.hi) <= 0, errc::internal_error,
            "computed product sits strictly above the Liouville upper bound");

    LiouvilleReport rep;
    rep.lower = lower.lo.to_double();
    rep.value = value.mid();
    rep.upper = upper.hi.to_double();
    return rep;
}

} // namespace ntheight
