#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "factor_zx.hpp"
#include "poly.hpp"
#include "roots.hpp"

namespace ntheight {

// K = Q[x]/(f) for a monic irreducible integer polynomial f.  Elements live
// in the power basis 1, theta, ..., theta^(n-1) with exact rational
// coordinates; no maximal order is ever computed, so primes dividing disc(f)
// are refused by the valuation layer instead of being resolved here.
//
// Fields are immutable once built and referenced through shared_ptr, since
// every element carries its parent.

class NumberField;
using NfPtr = std::shared_ptr<const NumberField>;

inline constexpr long kMaxFieldDegree = 24;

class NumberField {
  public:
    const ZPoly& defining_poly() const { return f_; }
    const QPoly& defining_poly_q() const { return fq_; }
    long degree() const { return n_; }
    const BigInt& disc() const { return disc_; }

    // certified complex embeddings: real roots first, then conjugate pairs
    const RootSet& embeddings() const { return emb_; }
    long r1() const { return emb_.n_real; }
    long r2() const { return (n_ - emb_.n_real) / 2; }
    long precision_bits() const { return prec_bits_; }
    bool is_rational() const { return n_ == 1; }

    std::string describe() const {
        return "Q[x]/(" + f_.to_string() + ")";
    }

    friend NfPtr nf_create(const ZPoly& f, long precision_bits);

  private:
    NumberField() = default;
    ZPoly f_;
    QPoly fq_;
    long n_ = 0;
    BigInt disc_;
    RootSet emb_;
    long prec_bits_ = 0;
};

// Build Q[x]/(f).  Irreducibility is checked by exact factorization over Z;
// embeddings are certified disks of absolute radius <= 2^-(precision_bits/2).
inline NfPtr nf_create(const ZPoly& f, long precision_bits = 128) {
    require(f.degree() >= 1, errc::invalid_argument, "defining polynomial must be nonconstant");
    require(f.lc() == 1, errc::not_monic, "defining polynomial must be monic: " + f.to_string());
    require(f.degree() <= kMaxFieldDegree, errc::cap_exceeded,
            "field degree " + std::to_string(f.degree()) + " exceeds the cap of " +
                std::to_string(kMaxFieldDegree));
    require(precision_bits >= 32, errc::invalid_argument, "precision must be at least 32 bits");
    if (!is_irreducible_z(f))
        raise(errc::reducible_polynomial, f.to_string() + " factors over Q");

    auto K = std::shared_ptr<NumberField>(new NumberField());
    K->f_ = f;
    K->fq_ = to_qpoly(f);
    K->n_ = f.degree();
    K->disc_ = discriminant_int(f);
    K->prec_bits_ = precision_bits;

    // absolute radius target: pad the relative isolation accuracy by the
    // magnitude of the largest root (Cauchy bound)
    BigInt cauchy = 1;
    for (long i = 0; i < f.degree(); ++i) {
        BigInt c = abs(f.coeff(i)) + 1;
        if (c > cauchy) cauchy = c;
    }
    long pad = static_cast<long>(mpz_sizeinbase(cauchy.get_mpz_t(), 2)) + 1;
    K->emb_ = isolate_roots(K->fq_, precision_bits / 2 + pad);
    Bf want = bf_pow2(-(precision_bits / 2), kRadPrec);
    for (const auto& r : K->emb_.roots)
        require(bf_cmp(r.disk.rad, want) <= 0, errc::precision_exhausted,
                "embedding radius exceeds the requested bound");
    return K;
}

inline NfPtr nf_rationals(long precision_bits = 128) {
    return nf_create(ZPoly({BigInt(0), BigInt(1)}), precision_bits);
}

// --- elements ----------------------------------------------------------------

struct NfElement {
    NfPtr K;
    std::vector<BigRational> c; // length K->degree()

    NfElement() = default;
    NfElement(NfPtr field, std::vector<BigRational> coords) : K(std::move(field)), c(std::move(coords)) {
        require(static_cast<long>(c.size()) == K->degree(), errc::invalid_argument,
                "coordinate count does not match the field degree");
    }

    bool is_zero() const {
        for (const auto& x : c)
            if (x != 0) return false;
        return true;
    }
    bool is_rational() const {
        for (size_t i = 1; i < c.size(); ++i)
            if (c[i] != 0) return false;
        return true;
    }
    const BigRational& rational_value() const {
        require(is_rational(), errc::invalid_argument, "element is not rational");
        return c[0];
    }
};

inline NfElement nf_zero(const NfPtr& K) {
    return NfElement(K, std::vector<BigRational>(K->degree(), BigRational(0)));
}

inline NfElement nf_from_rational(const NfPtr& K, const BigRational& x) {
    NfElement e = nf_zero(K);
    e.c[0] = x;
    return e;
}

inline NfElement nf_theta(const NfPtr& K) {
    NfElement e = nf_zero(K);
    if (K->degree() == 1) {
        // theta is the rational root of the degree-1 defining polynomial
        e.c[0] = -to_qpoly(K->defining_poly()).coeff(0);
    } else {
        e.c[1] = 1;
    }
    return e;
}

// element from polynomial-in-theta coordinates, reduced mod f
inline NfElement nf_from_poly(const NfPtr& K, const QPoly& g) {
    QPoly r = g % K->defining_poly_q();
    std::vector<BigRational> c(K->degree(), BigRational(0));
    for (long i = 0; i <= r.degree(); ++i) c[i] = r.coeff(i);
    return NfElement(K, std::move(c));
}

inline QPoly nf_to_poly(const NfElement& a) { return QPoly(a.c); }

namespace detail {
inline void check_same_field(const NfElement& a, const NfElement& b) {
    require(a.K == b.K || a.K->defining_poly() == b.K->defining_poly(), errc::invalid_argument,
            "elements of different number fields");
}
} // namespace detail

inline bool operator==(const NfElement& a, const NfElement& b) {
    detail::check_same_field(a, b);
    return a.c == b.c;
}
inline bool operator!=(const NfElement& a, const NfElement& b) { return !(a == b); }

// deterministic ordering for reports: lexicographic on coordinates
inline bool nf_less(const NfElement& a, const NfElement& b) {
    detail::check_same_field(a, b);
    for (size_t i = 0; i < a.c.size(); ++i) {
        int s = cmp(a.c[i], b.c[i]);
        if (s != 0) return s < 0;
    }
    return false;
}

inline NfElement operator+(const NfElement& a, const NfElement& b) {
    detail::check_same_field(a, b);
    NfElement r = a;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
    return r;
}
inline NfElement operator-(const NfElement& a, const NfElement& b) {
    detail::check_same_field(a, b);
    NfElement r = a;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] -= b.c[i];
    return r;
}
inline NfElement operator-(const NfElement& a) {
    NfElement r = a;
    for (auto& x : r.c) x = -x;
    return r;
}
inline NfElement operator*(const NfElement& a, const NfElement& b) {
    detail::check_same_field(a, b);
    return nf_from_poly(a.K, nf_to_poly(a) * nf_to_poly(b));
}
inline NfElement operator*(const NfElement& a, const BigRational& s) {
    NfElement r = a;
    for (auto& x : r.c) x *= s;
    return r;
}

inline NfElement nf_inverse(const NfElement& a) {
    require(!a.is_zero(), errc::zero_element, "inverse of zero");
    QPoly u, v;
    QPoly g = poly_gcdext(nf_to_poly(a), a.K->defining_poly_q(), u, v);
    require(g.degree() == 0, errc::internal_error, "defining polynomial not coprime to element");
    return nf_from_poly(a.K, u);
}

inline NfElement operator/(const NfElement& a, const NfElement& b) { return a * nf_inverse(b); }

inline NfElement nf_pow(const NfElement& a, long e) {
    require(e >= 0 || !a.is_zero(), errc::zero_element, "negative power of zero");
    NfElement base = e < 0 ? nf_inverse(a) : a;
    unsigned long k = e < 0 ? -(unsigned long)e : (unsigned long)e;
    NfElement r = nf_from_rational(a.K, BigRational(1));
    while (k) {
        if (k & 1) r = r * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return r;
}

// N(a) = prod of the conjugates = Res(f, A) for monic f and deg A < deg f
inline BigRational nf_norm(const NfElement& a) {
    if (a.K->degree() == 1) return a.c[0];
    QPoly A = nf_to_poly(a);
    if (A.is_zero()) return BigRational(0);
    return resultant(a.K->defining_poly_q(), A);
}

// characteristic polynomial of multiplication by a: prod (x - A(theta_i)),
// monic of degree n, computed by interpolation of x -> Res(f, x - A)
inline QPoly nf_charpoly(const NfElement& a) {
    long n = a.K->degree();
    QPoly A = nf_to_poly(a);
    std::vector<BigRational> xs, ys;
    for (long j = 0; j <= n; ++j) {
        BigRational t(j);
        QPoly shifted = QPoly({t}) - A;
        BigRational val = shifted.is_zero() ? BigRational(0) : resultant(a.K->defining_poly_q(), shifted);
        xs.emplace_back(t);
        ys.push_back(val);
    }
    QPoly chi = lagrange_interpolate(xs, ys);
    require(chi.degree() == n && chi.lc() == 1, errc::internal_error, "characteristic polynomial drift");
    return chi;
}

inline BigRational nf_trace(const NfElement& a) {
    long n = a.K->degree();
    if (n == 1) return a.c[0];
    return -nf_charpoly(a).coeff(n - 1);
}

// minimal polynomial: the characteristic polynomial is minpoly^(n/d), so the
// squarefree part is exactly the minimal polynomial
inline QPoly nf_minpoly(const NfElement& a) {
    QPoly chi = nf_charpoly(a);
    QPoly g = poly_gcd(chi, chi.derivative());
    QPoly m = chi / g;
    return m * (BigRational(1) / m.lc());
}

// certified complex enclosures of the conjugates of a, in embedding order
inline std::vector<CBall> nf_conjugates(const NfElement& a, mpfr_prec_t prec) {
    std::vector<CBall> out;
    QPoly A = nf_to_poly(a);
    for (const auto& r : a.K->embeddings().roots) out.push_back(cb_eval_poly(A, r.disk, prec));
    return out;
}

inline std::string nf_to_string(const NfElement& a) {
    std::string s = "[";
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (i) s += ", ";
        s += rat_to_string(a.c[i]);
    }
    return s + "]";
}

// --- polynomials over K and Trager's norm method -----------------------------

// Just enough K[z] arithmetic for gcds and root extraction; coefficients are
// constant-term first like Poly, with an explicit parent for the zero case.
struct KPoly {
    NfPtr K;
    std::vector<NfElement> c;

    explicit KPoly(NfPtr field) : K(std::move(field)) {}
    KPoly(NfPtr field, std::vector<NfElement> coeffs) : K(std::move(field)), c(std::move(coeffs)) {
        normalize();
    }
    void normalize() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
    long degree() const { return static_cast<long>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    const NfElement& lc() const {
        require(!c.empty(), errc::invalid_argument, "leading coefficient of zero polynomial");
        return c.back();
    }
    NfElement coeff(long i) const {
        if (i < 0 || i >= static_cast<long>(c.size())) return nf_zero(K);
        return c[i];
    }
    NfElement eval(const NfElement& x) const {
        NfElement acc = nf_zero(K);
        for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    }
};

inline KPoly kpoly_from_q(const NfPtr& K, const QPoly& g) {
    std::vector<NfElement> c;
    for (long i = 0; i <= g.degree(); ++i) c.push_back(nf_from_rational(K, g.coeff(i)));
    return KPoly(K, std::move(c));
}

inline KPoly operator+(const KPoly& a, const KPoly& b) {
    std::vector<NfElement> c;
    size_t n = std::max(a.c.size(), b.c.size());
    for (size_t i = 0; i < n; ++i) c.push_back(a.coeff(i) + b.coeff(i));
    return KPoly(a.K, std::move(c));
}
inline KPoly operator-(const KPoly& a, const KPoly& b) {
    std::vector<NfElement> c;
    size_t n = std::max(a.c.size(), b.c.size());
    for (size_t i = 0; i < n; ++i) c.push_back(a.coeff(i) - b.coeff(i));
    return KPoly(a.K, std::move(c));
}
inline KPoly operator*(const KPoly& a, const KPoly& b) {
    if (a.is_zero() || b.is_zero()) return KPoly(a.K);
    std::vector<NfElement> c(a.c.size() + b.c.size() - 1, nf_zero(a.K));
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) c[i + j] = c[i + j] + a.c[i] * b.c[j];
    return KPoly(a.K, std::move(c));
}
inline KPoly operator*(const KPoly& a, const NfElement& s) {
    std::vector<NfElement> c;
    for (const auto& x : a.c) c.push_back(x * s);
    return KPoly(a.K, std::move(c));
}

inline void kpoly_divrem(const KPoly& a, const KPoly& b, KPoly& q, KPoly& r) {
    require(!b.is_zero(), errc::invalid_argument, "division by zero polynomial");
    std::vector<NfElement> rem = a.c;
    std::vector<NfElement> quo;
    long db = b.degree();
    NfElement inv_lc = nf_inverse(b.lc());
    if (a.degree() >= db) quo.assign(a.degree() - db + 1, nf_zero(a.K));
    for (long i = a.degree(); i >= db; --i) {
        if (rem[i].is_zero()) continue;
        NfElement f = rem[i] * inv_lc;
        quo[i - db] = f;
        for (long j = 0; j <= db; ++j) rem[i - db + j] = rem[i - db + j] - f * b.coeff(j);
    }
    q = KPoly(a.K, std::move(quo));
    r = KPoly(a.K, std::move(rem));
}

inline KPoly kpoly_gcd(KPoly a, KPoly b) {
    while (!b.is_zero()) {
        KPoly q(a.K), r(a.K);
        kpoly_divrem(a, b, q, r);
        a = b;
        b = r;
    }
    if (a.is_zero()) return a;
    return a * nf_inverse(a.lc()); // monic
}

// h(z + t), synthetic-division Taylor shift
inline KPoly kpoly_shift(const KPoly& h, const NfElement& t) {
    std::vector<NfElement> c = h.c;
    long n = h.degree();
    for (long i = 0; i <= n; ++i)
        for (long j = n - 1; j >= i; --j) c[j] = c[j] + c[j + 1] * t;
    return KPoly(h.K, std::move(c));
}

inline KPoly kpoly_derivative(const KPoly& h) {
    if (h.degree() <= 0) return KPoly(h.K);
    std::vector<NfElement> c;
    for (long i = 1; i <= h.degree(); ++i) c.push_back(h.c[i] * BigRational(i));
    return KPoly(h.K, std::move(c));
}

namespace detail {

// Norm of H in K[z] down to Q[z]: Res_x(f(x), H~(z, x)) where H~ replaces
// theta by x in the coefficients.  Interpolated from nd+1 resultant values.
inline QPoly kpoly_norm(const KPoly& H) {
    const NfPtr& K = H.K;
    long n = K->degree(), d = H.degree();
    require(d >= 1, errc::invalid_argument, "norm of a constant polynomial");
    // H~(z0, x): substitute a rational z0, leaving a Q[x] polynomial
    auto at = [&](const BigRational& z0) {
        std::vector<BigRational> acc(n, BigRational(0));
        BigRational zp(1);
        for (long i = 0; i <= d; ++i) {
            for (long j = 0; j < n; ++j) acc[j] += H.coeff(i).c[j] * zp;
            zp *= z0;
        }
        return QPoly(acc);
    };
    std::vector<BigRational> xs, ys;
    for (long j = 0; j <= n * d; ++j) {
        BigRational z0(j);
        QPoly gx = at(z0);
        xs.emplace_back(z0);
        ys.push_back(gx.is_zero() ? BigRational(0) : resultant(K->defining_poly_q(), gx));
    }
    return lagrange_interpolate(xs, ys);
}

} // namespace detail

// Trager factorization of a squarefree polynomial over K: shift by s*theta
// until the norm is squarefree, factor the norm over Q, then pull each factor
// back through a K[z] gcd.  Returns monic irreducible factors, sorted by
// degree then deterministically by coefficients.
inline std::vector<KPoly> kpoly_factor_squarefree(const KPoly& h_in) {
    const NfPtr& K = h_in.K;
    require(h_in.degree() >= 1, errc::invalid_argument, "factoring a constant");
    KPoly h = h_in * nf_inverse(h_in.lc());
    if (K->degree() == 1) {
        // plain rational factorization
        std::vector<BigRational> c;
        for (const auto& e : h.c) c.push_back(e.c[0]);
        std::vector<KPoly> out;
        for (const auto& fac : factor_squarefree_q(QPoly(c))) out.push_back(kpoly_from_q(K, fac));
        return out;
    }

    NfElement theta = nf_theta(K);
    for (long s = 0;; s = (s > 0 ? -s : -s + 1)) {
        require(s < 4 * K->degree() * h.degree() + 4, errc::internal_error,
                "no squarefree shift found in Trager loop");
        NfElement shift = theta * BigRational(s);
        KPoly H = kpoly_shift(h, shift * BigRational(-1)); // H(z) = h(z - s*theta)
        QPoly norm = detail::kpoly_norm(H);
        if (!is_squarefree(norm)) continue;

        std::vector<KPoly> out;
        for (const auto& Nk : factor_squarefree_q(norm)) {
            KPoly cand = kpoly_gcd(H, kpoly_from_q(K, Nk));
            if (cand.degree() >= 1) out.push_back(kpoly_shift(cand, shift)); // undo the shift
        }
        long total = 0;
        for (const auto& fk : out) total += fk.degree();
        require(total == h.degree(), errc::internal_error, "Trager factors do not multiply out");
        std::sort(out.begin(), out.end(), [](const KPoly& a, const KPoly& b) {
            if (a.degree() != b.degree()) return a.degree() < b.degree();
            for (long i = a.degree(); i >= 0; --i) {
                const auto &ca = a.c[i].c, &cb = b.c[i].c;
                for (size_t j = 0; j < ca.size(); ++j) {
                    int s2 = cmp(ca[j], cb[j]);
                    if (s2 != 0) return s2 < 0;
                }
            }
            return false;
        });
        return out;
    }
}

// All roots of h in K itself (h need not be squarefree), sorted.
inline std::vector<NfElement> roots_in_field(const KPoly& h_in) {
    require(h_in.degree() >= 0, errc::invalid_argument, "roots of the zero polynomial");
    if (h_in.degree() == 0) return {};
    KPoly h = h_in;
    KPoly g = kpoly_gcd(h, kpoly_derivative(h));
    if (g.degree() >= 1) {
        KPoly q(h.K), r(h.K);
        kpoly_divrem(h, g, q, r);
        require(r.is_zero(), errc::internal_error, "squarefree reduction failed");
        h = q;
    }
    if (h.degree() < 1) return {};
    std::vector<NfElement> roots;
    for (const auto& fac : kpoly_factor_squarefree(h))
        if (fac.degree() == 1) roots.push_back(-fac.coeff(0)); // monic z + c
    std::sort(roots.begin(), roots.end(), nf_less);
    return roots;
}

// Square roots of a in K: empty, or {r, -r} sorted.
inline std::vector<NfElement> sqrt_in_field(const NfElement& a) {
    if (a.is_zero()) return {nf_zero(a.K)};
    KPoly h(a.K, {-a, nf_zero(a.K), nf_from_rational(a.K, BigRational(1))});
    return roots_in_field(h);
}

} // namespace ntheight
