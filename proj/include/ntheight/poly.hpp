#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "rational.hpp"

namespace ntheight {

// Dense univariate polynomials, constant term first.  The same layout is
// used for serialization, so coeffs()[i] is always the coefficient of x^i.
template <typename T>
class Poly {
  public:
    Poly() = default;
    explicit Poly(std::vector<T> c) : c_(std::move(c)) { normalize(); }
    static Poly x() { return Poly(std::vector<T>{T(0), T(1)}); }
    static Poly constant(const T& v) { return Poly(std::vector<T>{v}); }
    static Poly monomial(const T& v, size_t k) {
        std::vector<T> c(k + 1, T(0));
        c[k] = v;
        return Poly(std::move(c));
    }

    const std::vector<T>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    // degree of the zero polynomial is -1 by convention
    long degree() const { return static_cast<long>(c_.size()) - 1; }
    const T& lc() const {
        require(!c_.empty(), errc::zero_element, "leading coefficient of zero polynomial");
        return c_.back();
    }
    T coeff(size_t i) const { return i < c_.size() ? c_[i] : T(0); }
    bool is_monic() const { return !c_.empty() && c_.back() == T(1); }

    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
        for (size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
        for (size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a) {
        std::vector<T> c = a.c_;
        for (auto& v : c) v = -v;
        return Poly(std::move(c));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Poly(std::move(c));
    }
    friend Poly operator*(const Poly& a, const T& s) {
        std::vector<T> c = a.c_;
        for (auto& v : c) v *= s;
        return Poly(std::move(c));
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<T> c(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) c[i - 1] = c_[i] * T(static_cast<long>(i));
        return Poly(std::move(c));
    }

    // Horner evaluation at any point type that supports ring ops with T.
    template <typename P>
    P eval(const P& x) const {
        P acc = P(0);
        for (size_t i = c_.size(); i-- > 0;) acc = acc * x + P(c_[i]);
        return acc;
    }
    T operator()(const T& x) const { return eval<T>(x); }

    std::string to_string(const std::string& var = "x") const;

  private:
    void normalize() {
        while (!c_.empty() && c_.back() == T(0)) c_.pop_back();
    }
    std::vector<T> c_;
};

using QPoly = Poly<BigRational>;
using ZPoly = Poly<BigInt>;

template <typename T>
std::string Poly<T>::to_string(const std::string& var) const {
    if (is_zero()) return "0";
    std::string out;
    for (size_t i = c_.size(); i-- > 0;) {
        if (c_[i] == T(0)) continue;
        if (!out.empty()) out += " + ";
        std::string coef;
        if constexpr (std::is_same_v<T, BigRational>)
            coef = rat_to_string(c_[i]);
        else
            coef = c_[i].get_str();
        if (i == 0) {
            out += coef;
        } else {
            if (coef != "1") out += coef + "*";
            out += var;
            if (i > 1) out += "^" + std::to_string(i);
        }
    }
    return out;
}

inline QPoly to_qpoly(const ZPoly& f) {
    std::vector<BigRational> c;
    c.reserve(f.coeffs().size());
    for (auto& v : f.coeffs()) c.emplace_back(v);
    return QPoly(std::move(c));
}

// Clears denominators: returns primitive integer polynomial and the positive
// rational s with f = s * primitive.
inline ZPoly to_primitive(const QPoly& f, BigRational* scale = nullptr) {
    if (f.is_zero()) {
        if (scale) *scale = 0;
        return ZPoly();
    }
    BigInt den = common_denominator(f.coeffs());
    std::vector<BigInt> c;
    c.reserve(f.coeffs().size());
    BigInt content = 0;
    for (auto& q : f.coeffs()) {
        BigInt v = q.get_num() * (den / q.get_den());
        mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), v.get_mpz_t());
        c.push_back(v);
    }
    if (sgn(c.back()) < 0) content = -content;
    for (auto& v : c) v /= content;
    if (scale) *scale = BigRational(content, den);
    return ZPoly(std::move(c));
}

// Euclidean division over a field coefficient type.
inline void divrem(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r) {
    require(!b.is_zero(), errc::zero_element, "polynomial division by zero");
    std::vector<BigRational> rem(a.coeffs());
    long db = b.degree();
    long da = static_cast<long>(rem.size()) - 1;
    if (da < db) {
        q = QPoly();
        r = a;
        return;
    }
    std::vector<BigRational> quot(da - db + 1, BigRational(0));
    const auto& bc = b.coeffs();
    for (long i = da; i >= db; --i) {
        if (sgn(rem[i]) == 0) continue;
        BigRational f = rem[i] / bc[db];
        quot[i - db] = f;
        for (long j = 0; j <= db; ++j) rem[i - db + j] -= f * bc[j];
    }
    q = QPoly(std::move(quot));
    r = QPoly(std::move(rem));
}

inline QPoly operator%(const QPoly& a, const QPoly& b) {
    QPoly q, r;
    divrem(a, b, q, r);
    return r;
}

inline QPoly operator/(const QPoly& a, const QPoly& b) {
    QPoly q, r;
    divrem(a, b, q, r);
    require(r.is_zero(), errc::internal_error, "inexact polynomial division");
    return q;
}

// Monic gcd over Q.
inline QPoly poly_gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        QPoly r = a % b;
        a = b;
        b = r;
    }
    if (a.is_zero()) return a;
    return a * (BigRational(1) / a.lc());
}

inline bool is_squarefree(const QPoly& f) {
    if (f.degree() <= 1) return f.degree() >= 0;
    return poly_gcd(f, f.derivative()).degree() == 0;
}

// Extended Euclid: returns monic g = gcd(a, b) and writes u, v with
// u*a + v*b = g.
inline QPoly poly_gcdext(const QPoly& a, const QPoly& b, QPoly& u, QPoly& v) {
    QPoly r0 = a, r1 = b;
    QPoly u0({BigRational(1)}), u1;
    QPoly v0, v1({BigRational(1)});
    while (!r1.is_zero()) {
        QPoly q, r;
        divrem(r0, r1, q, r);
        QPoly u2 = u0 - q * u1;
        QPoly v2 = v0 - q * v1;
        r0 = r1;
        r1 = r;
        u0 = u1;
        u1 = u2;
        v0 = v1;
        v1 = v2;
    }
    if (r0.is_zero()) {
        u = QPoly();
        v = QPoly();
        return r0;
    }
    BigRational s = BigRational(1) / r0.lc();
    u = u0 * s;
    v = v0 * s;
    return r0 * s;
}

// res(F, G) by the classical remainder recursion over Q:
//   res(F, G) = (-1)^(dF dG) lc(G)^(dF - dR) res(G, R),  R = F mod G.
// Exact, and fast enough for the degrees this library handles.
inline BigRational resultant(QPoly f, QPoly g) {
    if (f.is_zero() || g.is_zero()) return BigRational(0);
    BigRational acc(1);
    bool neg = false;
    while (g.degree() > 0) {
        QPoly r = f % g;
        long df = f.degree(), dg = g.degree(), dr = r.degree();
        if ((df & 1) && (dg & 1)) neg = !neg;
        BigRational lg = g.lc();
        long e = df - (dr < 0 ? 0 : dr);
        for (long i = 0; i < e; ++i) acc *= lg;
        if (r.is_zero()) return BigRational(0); // common factor
        f = g;
        g = r;
    }
    // g is a nonzero constant now
    BigRational gl = g.lc();
    BigRational pw(1);
    for (long i = 0; i < f.degree(); ++i) pw *= gl;
    BigRational out = acc * pw;
    return neg ? -out : out;
}

inline BigInt resultant_int(const ZPoly& f, const ZPoly& g) {
    BigRational r = resultant(to_qpoly(f), to_qpoly(g));
    require(r.get_den() == 1, errc::internal_error, "integer resultant with denominator");
    return r.get_num();
}

// disc(f) = (-1)^(n(n-1)/2) res(f, f') / lc(f)
inline BigRational discriminant(const QPoly& f) {
    long n = f.degree();
    require(n >= 1, errc::invalid_argument, "discriminant needs degree >= 1");
    BigRational r = resultant(f, f.derivative()) / f.lc();
    return ((n * (n - 1) / 2) % 2) ? -r : r;
}

inline BigInt discriminant_int(const ZPoly& f) {
    BigRational d = discriminant(to_qpoly(f));
    require(d.get_den() == 1, errc::internal_error, "integer discriminant with denominator");
    return d.get_num();
}

// Lagrange interpolation through (xs[i], ys[i]) with distinct nodes.
inline QPoly lagrange_interpolate(const std::vector<BigRational>& xs,
                                  const std::vector<BigRational>& ys) {
    require(xs.size() == ys.size() && !xs.empty(), errc::invalid_argument,
            "interpolation needs matching nonempty node lists");
    QPoly acc;
    for (size_t i = 0; i < xs.size(); ++i) {
        QPoly li = QPoly::constant(BigRational(1));
        BigRational denom(1);
        for (size_t j = 0; j < xs.size(); ++j) {
            if (j == i) continue;
            li = li * QPoly(std::vector<BigRational>{-xs[j], BigRational(1)});
            denom *= xs[i] - xs[j];
        }
        acc = acc + li * (ys[i] / denom);
    }
    return acc;
}

// f(g(x)) by Horner; cost is fine for the small degrees used here.
inline QPoly compose(const QPoly& f, const QPoly& g) {
    QPoly acc;
    for (size_t i = f.coeffs().size(); i-- > 0;)
        acc = acc * g + QPoly::constant(f.coeffs()[i]);
    return acc;
}

} // namespace ntheight
