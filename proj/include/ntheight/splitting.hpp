#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "factor_zx.hpp"
#include "fp_poly.hpp"
#include "number_field.hpp"

namespace ntheight {

// Prime splitting in number fields via the Dedekind correspondence on Z[theta],
// splitting-density tables along towers, and constructors of towers that are
// totally split at a chosen prime.

// A prime of K above p, carried by its irreducible factor of the defining
// polynomial mod p.  Norm = p^residue_degree.
struct PrimeIdeal {
    BigInt p;
    long residue_degree = 1;
    long ramification = 1;
    FpPoly factor_poly;
    BigInt norm;

    bool operator<(const PrimeIdeal& o) const {
        if (int c = cmp(p, o.p); c != 0) return c < 0;
        if (residue_degree != o.residue_degree) return residue_degree < o.residue_degree;
        return factor_poly < o.factor_poly;
    }
    bool operator==(const PrimeIdeal& o) const {
        return cmp(p, o.p) == 0 && residue_degree == o.residue_degree &&
               ramification == o.ramification && factor_poly == o.factor_poly;
    }
    std::string to_string() const {
        return "(" + p.get_str() + ", f=" + std::to_string(residue_degree) +
               ", e=" + std::to_string(ramification) + ")";
    }
};

// Factor p in O_K under the Dedekind criterion for Z[theta].  Primes dividing
// the polynomial discriminant are refused: they join the bad set that the
// surrounding computations already discard.
inline std::vector<PrimeIdeal> dedekind_factor(const NfPtr& K, const BigInt& p) {
    require(sgn(p) > 0 && is_probable_prime(p), errc::invalid_argument,
            p.get_str() + " is not prime");
    require(sgn(K->disc() % p) != 0, errc::index_prime,
            p.get_str() + " divides disc = " + K->disc().get_str() + " of " + K->describe());
    FpCtx F(static_cast<uint64_t>(p.get_ui()));
    FpPoly fbar = fp_from(F, K->defining_poly());
    require(fbar.degree() == K->degree(), errc::internal_error, "monic polynomial dropped degree");
    std::vector<FpPoly> factors = fp_factor_squarefree(F, fbar);
    std::vector<PrimeIdeal> out;
    long total = 0;
    for (const auto& g : factors) {
        PrimeIdeal w;
        w.p = p;
        w.residue_degree = g.degree();
        w.ramification = 1; // p does not divide disc, so p is unramified
        w.factor_poly = g;
        w.norm = pow_int(p, g.degree());
        total += g.degree();
        out.push_back(std::move(w));
    }
    require(total == K->degree(), errc::internal_error, "residue degrees do not sum to [K:Q]");
    std::sort(out.begin(), out.end());
    return out;
}

// N_q(K): number of primes of K with norm exactly q = p^f.
inline long count_primes_norm(const NfPtr& K, const BigInt& q) {
    BigInt p;
    long f = 0;
    split_prime_power(q, p, f);
    long n = 0;
    for (const auto& w : dedekind_factor(K, p))
        if (w.residue_degree == f) ++n;
    return n;
}

inline bool is_totally_split(const NfPtr& K, const BigInt& p) {
    auto ws = dedekind_factor(K, p);
    if (static_cast<long>(ws.size()) != K->degree()) return false;
    for (const auto& w : ws)
        if (w.residue_degree != 1 || w.ramification != 1) return false;
    return true;
}

// --- towers -----------------------------------------------------------------

// A chain Q = K_0 < K_1 < ... with exact inclusion data: witnesses[i] is the
// image of the generator of levels[i] inside levels[i+1], and substituting it
// into the lower defining polynomial gives exactly zero.
struct Tower {
    std::vector<NfPtr> levels;
    std::vector<NfElement> witnesses;
};

inline void verify_tower(const Tower& T) {
    require(!T.levels.empty() && T.levels.front()->degree() == 1, errc::invalid_argument,
            "tower must start at the rationals");
    require(T.witnesses.size() + 1 == T.levels.size(), errc::invalid_argument,
            "tower needs one witness per inclusion");
    for (size_t i = 0; i + 1 < T.levels.size(); ++i) {
        require(T.levels[i]->degree() < T.levels[i + 1]->degree(), errc::invalid_argument,
                "tower degrees must strictly increase");
        const NfElement& wit = T.witnesses[i];
        require(wit.K->defining_poly() == T.levels[i + 1]->defining_poly(), errc::invalid_argument,
                "witness lives in the wrong field");
        // Horner evaluation of the lower defining polynomial at the witness
        const QPoly f = to_qpoly(T.levels[i]->defining_poly());
        NfElement acc = nf_zero(T.levels[i + 1]);
        for (long k = f.degree(); k >= 0; --k)
            acc = acc * wit + nf_from_rational(T.levels[i + 1], f.coeff(k));
        require(acc.is_zero(), errc::invalid_argument, "inclusion witness is not a root");
    }
}

struct PsiEstimate {
    BigInt q;
    std::vector<BigRational> ratios; // N_q(K_i) / [K_i:Q], one per level
    BigRational limit_guess;         // last ratio, never an extrapolation
};

// Per-level exact splitting ratios along a tower.  The limit of these ratios
// over an infinite tower is the density the experiments table; here only the
// finite levels are certified.
inline PsiEstimate psi_estimate(const Tower& T, const BigInt& q) {
    require(!T.levels.empty(), errc::invalid_argument, "empty tower");
    PsiEstimate out;
    out.q = q;
    for (size_t i = 0; i < T.levels.size(); ++i) {
        long n;
        try {
            n = count_primes_norm(T.levels[i], q);
        } catch (const Error& e) {
            if (e.code() == errc::index_prime)
                raise(errc::index_prime, "level " + std::to_string(i) + ": " + e.what());
            throw;
        }
        BigRational r(n, static_cast<unsigned long>(T.levels[i]->degree()));
        r.canonicalize();
        require(sgn(r) >= 0 && r <= 1, errc::internal_error, "splitting ratio out of [0,1]");
        out.ratios.push_back(r);
    }
    out.limit_guess = out.ratios.back();
    return out;
}

namespace detail {

// Exact rational linear solve A u = b by Gaussian elimination (first nonzero
// pivot, deterministic).  A is square, given row-major.  Returns false when A
// is singular.
inline bool solve_rational(std::vector<std::vector<BigRational>> A, std::vector<BigRational> b,
                           std::vector<BigRational>& u) {
    const size_t n = A.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && sgn(A[piv][col]) == 0) ++piv;
        if (piv == n) return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (size_t row = 0; row < n; ++row) {
            if (row == col || sgn(A[row][col]) == 0) continue;
            BigRational m = A[row][col] / A[col][col];
            for (size_t j = col; j < n; ++j) A[row][j] -= m * A[col][j];
            b[row] -= m * b[col];
        }
    }
    u.assign(n, BigRational(0));
    for (size_t i = 0; i < n; ++i) u[i] = b[i] / A[i][i];
    return true;
}

// Res_y(f(y), g(x - c*y)) computed by evaluation at x = 0..deg and Lagrange
// interpolation; the result is the monic defining polynomial of theta + c*gamma.
inline ZPoly compositum_poly(const ZPoly& f, const ZPoly& g, long c) {
    long m = f.degree(), r = g.degree(), d = m * r;
    QPoly fq = to_qpoly(f);
    std::vector<BigRational> xs, ys;
    for (long x0 = 0; x0 <= d; ++x0) {
        // g(x0 - c*y) as a polynomial in y, by Horner on the linear inner part
        QPoly acc;
        QPoly lin({BigRational(x0), BigRational(-c)});
        for (long j = r; j >= 0; --j) acc = acc * lin + QPoly::constant(BigRational(g.coeff(j)));
        xs.emplace_back(x0);
        ys.push_back(resultant(fq, acc));
    }
    QPoly F = lagrange_interpolate(xs, ys);
    // a resultant of monic integer inputs is monic with integer coefficients
    require(F.degree() == d && F.lc() == 1, errc::internal_error,
            "compositum resultant is not monic of full degree");
    std::vector<BigInt> fc(d + 1);
    for (long i = 0; i <= d; ++i) {
        require(F.coeff(i).get_den() == 1, errc::internal_error,
                "compositum resultant has a fractional coefficient");
        fc[i] = F.coeff(i).get_num();
    }
    return ZPoly(fc);
}

// Express y in powers of Theta = c*y + z inside Q[y,z]/(f(y), g(z)): exact
// linear algebra in the monomial basis y^a z^b.  The Theta convention matches
// compositum_poly, whose resultant has roots c*y_i + z_j.
inline std::vector<BigRational> compositum_witness(const ZPoly& f, const ZPoly& g, long c) {
    const long m = f.degree(), r = g.degree(), d = m * r;
    QPoly fq = to_qpoly(f), gq = to_qpoly(g);
    auto idx = [&](long a, long b) { return a * r + b; };
    // multiplication by Theta on coordinate vectors
    auto mul_theta = [&](const std::vector<BigRational>& v) {
        std::vector<BigRational> out(d, BigRational(0));
        for (long a = 0; a < m; ++a)
            for (long b = 0; b < r; ++b) {
                const BigRational& cv = v[idx(a, b)];
                if (sgn(cv) == 0) continue;
                // c * y * y^a z^b
                if (a + 1 < m) {
                    out[idx(a + 1, b)] += cv * c;
                } else {
                    for (long j = 0; j < m; ++j) out[idx(j, b)] -= cv * c * fq.coeff(j);
                }
                // z * y^a z^b
                if (b + 1 < r) {
                    out[idx(a, b + 1)] += cv;
                } else {
                    for (long j = 0; j < r; ++j) out[idx(a, j)] -= cv * gq.coeff(j);
                }
            }
        return out;
    };
    std::vector<std::vector<BigRational>> cols;
    std::vector<BigRational> cur(d, BigRational(0));
    cur[idx(0, 0)] = 1;
    for (long k = 0; k < d; ++k) {
        cols.push_back(cur);
        if (k + 1 < d) cur = mul_theta(cur);
    }
    std::vector<std::vector<BigRational>> A(d, std::vector<BigRational>(d, BigRational(0)));
    for (long i = 0; i < d; ++i)
        for (long k = 0; k < d; ++k) A[i][k] = cols[k][i];
    std::vector<BigRational> rhs(d, BigRational(0));
    rhs[idx(1, 0)] = 1; // the element y
    std::vector<BigRational> u;
    require(solve_rational(std::move(A), std::move(rhs), u), errc::internal_error,
            "theta powers do not span the compositum");
    return u;
}

} // namespace detail

// Build a tower totally split at p with the requested level degrees.  Each
// level extends the previous one by a monic integer polynomial that reduces
// mod p to a product of distinct linear factors (perturbed above p^2 until
// irreducible over Q), glued by an exact compositum.
inline Tower build_totally_padic_tower(const BigInt& p, const std::vector<long>& target_degrees) {
    require(cmp(p, 5) >= 0 && is_probable_prime(p), errc::invalid_argument,
            "totally p-adic towers are built for primes p >= 5");
    Tower T;
    T.levels.push_back(nf_rationals());
    long prev_deg = 1;
    for (long d : target_degrees) {
        require(d >= 1 && d <= 12, errc::invalid_argument, "level degrees must be in 1..12");
        if (d == 1) {
            require(prev_deg == 1, errc::invalid_argument, "degrees must strictly increase");
            continue;
        }
        require(d > prev_deg, errc::invalid_argument, "degrees must strictly increase");
        require(d % prev_deg == 0, errc::invalid_argument,
                "each level degree must divide the next (towers extend by composita)");
        long r = d / prev_deg;
        require(cmp(p, r) > 0, errc::invalid_argument,
                "need at least r distinct residues mod p for a split factor");

        // deterministic RNG from the construction inputs
        uint64_t seed = 1469598103934665603ull;
        auto mix = [&seed](uint64_t x) {
            seed ^= x;
            seed *= 1099511628211ull;
        };
        mix(p.get_ui());
        mix(static_cast<uint64_t>(d));
        for (long t : target_degrees) mix(static_cast<uint64_t>(t) + 0x9e3779b9ull);
        std::mt19937_64 rng(seed);

        const NfPtr prev = T.levels.back();
        bool placed = false;
        const long kAttempts = 400;
        for (long attempt = 0; attempt < kAttempts && !placed; ++attempt) {
            // r distinct residues mod p
            std::vector<long> res;
            while (static_cast<long>(res.size()) < r) {
                long a = static_cast<long>(rng() % p.get_ui());
                bool dup = false;
                for (long v : res) dup |= (v == a);
                if (!dup) res.push_back(a);
            }
            ZPoly g({BigInt(1)});
            for (long a : res) g = g * ZPoly({BigInt(-a), BigInt(1)});
            // perturb strictly above p^2 so the mod-p picture is untouched
            BigInt p2 = p * p;
            std::vector<BigInt> gc(g.coeffs());
            std::uniform_int_distribution<long> bump(-3, 3);
            for (long i = 0; i < r; ++i) gc[i] += p2 * bump(rng);
            g = ZPoly(gc);
            if (r > 1 && !is_irreducible_z(g)) continue;

            if (prev_deg == 1) {
                NfPtr K = nf_create(g);
                if (!is_totally_split(K, p)) continue;
                T.witnesses.push_back(nf_zero(K)); // generator of Q is 0
                T.levels.push_back(K);
                placed = true;
                break;
            }
            for (long c = 1; c <= 40 && !placed; ++c) {
                ZPoly F = detail::compositum_poly(prev->defining_poly(), g, c);
                FpCtx Fp(static_cast<uint64_t>(p.get_ui()));
                if (static_cast<long>(fp_roots(Fp, fp_from(Fp, F), true).size()) != d) continue;
                if (!is_irreducible_z(F)) continue;
                NfPtr K = nf_create(F);
                if (!is_totally_split(K, p)) continue; // implied, but certify anyway
                std::vector<BigRational> wc =
                    detail::compositum_witness(prev->defining_poly(), g, c);
                NfElement wit(K, wc);
                T.witnesses.push_back(wit);
                T.levels.push_back(K);
                placed = true;
            }
        }
        require(placed, errc::search_exhausted,
                "no totally split extension of degree " + std::to_string(d) + " found at p = " +
                    p.get_str() + " within the coefficient box");
        prev_deg = d;
    }
    verify_tower(T);
    return T;
}

} // namespace ntheight
