#pragma once
// Construction of auxiliary sections: products of coordinate monomials on the
// two factors of a product surface, constrained to vanish to high order along
// the graph of multiplication by N, with a small integer solution extracted
// from the exact kernel of the resulting linear system.

#include <ntheight/formal.hpp>

#include <optional>

namespace ntheight {

// one coordinate monomial x^i or x^i y; pole order at the origin is
// 2i or 2i + 3
struct Monomial {
    long xpow = 0;
    bool with_y = false;
    long pole_order() const { return 2 * xpow + (with_y ? 3 : 0); }
};

// the monomials of pole order at most 2L on one factor: 1, x, ..., x^L,
// then y, xy, ..., x^(L-2) y; there are 2L of them, and the pair basis is
// indexed by j = 2L * u_index + v_index
struct SectionBasis {
    long L = 0;
    std::vector<Monomial> factor;
};

inline SectionBasis section_basis(long L) {
    require(L >= 2, errc::invalid_argument, "section degree must be at least 2");
    SectionBasis B;
    B.L = L;
    for (long i = 0; i <= L; ++i) B.factor.push_back({i, false});
    for (long i = 0; i + 2 <= L; ++i) B.factor.push_back({i, true});
    require(static_cast<long>(B.factor.size()) == 2 * L, errc::internal_error,
            "unexpected basis count");
    return B;
}

struct VanishingSystem {
    CurvePtr E;
    long N = 0, L = 0, T0 = 0;
    SectionBasis basis;
    // rows k = 0..T0; columns follow the pair indexing of the basis; entry
    // (k, j) is the k-th Taylor coefficient of the trivialized pullback of
    // basis element j along z -> (z, [N]z)
    std::vector<std::vector<BigRational>> matrix;
};

namespace detail {

inline QS eval_monomial(const QRing& R, const Monomial& m, const std::vector<QS>& xpowers,
                        const QS& y) {
    QS v = xpowers[static_cast<size_t>(m.xpow)];
    if (m.with_y) v = ser_mul(R, v, y);
    return v;
}

// per-factor basis values multiplied by the trivializer; each result is a
// power series starting at 2L - pole_order
inline std::vector<QS> trivialized_factor(const QRing& R, const SectionBasis& B, const QS& x,
                                          const QS& y, const QS& z) {
    std::vector<QS> xp(static_cast<size_t>(B.L + 1));
    xp[0] = ser_monomial(R, R.one(), 0, x.prec + 2 * B.L);
    for (long i = 1; i <= B.L; ++i)
        xp[static_cast<size_t>(i)] = ser_mul(R, xp[static_cast<size_t>(i - 1)], x);
    QS triv = ser_pow(R, z, 2 * B.L);
    std::vector<QS> out;
    out.reserve(B.factor.size());
    for (const Monomial& m : B.factor) {
        QS v = ser_mul(R, eval_monomial(R, m, xp, y), triv);
        require(ser_is_zero(R, v) || v.val >= 0, errc::internal_error,
                "trivialized basis element has a pole");
        out.push_back(std::move(v));
    }
    return out;
}

inline double log_int(const BigInt& a) {
    if (sgn(a) == 0) return 0.0;
    long e = 0;
    double m = mpz_get_d_2exp(&e, a.get_mpz_t());
    return std::log(std::abs(m)) + static_cast<double>(e) * std::log(2.0);
}

} // namespace detail

inline VanishingSystem vanishing_system(const CurvePtr& E, long N, long L, long T0) {
    require(E->base->is_rational(), errc::invalid_argument,
            "auxiliary sections are implemented over the rationals");
    require(N >= 1, errc::invalid_argument, "multiplication degree must be positive");
    require(T0 >= 0, errc::invalid_argument, "vanishing order must be nonnegative");
    SectionBasis B = section_basis(L);
    long cols = 2 * L * 2 * L;
    require(T0 + 1 < cols, errc::dimension_error,
            "vanishing conditions must number fewer than the basis elements");

    QRing R;
    long prec = 4 * L + T0 + 6;
    auto [x, y] = weierstrass_laurent(E, prec);
    auto [XN, YN] = mult_xy(E, N, prec);
    QS zN = ser_neg(R, ser_div(R, XN, YN));
    QS z = ser_monomial(R, R.one(), 1, prec);

    std::vector<QS> Au = detail::trivialized_factor(R, B, x, y, z);
    std::vector<QS> Av = detail::trivialized_factor(R, B, XN, YN, zN);

    VanishingSystem V;
    V.E = E;
    V.N = N;
    V.L = L;
    V.T0 = T0;
    V.basis = B;
    V.matrix.assign(static_cast<size_t>(T0 + 1),
                    std::vector<BigRational>(static_cast<size_t>(cols), BigRational(0)));
    for (long ju = 0; ju < 2 * L; ++ju)
        for (long jv = 0; jv < 2 * L; ++jv) {
            QS Bj = ser_mul(R, Au[static_cast<size_t>(ju)], Av[static_cast<size_t>(jv)]);
            require(Bj.prec > T0, errc::internal_error, "insufficient series precision");
            long j = 2 * L * ju + jv;
            for (long k = 0; k <= T0; ++k)
                V.matrix[static_cast<size_t>(k)][static_cast<size_t>(j)] = ser_coeff(R, Bj, k);
        }
    return V;
}

// --- exact small kernel vectors ---------------------------------------------

struct SiegelResult {
    std::vector<BigInt> solution;
    double height = 0.0;  // log of the sup norm
    double bound = 0.0;   // pigeonhole-shaped bound the solution is measured against
};

namespace detail {

inline int cmp_abs(const BigInt& a, const BigInt& b) {
    return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t());
}

inline BigInt nearest_int(const BigRational& r) {
    BigInt two_n_plus_d = 2 * r.get_num() + r.get_den();
    BigInt two_d = 2 * r.get_den();
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), two_n_plus_d.get_mpz_t(), two_d.get_mpz_t());
    return q;
}

inline BigInt nearest_quotient(const BigInt& a, const BigInt& b) {
    return nearest_int(BigRational(a) / BigRational(b));
}

// column-style unimodular elimination: returns a basis of the lattice of
// integer vectors x with M x = 0
inline std::vector<std::vector<BigInt>> integer_kernel(std::vector<std::vector<BigInt>> M) {
    long rows = static_cast<long>(M.size());
    long cols = rows > 0 ? static_cast<long>(M[0].size()) : 0;
    require(cols > 0, errc::invalid_argument, "kernel of an empty matrix");
    std::vector<std::vector<BigInt>> U(static_cast<size_t>(cols),
                                       std::vector<BigInt>(static_cast<size_t>(cols), BigInt(0)));
    for (long j = 0; j < cols; ++j) U[static_cast<size_t>(j)][static_cast<size_t>(j)] = 1;

    auto col_axpy = [&](long dst, long src, const BigInt& q) {
        if (sgn(q) == 0) return;
        for (long i = 0; i < rows; ++i)
            M[static_cast<size_t>(i)][static_cast<size_t>(dst)] -=
                q * M[static_cast<size_t>(i)][static_cast<size_t>(src)];
        for (long i = 0; i < cols; ++i)
            U[static_cast<size_t>(dst)][static_cast<size_t>(i)] -=
                q * U[static_cast<size_t>(src)][static_cast<size_t>(i)];
    };
    auto col_swap = [&](long a, long b) {
        if (a == b) return;
        for (long i = 0; i < rows; ++i)
            std::swap(M[static_cast<size_t>(i)][static_cast<size_t>(a)],
                      M[static_cast<size_t>(i)][static_cast<size_t>(b)]);
        std::swap(U[static_cast<size_t>(a)], U[static_cast<size_t>(b)]);
    };

    long fixed = 0;
    for (long i = 0; i < rows && fixed < cols; ++i) {
        for (;;) {
            long jmin = -1;
            for (long j = fixed; j < cols; ++j) {
                const BigInt& v = M[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (sgn(v) == 0) continue;
                if (jmin < 0 || cmp_abs(v, M[static_cast<size_t>(i)][static_cast<size_t>(jmin)]) < 0)
                    jmin = j;
            }
            if (jmin < 0) break; // row already zero on the free columns
            bool others = false;
            const BigInt pivot = M[static_cast<size_t>(i)][static_cast<size_t>(jmin)];
            for (long j = fixed; j < cols; ++j) {
                if (j == jmin) continue;
                const BigInt& v = M[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (sgn(v) == 0) continue;
                col_axpy(j, jmin, nearest_quotient(v, pivot));
                if (sgn(M[static_cast<size_t>(i)][static_cast<size_t>(j)]) != 0) others = true;
            }
            if (!others) {
                col_swap(jmin, fixed);
                ++fixed;
                break;
            }
        }
    }

    std::vector<std::vector<BigInt>> kernel;
    for (long j = fixed; j < cols; ++j) kernel.push_back(U[static_cast<size_t>(j)]);
    return kernel;
}

// exact-arithmetic lattice reduction with delta = 3/4, followed by the usual
// size reduction; dimensions here are a few dozen at most
inline void lll_reduce(std::vector<std::vector<BigInt>>& basis) {
    long n = static_cast<long>(basis.size());
    if (n <= 1) return;
    long m = static_cast<long>(basis[0].size());

    std::vector<std::vector<BigRational>> mu(static_cast<size_t>(n),
                                             std::vector<BigRational>(static_cast<size_t>(n)));
    std::vector<BigRational> Bn(static_cast<size_t>(n));
    std::vector<std::vector<BigRational>> star(static_cast<size_t>(n),
                                               std::vector<BigRational>(static_cast<size_t>(m)));

    auto gram_schmidt = [&]() {
        for (long i = 0; i < n; ++i) {
            for (long t = 0; t < m; ++t)
                star[static_cast<size_t>(i)][static_cast<size_t>(t)] =
                    BigRational(basis[static_cast<size_t>(i)][static_cast<size_t>(t)]);
            for (long j = 0; j < i; ++j) {
                BigRational dot(0);
                for (long t = 0; t < m; ++t)
                    dot += BigRational(basis[static_cast<size_t>(i)][static_cast<size_t>(t)]) *
                           star[static_cast<size_t>(j)][static_cast<size_t>(t)];
                require(sgn(Bn[static_cast<size_t>(j)]) > 0, errc::internal_error,
                        "dependent vectors in lattice basis");
                mu[static_cast<size_t>(i)][static_cast<size_t>(j)] = dot / Bn[static_cast<size_t>(j)];
                for (long t = 0; t < m; ++t)
                    star[static_cast<size_t>(i)][static_cast<size_t>(t)] -=
                        mu[static_cast<size_t>(i)][static_cast<size_t>(j)] *
                        star[static_cast<size_t>(j)][static_cast<size_t>(t)];
            }
            BigRational norm(0);
            for (long t = 0; t < m; ++t)
                norm += star[static_cast<size_t>(i)][static_cast<size_t>(t)] *
                        star[static_cast<size_t>(i)][static_cast<size_t>(t)];
            Bn[static_cast<size_t>(i)] = norm;
        }
    };

    auto size_reduce_row = [&](long k) {
        for (long j = k - 1; j >= 0; --j) {
            BigInt q = nearest_int(mu[static_cast<size_t>(k)][static_cast<size_t>(j)]);
            if (sgn(q) == 0) continue;
            BigRational qr(q);
            for (long t = 0; t < m; ++t)
                basis[static_cast<size_t>(k)][static_cast<size_t>(t)] -=
                    q * basis[static_cast<size_t>(j)][static_cast<size_t>(t)];
            for (long t = 0; t < j; ++t)
                mu[static_cast<size_t>(k)][static_cast<size_t>(t)] -=
                    qr * mu[static_cast<size_t>(j)][static_cast<size_t>(t)];
            mu[static_cast<size_t>(k)][static_cast<size_t>(j)] -= qr;
        }
    };

    gram_schmidt();
    BigRational delta(3, 4);
    delta.canonicalize();
    long k = 1;
    long guard = 0;
    while (k < n) {
        require(++guard < 200000, errc::internal_error, "lattice reduction failed to terminate");
        size_reduce_row(k);
        BigRational lhs = Bn[static_cast<size_t>(k)];
        BigRational mkk = mu[static_cast<size_t>(k)][static_cast<size_t>(k - 1)];
        BigRational rhs = (delta - mkk * mkk) * Bn[static_cast<size_t>(k - 1)];
        if (lhs >= rhs) {
            ++k;
        } else {
            std::swap(basis[static_cast<size_t>(k)], basis[static_cast<size_t>(k - 1)]);
            gram_schmidt();
            k = std::max(k - 1, 1L);
        }
    }
    for (long i = 1; i < n; ++i) size_reduce_row(i);
}

inline void canonicalize_sign(std::vector<BigInt>& v) {
    for (const BigInt& x : v) {
        if (sgn(x) > 0) return;
        if (sgn(x) < 0) {
            for (BigInt& y : v) y = -y;
            return;
        }
    }
}

inline BigInt sup_norm(const std::vector<BigInt>& v) {
    BigInt s(0);
    for (const BigInt& x : v)
        if (cmp_abs(x, s) > 0) s = abs(x);
    return s;
}

} // namespace detail

// smallest kernel vector the reduction finds, with ties broken
// lexicographically after normalizing the leading sign
inline SiegelResult siegel_solve(const std::vector<std::vector<BigInt>>& M) {
    long rows = static_cast<long>(M.size());
    require(rows > 0, errc::invalid_argument, "empty linear system");
    long cols = static_cast<long>(M[0].size());
    for (const auto& row : M)
        require(static_cast<long>(row.size()) == cols, errc::invalid_argument, "ragged matrix");

    std::vector<std::vector<BigInt>> kernel = detail::integer_kernel(M);
    require(!kernel.empty(), errc::no_kernel, "the system has no nonzero integer solution");
    detail::lll_reduce(kernel);

    std::optional<std::vector<BigInt>> best;
    BigInt best_sup(0);
    for (auto v : kernel) {
        detail::canonicalize_sign(v);
        BigInt s = detail::sup_norm(v);
        require(sgn(s) > 0, errc::internal_error, "zero vector in kernel basis");
        if (!best || s < best_sup ||
            (s == best_sup && std::lexicographical_compare(v.begin(), v.end(), best->begin(),
                                                           best->end()))) {
            best_sup = s;
            best = std::move(v);
        }
    }

    // the certificate: the returned vector really solves the system
    for (long i = 0; i < rows; ++i) {
        BigInt acc(0);
        for (long j = 0; j < cols; ++j)
            acc += M[static_cast<size_t>(i)][static_cast<size_t>(j)] * (*best)[static_cast<size_t>(j)];
        require(sgn(acc) == 0, errc::internal_error, "kernel certificate failed");
    }

    SiegelResult out;
    out.solution = *best;
    out.height = detail::log_int(best_sup);
    long nonzero_rows = 0;
    double logsum = 0.0;
    for (long i = 0; i < rows; ++i) {
        BigInt sq(0);
        for (long j = 0; j < cols; ++j) {
            const BigInt& v = M[static_cast<size_t>(i)][static_cast<size_t>(j)];
            sq += v * v;
        }
        if (sgn(sq) > 0) {
            ++nonzero_rows;
            logsum += 0.5 * detail::log_int(sq);
        }
    }
    require(cols > nonzero_rows, errc::no_kernel,
            "system is not underdetermined after dropping zero rows");
    out.bound = logsum / static_cast<double>(cols - nonzero_rows);
    return out;
}

// --- assembled auxiliary sections -------------------------------------------

struct AuxSection {
    CurvePtr E;
    long L = 0, N = 0, T0 = 0;
    std::vector<BigInt> coeffs;   // integer coordinates in the pair basis
    BigInt denominator{1};        // common denominator cleared from the system
    double height_of_F = 0.0;     // log sup norm of the coefficient vector
    double bound_height = 0.0;    // the pigeonhole-shaped bound it was measured against
    long kernel_margin = 0;       // basis size minus number of vanishing conditions
    long structural_tf = 0;       // first nonzero coefficient of the pullback at the origin
};

namespace detail {

// combined trivialized pullback sum_j b_j B_j, grouped by the first factor so
// the evaluation order differs from the columnwise construction
inline QS combined_section_series(const CurvePtr& E, long N, long L,
                                  const std::vector<BigInt>& b, long prec) {
    QRing R;
    SectionBasis B = section_basis(L);
    auto [x, y] = weierstrass_laurent(E, prec);
    auto [XN, YN] = mult_xy(E, N, prec);
    QS zN = ser_neg(R, ser_div(R, XN, YN));
    QS z = ser_monomial(R, R.one(), 1, prec);
    std::vector<QS> Au = trivialized_factor(R, B, x, y, z);
    std::vector<QS> Av = trivialized_factor(R, B, XN, YN, zN);
    QS total = ser_zero(R, prec);
    for (long ju = 0; ju < 2 * L; ++ju) {
        QS inner = ser_zero(R, prec);
        for (long jv = 0; jv < 2 * L; ++jv) {
            const BigInt& c = b[static_cast<size_t>(2 * L * ju + jv)];
            if (sgn(c) == 0) continue;
            inner = ser_add(R, inner, ser_scale(R, Av[static_cast<size_t>(jv)], BigRational(c)));
        }
        if (ser_is_zero(R, inner)) continue;
        total = ser_add(R, total, ser_mul(R, Au[static_cast<size_t>(ju)], inner));
    }
    return total;
}

} // namespace detail

inline AuxSection build_aux_section(const CurvePtr& E, long N, long L, long T0) {
    long cols = 2 * L * 2 * L;
    require(T0 + 1 <= cols / 2, errc::dimension_error,
            "vanishing conditions must use at most half the basis dimension");
    VanishingSystem V = vanishing_system(E, N, L, T0);

    // clear denominators rowwise (row scaling leaves the kernel unchanged)
    // and record the overall denominator of the system
    std::vector<std::vector<BigInt>> M(static_cast<size_t>(T0 + 1),
                                       std::vector<BigInt>(static_cast<size_t>(cols)));
    BigInt global_den(1);
    for (long i = 0; i <= T0; ++i) {
        BigInt den(1);
        for (long j = 0; j < cols; ++j)
            den = lcm(den, V.matrix[static_cast<size_t>(i)][static_cast<size_t>(j)].get_den());
        for (long j = 0; j < cols; ++j) {
            BigRational scaled = V.matrix[static_cast<size_t>(i)][static_cast<size_t>(j)] * BigRational(den);
            require(scaled.get_den() == 1, errc::internal_error, "denominator clearing failed");
            M[static_cast<size_t>(i)][static_cast<size_t>(j)] = scaled.get_num();
        }
        global_den = lcm(global_den, den);
    }

    SiegelResult S = siegel_solve(M);

    AuxSection F;
    F.E = E;
    F.L = L;
    F.N = N;
    F.T0 = T0;
    F.coeffs = S.solution;
    F.denominator = global_den;
    F.height_of_F = S.height;
    F.bound_height = S.bound;
    F.kernel_margin = cols - (T0 + 1);

    // independent confirmation: recompute the pullback series of the chosen
    // combination with a different grouping and check the prescribed
    // vanishing, then locate the first surviving coefficient
    long cap = 4 * L + cols + T0;
    long prec = 4 * L + T0 + 8;
    QRing R;
    for (;;) {
        bool reachable = prec + 4 * N + 16 <= kFormalPrecCap;
        require(reachable, errc::precision_exhausted,
                "structural order search exceeds the formal precision cap");
        QS G = detail::combined_section_series(E, N, L, F.coeffs, prec);
        for (long k = 0; k <= T0; ++k)
            require(sgn(ser_coeff(R, G, k)) == 0, errc::internal_error,
                    "independent vanishing check failed");
        if (!ser_is_zero(R, G)) {
            long tf = ser_order(R, G);
            require(tf > T0, errc::internal_error, "vanishing order below the prescribed bound");
            F.structural_tf = tf;
            break;
        }
        if (G.prec > cap)
            raise(errc::identically_zero_on_image,
                  "section vanishes identically along the multiplication graph");
        prec = std::min(prec * 2, cap + 4 * N + 24);
    }
    return F;
}

// --- parameter selection ------------------------------------------------------

struct ParamChoice {
    long L = 0;
    double rho = 0.0;
    long T0 = 0;
    long Tf_cap = 0;
    double psi_term = 0.0; // the weighted splitting mass psi * log q
};

inline ParamChoice choose_parameters(double psi, long q, long L) {
    require(L >= 3, errc::invalid_argument, "section degree must be at least 3");
    require(q >= 2, errc::invalid_argument, "residue size must be at least 2");
    if (psi <= 0.0) raise(errc::infeasible, "splitting mass is zero");
    double S = psi * std::log(static_cast<double>(q));
    double logL = std::log(static_cast<double>(L));
    // feasibility demands 1/L <= S; the remaining constraint rho * log L <= S
    // determines the largest admissible rho, found by bisection
    if (1.0 / static_cast<double>(L) > S) raise(errc::infeasible, "splitting mass too small");
    auto admissible = [&](double rho) { return rho * logL <= S && 1.0 / static_cast<double>(L) <= S; };
    double lo = 0.0, hi = 1.0;
    require(admissible(lo), errc::infeasible, "no admissible exponent");
    while (admissible(hi)) hi *= 2.0;
    while (hi - lo > 1e-6) {
        double mid = 0.5 * (lo + hi);
        if (admissible(mid))
            lo = mid;
        else
            hi = mid;
    }
    ParamChoice P;
    P.L = L;
    P.rho = lo;
    P.psi_term = S;
    double Ld = static_cast<double>(L);
    P.T0 = static_cast<long>(std::floor(P.rho * Ld * Ld));
    if (P.T0 + 1 > 2 * L * L) P.T0 = 2 * L * L - 1;
    long cap_a = P.T0 / 2;
    long cap_b = static_cast<long>(std::floor(P.rho * Ld * Ld * S / logL));
    P.Tf_cap = std::min(cap_a, cap_b);
    return P;
}

} // namespace ntheight
