#pragma once
// Jets of an auxiliary section along the multiplication graph at a chosen
// point, computed in an unramified completion. The expansion parameter is the
// formal coordinate of a moving point added to the base point by the chord
// law, so every coefficient is an element of the completion whose valuation
// can be read off exactly once it is resolved at working precision.

#include <ntheight/auxiliary.hpp>

namespace ntheight {

struct JetReport {
    long Tf = -1;     // first index with a coefficient resolved nonzero
    long order = 0;
    // entry k is the exact valuation of coefficient k, or empty when the
    // coefficient is zero at the working precision (or exactly zero)
    std::vector<std::optional<long>> valuations;
    long precision = 0;      // digits used in the completion
    long residue_degree = 1; // multiply valuations by this for the log q scale
};

namespace detail {

// chord addition of a fixed affine point to a moving expansion
template <typename Ring>
std::pair<Series<Ring>, Series<Ring>> chord_with_expansion(const Ring& R,
                                                           const typename Ring::Elem& px,
                                                           const typename Ring::Elem& py,
                                                           const Series<Ring>& mx,
                                                           const Series<Ring>& my) {
    auto mono = [&](const typename Ring::Elem& v, long prec) {
        return ser_monomial(R, v, 0, prec);
    };
    Series<Ring> dx = ser_sub(R, mx, mono(px, mx.prec));
    Series<Ring> lam = ser_div(R, ser_sub(R, my, mono(py, my.prec)), dx);
    Series<Ring> X = ser_sub(R, ser_sub(R, ser_mul(R, lam, lam), mono(px, lam.prec)), mx);
    Series<Ring> Y = ser_sub(R, ser_mul(R, lam, ser_sub(R, mono(px, X.prec), X)),
                             mono(py, X.prec));
    return {X, Y};
}

// coordinate expansions of the moving pair together with the trivializing
// frame factor s^{2L} t^{2L}
template <typename Ring>
struct JetFrame {
    Series<Ring> Xs, Ys; // moving point P + E(eps)
    Series<Ring> Xt, Yt; // moving point [N]P + [N]E(eps)
    Series<Ring> triv;
};

// The chord against a fixed base point cancels the principal parts of the
// moving expansion; those cancellations are algebraic identities, so the
// frame is assembled over an exact coefficient ring and only embedded into
// a completion afterwards. Base coordinates are ignored at infinity.
template <typename Ring>
JetFrame<Ring> jet_frame(const Ring& R, long L, bool p_at_o, const typename Ring::Elem& px,
                         const typename Ring::Elem& py, bool np_at_o,
                         const typename Ring::Elem& npx, const typename Ring::Elem& npy,
                         const Series<Ring>& xe, const Series<Ring>& ye,
                         const Series<Ring>& XNe, const Series<Ring>& YNe) {
    JetFrame<Ring> f;
    std::pair<Series<Ring>, Series<Ring>> ms =
        p_at_o ? std::pair{xe, ye} : chord_with_expansion(R, px, py, xe, ye);
    std::pair<Series<Ring>, Series<Ring>> mt =
        np_at_o ? std::pair{XNe, YNe} : chord_with_expansion(R, npx, npy, XNe, YNe);
    f.Xs = std::move(ms.first);
    f.Ys = std::move(ms.second);
    f.Xt = std::move(mt.first);
    f.Yt = std::move(mt.second);
    Series<Ring> s = ser_neg(R, ser_div(R, f.Xs, f.Ys));
    Series<Ring> t = ser_neg(R, ser_div(R, f.Xt, f.Yt));
    f.triv = ser_mul(R, ser_pow(R, s, 2 * L), ser_pow(R, t, 2 * L));
    return f;
}

template <typename Ring>
JetFrame<Ring> map_frame(const Ring& R, const JetFrame<QRing>& f) {
    return {ser_map(R, f.Xs), ser_map(R, f.Ys), ser_map(R, f.Xt), ser_map(R, f.Yt),
            ser_map(R, f.triv)};
}

// the trivialized section pulled back along eps -> (P + E(eps), [N]P + [N]E(eps))
template <typename Ring>
Series<Ring> section_jet_series(const Ring& R, const AuxSection& F, const JetFrame<Ring>& fr,
                                long order) {
    long L = F.L;
    const Series<Ring>&Xs = fr.Xs, &Ys = fr.Ys;
    const Series<Ring>&Xt = fr.Xt, &Yt = fr.Yt;
    const Series<Ring>& triv = fr.triv;

    SectionBasis B = section_basis(L);
    long pad = std::min({Xs.prec, Ys.prec, Xt.prec, Yt.prec}) + 4 * L + 4;
    std::vector<Series<Ring>> xs(static_cast<size_t>(L + 1)), xt(static_cast<size_t>(L + 1));
    xs[0] = ser_monomial(R, R.one(), 0, pad);
    xt[0] = xs[0];
    for (long i = 1; i <= L; ++i) {
        xs[static_cast<size_t>(i)] = ser_mul(R, xs[static_cast<size_t>(i - 1)], Xs);
        xt[static_cast<size_t>(i)] = ser_mul(R, xt[static_cast<size_t>(i - 1)], Xt);
    }
    auto factor_value = [&](const Monomial& mo, const std::vector<Series<Ring>>& xp,
                            const Series<Ring>& yv) {
        Series<Ring> v = xp[static_cast<size_t>(mo.xpow)];
        if (mo.with_y) v = ser_mul(R, v, yv);
        return v;
    };
    Series<Ring> G = ser_zero(R, pad);
    for (long ju = 0; ju < 2 * L; ++ju) {
        Series<Ring> inner = ser_zero(R, pad);
        bool any = false;
        for (long jv = 0; jv < 2 * L; ++jv) {
            const BigInt& c = F.coeffs[static_cast<size_t>(2 * L * ju + jv)];
            if (sgn(c) == 0) continue;
            any = true;
            inner = ser_add(R, inner,
                            ser_scale(R, factor_value(B.factor[static_cast<size_t>(jv)], xt, Yt),
                                      R.from_rational(BigRational(c))));
        }
        if (!any) continue;
        G = ser_add(R, G,
                    ser_mul(R, factor_value(B.factor[static_cast<size_t>(ju)], xs, Ys), inner));
    }
    G = ser_mul(R, G, triv);
    return ser_truncate(R, std::move(G), order + 1);
}

enum class JetOutcome { ok, all_zero_at_precision, ambiguous_prefix };

struct JetAttempt {
    JetReport report;
    JetOutcome outcome = JetOutcome::ok;
    bool certified_all_zero = false;
};

inline JetAttempt jet_attempt(const AuxSection& F, const CurvePoint& P, const CurvePoint& NP,
                              const PrimeIdeal& w, long order, long digits) {
    const CurvePtr& E = F.E;
    QRing Q0;
    long A = order + 4 * F.L + 12;
    auto [xq, yq] = weierstrass_laurent(E, A);
    auto [XNq, YNq] = mult_xy(E, F.N, A);
    BigRational rz(0);
    BigRational px = P.at_infinity ? rz : P.x.rational_value();
    BigRational py = P.at_infinity ? rz : P.y.rational_value();
    BigRational npx = NP.at_infinity ? rz : NP.x.rational_value();
    BigRational npy = NP.at_infinity ? rz : NP.y.rational_value();
    JetFrame<QRing> fq =
        jet_frame(Q0, F.L, P.at_infinity, px, py, NP.at_infinity, npx, npy, xq, yq, XNq, YNq);

    Completion C = complete_at(E->base, w, digits);
    PadRing R{C.W};
    PS G = section_jet_series(R, F, map_frame(R, fq), order);
    require(G.prec > order, errc::precision_exhausted,
            "jet expansion lost too much working precision");

    JetAttempt out;
    out.report.order = order;
    out.report.precision = digits;
    out.report.residue_degree = w.residue_degree;
    out.report.valuations.resize(static_cast<size_t>(order + 1));
    bool unresolved_prefix = false;
    bool all_exact = true;
    for (long k = 0; k <= order; ++k) {
        PadicNumber c = ser_coeff(R, G, k);
        if (c.zflag) {
            if (!c.exact_zero()) all_exact = false;
            continue;
        }
        all_exact = false;
        out.report.valuations[static_cast<size_t>(k)] = c.val;
        if (out.report.Tf < 0) {
            out.report.Tf = k;
            // coefficients before the first resolved one must be certified
            // zeros for the index to be trustworthy
            for (long j = 0; j < k; ++j) {
                PadicNumber cj = ser_coeff(R, G, j);
                if (cj.zflag && !cj.exact_zero()) unresolved_prefix = true;
            }
        }
    }
    if (out.report.Tf < 0) {
        out.outcome = JetOutcome::all_zero_at_precision;
        out.certified_all_zero = all_exact;
    } else if (unresolved_prefix) {
        out.outcome = JetOutcome::ambiguous_prefix;
    }
    return out;
}

} // namespace detail

namespace detail {

inline void require_jet_frame(const AuxSection& F, const CurvePoint& P, const CurvePoint& NP,
                              long order) {
    require(F.E == P.E || (F.E->base->defining_poly() == P.E->base->defining_poly() &&
                           F.E->a == P.E->a && F.E->b == P.E->b),
            errc::invalid_argument, "section and point belong to different curves");
    require(order >= 0, errc::invalid_argument, "jet order must be nonnegative");
    if (!P.at_infinity)
        require(!P.y.is_zero(), errc::invalid_argument,
                "trivializing frame has a pole at a two-torsion base point");
    if (!NP.at_infinity)
        require(!NP.y.is_zero(), errc::invalid_argument,
                "trivializing frame has a pole at the two-torsion image point");
}

} // namespace detail

// Taylor coefficients 0..order of the section along the graph at P, as
// valuations in the completion at w. Works at T0 + order + 10 digits and
// doubles once if the picture is not resolved.
inline JetReport jet_evaluate(const AuxSection& F, const CurvePoint& P, const PrimeIdeal& w,
                              long order) {
    CurvePoint NP = point_mul(F.N, P);
    detail::require_jet_frame(F, P, NP, order);
    require_good(*F.E, w);

    long digits = F.T0 + order + 10;
    detail::JetAttempt first = detail::jet_attempt(F, P, NP, w, order, digits);
    if (first.outcome == detail::JetOutcome::ok) return first.report;
    if (first.certified_all_zero)
        raise(errc::all_zero, "all jet coefficients through order " + std::to_string(order) +
                                  " are exactly zero");
    detail::JetAttempt second = detail::jet_attempt(F, P, NP, w, order, 2 * digits);
    if (second.outcome == detail::JetOutcome::ok) return second.report;
    if (second.outcome == detail::JetOutcome::all_zero_at_precision)
        raise(errc::all_zero, "no nonzero jet coefficient through order " + std::to_string(order) +
                                  " at " + std::to_string(2 * digits) + " digits");
    raise(errc::precision_exhausted,
          "leading jet coefficients cannot be separated from zero at working precision");
}

struct DropReport {
    long T0 = 0;
    long Tf = 0;
    long m = 0;              // valuation of the formal parameter of P at w
    long valuation = 0;      // v_w of the first nonzero jet coefficient
    long rhs = 0;            // T0 - Tf
    long residue_degree = 1; // scale factor between v_w and the log q normalization
    bool holds = false;
    long strong_rhs = 0;     // (T0 - Tf) * m
    bool strong_holds = false;
};

// the certified vanishing at the origin forces the first surviving jet
// coefficient at a point reducing to the identity to carry valuation at least
// T0 - Tf (in fact (T0 - Tf) m); both comparisons are exact integers
inline DropReport verify_drop(const AuxSection& F, const CurvePoint& P, const PrimeIdeal& w) {
    Reduction r = reduce_point(P, w);
    require(r.o_flag, errc::invalid_argument,
            "the point does not reduce to the identity at the chosen place");
    JetReport jr = jet_evaluate(F, P, w, F.T0 + 1);
    require(jr.Tf >= 0 && jr.valuations[static_cast<size_t>(jr.Tf)].has_value(),
            errc::internal_error, "jet report carries no resolved coefficient");
    DropReport d;
    d.T0 = F.T0;
    d.Tf = jr.Tf;
    d.m = r.m;
    d.valuation = *jr.valuations[static_cast<size_t>(jr.Tf)];
    d.rhs = F.T0 - jr.Tf;
    d.residue_degree = jr.residue_degree;
    d.holds = d.valuation >= d.rhs;
    d.strong_rhs = (F.T0 - jr.Tf) * r.m;
    d.strong_holds = d.valuation >= d.strong_rhs;
    require(d.holds, errc::internal_error,
            "certified vanishing failed to amplify at the chosen place");
    return d;
}

struct ExactJetLead {
    long tf = -1; // -1 when every coefficient through the cap is zero
    BigRational value;
};

// First nonzero Taylor coefficient of the section along the graph at a point
// with rational coordinates, in exact arithmetic. Useful when the coefficient
// itself is wanted as a number, e.g. for place-by-place accounting; the
// p-adic evaluator only reports valuations.
inline ExactJetLead jet_exact_leading(const AuxSection& F, const CurvePoint& P, long order_cap) {
    CurvePoint NP = point_mul(F.N, P);
    detail::require_jet_frame(F, P, NP, order_cap);
    require(P.E->base->is_rational(), errc::invalid_argument,
            "exact jets are computed over the rationals");
    QRing R;
    long A = order_cap + 4 * F.L + 12;
    auto [xq, yq] = weierstrass_laurent(F.E, A);
    auto [XNq, YNq] = mult_xy(F.E, F.N, A);
    BigRational rz(0);
    BigRational px = P.at_infinity ? rz : P.x.rational_value();
    BigRational py = P.at_infinity ? rz : P.y.rational_value();
    BigRational npx = NP.at_infinity ? rz : NP.x.rational_value();
    BigRational npy = NP.at_infinity ? rz : NP.y.rational_value();
    detail::JetFrame<QRing> fr =
        detail::jet_frame(R, F.L, P.at_infinity, px, py, NP.at_infinity, npx, npy, xq, yq, XNq, YNq);
    QS G = detail::section_jet_series(R, F, fr, order_cap);
    require(G.prec > order_cap, errc::precision_exhausted,
            "jet expansion lost too much working precision");
    ExactJetLead out;
    for (long k = 0; k <= order_cap; ++k) {
        BigRational c = ser_coeff(R, G, k);
        if (sgn(c) != 0) {
            out.tf = k;
            out.value = c;
            return out;
        }
    }
    return out;
}

} // namespace ntheight
