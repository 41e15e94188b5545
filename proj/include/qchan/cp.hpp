// Complete-positivity verification. Two independent routes:
//   (a) closed-form Fujiwara-Algoet inequalities (unital case) and their
//       generalization to translated channels, evaluated in the canonical
//       frame with compensated arithmetic;
//   (b) the minimum Choi eigenvalue from a dense Hermitian solve.
// Route (b) is the oracle; is_cp runs both and refuses to pick silently when
// they disagree outside the rounding band.
#pragma once

#include "qchan/canonical.hpp"
#include "qchan/choi.hpp"

namespace qchan {

enum class CpVerdict { CP, NotCP, Boundary };

inline const char* to_string(CpVerdict v) {
    switch (v) {
        case CpVerdict::CP: return "CP";
        case CpVerdict::NotCP: return "NotCP";
        default: return "Boundary";
    }
}

/// margin > tol: clearly inside; margin < -tol: clearly outside; else on the
/// boundary band. Extremal channels sit exactly on the boundary and must not
/// flip verdicts nondeterministically.
inline CpVerdict verdict_band(double margin, double tol) {
    if (margin > tol) return CpVerdict::CP;
    if (margin < -tol) return CpVerdict::NotCP;
    return CpVerdict::Boundary;
}

struct CPReport {
    Vec4 q = Vec4::Zero();           ///< Choi eigenvalue weights of the unital part
    double r = 0.0;                  ///< 1 - sum(l_i^2) + 2 sum(l_i^2 u_i^2)
    double q_prod = 0.0;             ///< 256 q0 q1 q2 q3
    double bound = 0.0;              ///< r - sqrt(r^2 - q_prod): admissible |t|^2
    double a = 0.0;                  ///< char-poly data: 3 - sum(l^2) - t^2
    double b = 0.0;                  ///< 1 - sum(l^2) - t^2 + 2 l1 l2 l3
    double detC = 0.0;               ///< (t^4 - 2 r t^2 + q_prod)/16
    Vec4 choi_eigs = Vec4::Zero();   ///< ascending Choi spectrum
    CpVerdict verdict = CpVerdict::CP;
    bool unital = true;
    double margin = 0.0;             ///< closed-form margin that set the verdict
    double eig_margin = 0.0;         ///< min Choi eigenvalue (oracle route)
    bool upper_root_contact = false; ///< t^2 landed on the inadmissible upper root
};

/// Characteristic polynomial of the Choi matrix in terms of the report
/// scalars: x^4 - 2x^3 + (a/2)x^2 - (b/2)x + detC.
inline double char_poly(const CPReport& rep, double x) {
    return (((x - 2.0) * x + rep.a / 2.0) * x - rep.b / 2.0) * x + rep.detC;
}

namespace detail {

/// Closed-form scalars shared by the unital and translated routes. All the
/// cancellation-prone quantities (q_prod, r^2 - q_prod, detC) are carried in
/// double-double precision: near the double root of the quartic, a plain
/// double r^2 - q loses enough bits to break the 1e-12 identity checks.
inline void gfa_scalars(const Vec3& lambda, const Vec3& t, CPReport& rep) {
    const double l1 = lambda[0], l2 = lambda[1], l3 = lambda[2];

    dd q_dd[4];
    q_dd[0] = dd_scale(dd_add(dd_add(two_sum(1.0, l1), l2), l3), 0.25);
    q_dd[1] = dd_scale(dd_add(dd_add(two_sum(1.0, l1), -l2), -l3), 0.25);
    q_dd[2] = dd_scale(dd_add(dd_add(two_sum(1.0, -l1), l2), -l3), 0.25);
    q_dd[3] = dd_scale(dd_add(dd_add(two_sum(1.0, -l1), -l2), l3), 0.25);
    for (int i = 0; i < 4; ++i) rep.q[i] = dd_value(q_dd[i]);

    dd t2_dd = dd_add(dd_add(two_prod(t[0], t[0]), two_prod(t[1], t[1])), two_prod(t[2], t[2]));
    const double t2 = dd_value(t2_dd);

    // Translation direction; the reference z-hat is used at t = 0 so the
    // unital report still carries meaningful r/bound values.
    Vec3 u2(0.0, 0.0, 1.0);
    if (t2 > 0.0) u2 = Vec3(t[0] * t[0] / t2, t[1] * t[1] / t2, t[2] * t[2] / t2);

    const dd lam2[3] = {two_prod(l1, l1), two_prod(l2, l2), two_prod(l3, l3)};
    dd sum_l2 = dd_add(dd_add(lam2[0], lam2[1]), lam2[2]);
    dd r_dd = dd_add(dd_sub(dd{1.0, 0.0}, sum_l2),
                     dd_scale(dd_add(dd_add(dd_mul(lam2[0], u2[0]), dd_mul(lam2[1], u2[1])),
                                     dd_mul(lam2[2], u2[2])),
                              2.0));
    rep.r = dd_value(r_dd);

    dd qprod_dd = dd_scale(dd_mul(dd_mul(q_dd[0], q_dd[1]), dd_mul(q_dd[2], q_dd[3])), 256.0);
    rep.q_prod = dd_value(qprod_dd);

    const double disc = dd_value(dd_sub(dd_mul(r_dd, r_dd), qprod_dd));
    const double sq = disc > 0.0 ? std::sqrt(disc) : 0.0;
    rep.bound = rep.r - sq;

    rep.a = dd_value(dd_sub(dd_sub(dd{3.0, 0.0}, sum_l2), t2_dd));
    rep.b = dd_value(dd_add(dd_sub(dd_sub(dd{1.0, 0.0}, sum_l2), t2_dd),
                            dd_scale(dd_mul(two_prod(l1, l2), dd{l3, 0.0}), 2.0)));
    rep.detC = dd_value(dd_scale(
        dd_add(dd_sub(dd_mul(t2_dd, t2_dd), dd_scale(dd_mul(r_dd, t2_dd), 2.0)), qprod_dd),
        1.0 / 16.0));
}

}  // namespace detail

/// Unital Fujiwara-Algoet conditions: CP iff all q_i >= 0, equivalently
/// 1 +- l3 >= |l1 +- l2|. The Choi spectrum is (2q_i), filled in closed form.
inline CPReport fac_unital(const Vec3& lambda, double tol = 1e-10) {
    CPReport rep;
    detail::gfa_scalars(lambda, Vec3::Zero(), rep);
    rep.unital = true;
    Vec4 eigs = 2.0 * rep.q;
    std::sort(eigs.data(), eigs.data() + 4);
    rep.choi_eigs = eigs;
    rep.margin = rep.q.minCoeff();
    rep.eig_margin = eigs[0];
    rep.verdict = verdict_band(rep.margin, tol);
    return rep;
}

/// Generalized Fujiwara-Algoet conditions in the canonical frame: CP iff all
/// q_i >= 0 and |t|^2 <= r - sqrt(r^2 - q_prod). Must be called with the
/// diagonal-frame (lambda, t); use is_cp for arbitrary channels. For the
/// axis-aligned special case t = (0,0,t3) the square root collapses to
/// 2|l3 - l1 l2| exactly. The Choi spectrum field is filled by an eigensolve
/// of the diagonal channel; the verdict never reads it.
inline CPReport gfa_general(const Vec3& lambda, const Vec3& t, double tol = 1e-10) {
    CPReport rep;
    detail::gfa_scalars(lambda, t, rep);
    const double t2 = t.squaredNorm();
    rep.unital = t.norm() <= 1e-12;
    const double min_q = rep.q.minCoeff();
    rep.margin = std::min(min_q, rep.bound - t2);
    rep.verdict = verdict_band(rep.margin, tol);

    const double upper = 2.0 * rep.r - rep.bound;  // r + sqrt(disc)
    rep.upper_root_contact =
        rep.verdict == CpVerdict::NotCP && min_q >= -tol && std::abs(t2 - upper) <= tol;

    rep.choi_eigs = choi_eigenvalues({Mat3(lambda.asDiagonal()), t});
    rep.eig_margin = rep.choi_eigs[0];
    return rep;
}

/// Full report for an arbitrary channel: canonicalizes, runs the closed-form
/// route, then overwrites the spectrum with an eigensolve of the ORIGINAL
/// channel so the two routes stay independent. Throws
/// internal_consistency_error if the verdicts disagree with both margins
/// outside a 10*tol band.
inline CPReport cp_report(const AffineChannel& phi, double tol = 1e-10) {
    const CanonicalChannel c = to_canonical(phi);
    CPReport rep;
    if (is_unital(phi)) {
        rep = fac_unital(c.lambda, tol);
    } else {
        rep = gfa_general(c.lambda, c.t, tol);
    }
    rep.choi_eigs = choi_eigenvalues(phi);
    rep.eig_margin = rep.choi_eigs[0];

    const CpVerdict closed = rep.verdict;
    const CpVerdict oracle = verdict_band(rep.eig_margin, tol);
    if (closed != oracle) {
        if (std::abs(rep.margin) <= 10.0 * tol || std::abs(rep.eig_margin) <= 10.0 * tol) {
            rep.verdict = CpVerdict::Boundary;
        } else {
            throw internal_consistency_error(
                "cp_report: closed-form and spectral CP verdicts disagree (margins " +
                std::to_string(rep.margin) + ", " + std::to_string(rep.eig_margin) + ")");
        }
    }
    return rep;
}

inline CpVerdict is_cp(const AffineChannel& phi, double tol = 1e-10) {
    return cp_report(phi, tol).verdict;
}

}  // namespace qchan
