// Geometric classification: Kraus rank, indivisibility, pure-output class,
// the no-pancake certificate, and the unitality check tied to antipodal pure
// outputs.
#pragma once

#include "qchan/canonical.hpp"
#include "qchan/choi.hpp"
#include "qchan/cp.hpp"

#include <vector>

namespace qchan {

/// Number of Choi eigenvalues above rank_tol. For unital channels this is
/// cross-checked against the count of positive q_i (the closed-form unital
/// spectrum); a mismatch outside the threshold's rounding shadow is a bug.
inline int kraus_rank(const AffineChannel& phi, double rank_tol = 1e-9) {
    const Vec4 eigs = choi_eigenvalues(phi);
    if (eigs[0] < -1e-10) throw not_cp_error(eigs[0]);
    int rank = 0;
    for (int i = 0; i < 4; ++i) rank += eigs[i] > rank_tol;
    if (is_unital(phi)) {
        const Vec4 q = q_weights(to_canonical(phi).lambda);
        int rank_q = 0;
        bool shadow = false;  // some 2q_i too close to the threshold to compare
        for (int i = 0; i < 4; ++i) {
            rank_q += 2.0 * q[i] > rank_tol;
            shadow = shadow || std::abs(2.0 * q[i] - rank_tol) < 1e-13;
        }
        if (rank != rank_q && !shadow)
            throw internal_consistency_error("kraus_rank: spectral count " + std::to_string(rank) +
                                             " != q-weight count " + std::to_string(rank_q));
    }
    return rank;
}

/// A qubit channel is indivisible exactly when it is non-unitary of Kraus
/// rank 3.
inline bool is_indivisible(const AffineChannel& phi, double rank_tol = 1e-9) {
    const bool unitary =
        (phi.M.transpose() * phi.M - Mat3::Identity()).norm() <= 1e-9 && phi.t.norm() <= 1e-9;
    return !unitary && kraus_rank(phi, rank_tol) == 3;
}

struct PureOutputClass {
    enum class Kind { Zero, One, Two, All };
    Kind kind = Kind::Zero;
    std::vector<Vec3> points;  ///< contact outputs in the original frame (0, 1 or 2)
    double max_output_norm = 0.0;
};

inline const char* to_string(PureOutputClass::Kind k) {
    switch (k) {
        case PureOutputClass::Kind::Zero: return "Zero";
        case PureOutputClass::Kind::One: return "One";
        case PureOutputClass::Kind::Two: return "Two";
        default: return "All";
    }
}

namespace detail {

/// Maximization of f(x) = |diag(a) x + t|^2 over the unit sphere, a_i >= 0.
/// Stationary points satisfy x_i = a_i t_i / (mu - a_i^2) with the global
/// maximum at the largest admissible multiplier mu >= max a_i^2.
struct SphereMax {
    double value = 0.0;            ///< f at the maximizers
    std::vector<Vec3> maximizers;  ///< 1 or 2 representatives
    int free_dim = 0;              ///< dim of the undetermined top component
    double free_mass = 0.0;        ///< norm of the undetermined component
};

inline double secular_g(const std::array<double, 3>& a2, const std::array<double, 3>& b,
                        double mu) {
    double g = 0.0;
    for (int i = 0; i < 3; ++i) {
        if (b[i] == 0.0) continue;
        const double d = mu - a2[i];
        g += (b[i] / d) * (b[i] / d);
    }
    return g;
}

inline SphereMax maximize_on_sphere(const Vec3& a, const Vec3& t) {
    const std::array<double, 3> a2{a[0] * a[0], a[1] * a[1], a[2] * a[2]};
    const std::array<double, 3> b{a[0] * t[0], a[1] * t[1], a[2] * t[2]};
    const double s_max = std::max({a2[0], a2[1], a2[2]});

    // Top eigenvalue group and the hard-case test: the multiplier can sit at
    // s_max only if the top axes carry no forcing term.
    constexpr double kDegTol = 1e-12;
    constexpr double kHardTol = 1e-12;
    std::vector<int> top;
    bool hard = true;
    for (int i = 0; i < 3; ++i)
        if (a2[i] >= s_max - kDegTol) {
            top.push_back(i);
            hard = hard && std::abs(b[i]) <= kHardTol;
        }

    const auto f = [&](const Vec3& x) { return (a.asDiagonal() * x + t).squaredNorm(); };
    SphereMax out;

    double glim = 0.0;
    if (hard) {
        for (int i = 0; i < 3; ++i) {
            if (std::abs(b[i]) <= kHardTol) continue;
            bool in_top = false;
            for (int j : top) in_top = in_top || j == i;
            if (in_top) continue;
            const double d = s_max - a2[i];
            glim += (b[i] / d) * (b[i] / d);
        }
    }

    if (!hard || glim > 1.0) {
        // Unique interior root of g(mu) = 1 on (s_max, inf); g decreases
        // strictly there, from +inf (easy case) or from glim > 1.
        double lo = s_max + std::max(1.0, s_max) * 1e-15;
        double hi = s_max + std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]) + 1.0;
        while (secular_g(a2, b, hi) > 1.0) hi = s_max + 2.0 * (hi - s_max);
        for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, lo); ++it) {
            const double mid = 0.5 * (lo + hi);
            (secular_g(a2, b, mid) > 1.0 ? lo : hi) = mid;
        }
        const double mu = 0.5 * (lo + hi);
        Vec3 x;
        for (int i = 0; i < 3; ++i) x[i] = b[i] == 0.0 ? 0.0 : b[i] / (mu - a2[i]);
        x.normalize();
        out.maximizers = {x};
        out.value = f(x);
        return out;
    }

    // Hard case: mu = s_max, the top component is free with mass
    // rho = sqrt(1 - glim); below merge tolerance the maximizer is unique.
    Vec3 xb = Vec3::Zero();
    for (int i = 0; i < 3; ++i) {
        bool in_top = false;
        for (int j : top) in_top = in_top || j == i;
        if (!in_top && std::abs(b[i]) > kHardTol) xb[i] = b[i] / (s_max - a2[i]);
    }
    const double rho2 = 1.0 - xb.squaredNorm();
    const double rho = rho2 > 0.0 ? std::sqrt(rho2) : 0.0;
    constexpr double kMergeTol = 1e-6;
    if (rho <= kMergeTol) {
        Vec3 x = xb.normalized();
        out.maximizers = {x};
        out.value = f(x);
        return out;
    }
    out.free_dim = static_cast<int>(top.size());
    out.free_mass = rho;
    Vec3 xp = xb + rho * Vec3::Unit(top[0]);
    Vec3 xm = xb - rho * Vec3::Unit(top[0]);
    out.maximizers = {xp, xm};
    out.value = std::max(f(xp), f(xm));
    return out;
}

}  // namespace detail

/// Pure-output classification: which outputs reach the sphere surface.
/// Evaluated in the canonical frame through the secular maximizer; contact
/// points (max norm within tol of 1) are rotated back to the original frame.
/// All is returned exactly for orthogonal M with t = 0. A circle of contact
/// on a CP input contradicts the two-point bound and raises an internal
/// error.
inline PureOutputClass pure_outputs(const AffineChannel& phi, double tol = 1e-9) {
    using Kind = PureOutputClass::Kind;
    {
        const Vec4 eigs = choi_eigenvalues(phi);
        if (eigs[0] < -1e-10) throw not_cp_error(eigs[0]);
    }
    const CanonicalChannel c = to_canonical(phi);
    const Vec3 a = c.lambda.cwiseAbs();
    const Vec3& t = c.t;

    if ((a - Vec3::Ones()).cwiseAbs().maxCoeff() <= tol && t.norm() <= tol)
        return {Kind::All, {}, 1.0};

    if (a.maxCoeff() <= 1e-14) {  // constant channel: the image is {t}
        const double n = phi.t.norm();
        if (n >= 1.0 - tol) return {Kind::One, {phi.t}, n};
        return {Kind::Zero, {}, n};
    }

    const detail::SphereMax sm = detail::maximize_on_sphere(a, t);
    PureOutputClass out;
    out.max_output_norm = std::sqrt(sm.value);
    for (const Vec3& x : sm.maximizers) {
        const Vec3 p = Vec3(a.asDiagonal() * x) + t;
        if (p.norm() >= 1.0 - tol) out.points.push_back(c.R1 * p);
    }
    if (out.points.empty()) {
        out.kind = Kind::Zero;
        return out;
    }
    if (sm.free_dim >= 2)
        throw internal_consistency_error(
            "pure_outputs: contact with a free top space of dimension >= 2 (circle of pure "
            "outputs) on a CP input");
    out.kind = out.points.size() == 1 ? Kind::One : Kind::Two;
    return out;
}

/// Brute-force validator for pure_outputs: dense low-discrepancy grid,
/// projected gradient refinement of near-maximal candidates, then structural
/// clustering (two candidates merge when the geodesic midpoint also touches).
inline PureOutputClass pure_outputs_oracle(const AffineChannel& phi, int n_grid = 20000,
                                           double tol = 1e-9) {
    using Kind = PureOutputClass::Kind;
    const CanonicalChannel c = to_canonical(phi);
    const Vec3 a = c.lambda.cwiseAbs();
    const Vec3& t = c.t;
    const auto f = [&](const Vec3& x) { return (a.asDiagonal() * x + t).squaredNorm(); };
    const auto output = [&](const Vec3& x) { return Vec3(a.asDiagonal() * x + t); };
    const double contact2 = (1.0 - tol) * (1.0 - tol);

    // Fibonacci sphere sweep.
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    std::vector<Vec3> grid;
    grid.reserve(static_cast<size_t>(n_grid));
    double fmax = -1.0, fmin = 2.0;
    for (int k = 0; k < n_grid; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / n_grid;
        const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
        const Vec3 x(rxy * std::cos(golden * k), rxy * std::sin(golden * k), z);
        grid.push_back(x);
        const double v = f(x);
        fmax = std::max(fmax, v);
        fmin = std::min(fmin, v);
    }

    if (fmin >= contact2) {
        // Everything touches: either a constant map onto a pure state or an
        // orthogonal M (whole-sphere image).
        const double spread = (output(grid[0]) - output(grid[n_grid / 2])).norm();
        if (spread < 1e-6) {
            PureOutputClass out;
            out.kind = Kind::One;
            out.points = {phi.t};
            out.max_output_norm = phi.t.norm();
            return out;
        }
        return {Kind::All, {}, 1.0};
    }

    // Candidates: the best grid points, refined by projected gradient ascent
    // with step halving. f is quadratic, so the ascent is monotone once the
    // step is below the curvature scale. The hopeless cutoff must respect the
    // grid resolution: on a needle-shaped image the best seed of the second
    // contact basin sits up to ~lip*h^2 below the best grid value, and seeds
    // keep a minimum pairwise spacing so that basin is always represented.
    std::vector<int> order(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return f(grid[i]) > f(grid[j]); });
    const int n_cand = 32;
    const double lip = 2.0 * (a.maxCoeff() * a.maxCoeff() + a.maxCoeff() * t.norm()) + 1e-12;
    const double h = 2.0 * std::sqrt(kPi / n_grid);
    const double kappa = std::max(1e-4, lip * h * h);

    std::vector<Vec3> seeds;
    for (int ci = 0; ci < static_cast<int>(order.size()); ++ci) {
        if (static_cast<int>(seeds.size()) >= n_cand) break;
        const Vec3& x = grid[order[ci]];
        if (f(x) < fmax - kappa) break;
        bool near = false;
        for (const Vec3& s : seeds) near = near || (s - x).norm() < 3.0 * h;
        if (!near) seeds.push_back(x);
    }

    const auto ascend = [&](Vec3 x) {
        double fx = f(x);
        double step = 1.0 / lip;
        for (int it = 0; it < 4000; ++it) {
            const Vec3 grad = 2.0 * (a.asDiagonal() * (a.asDiagonal() * x + t));
            const Vec3 tang = grad - grad.dot(x) * x;
            if (tang.norm() < 1e-13 || fx >= 1.0 - 0.1 * tol) break;
            Vec3 y = (x + step * tang).normalized();
            const double fy = f(y);
            if (fy >= fx) {
                x = y;
                fx = fy;
            } else {
                step *= 0.5;
                if (step < 1e-12) break;
            }
        }
        return std::make_pair(x, fx);
    };

    std::vector<Vec3> refined;
    double best = fmax;
    for (const Vec3& s : seeds) {
        const auto [x, fx] = ascend(s);
        best = std::max(best, fx);
        refined.push_back(x);
    }

    // Probe a small ring around each contact: two distinct maximizers closer
    // than the seed spacing share one seed, but a probe point then lands in
    // the partner basin and the ascent recovers it.
    const size_t n_direct = refined.size();
    for (size_t i = 0; i < n_direct; ++i) {
        if (f(refined[i]) < contact2) continue;
        const Vec3 x0 = refined[i];
        Vec3 e1 = x0.cross(Vec3::UnitZ());
        if (e1.norm() < 1e-6) e1 = x0.cross(Vec3::UnitX());
        e1.normalize();
        const Vec3 e2 = x0.cross(e1).normalized();
        for (int j = 0; j < 6; ++j) {
            const double ang = kPi / 3.0 * j;
            const Vec3 probe =
                (x0 + 2.0 * h * (std::cos(ang) * e1 + std::sin(ang) * e2)).normalized();
            const auto [x, fx] = ascend(probe);
            best = std::max(best, fx);
            refined.push_back(x);
        }
    }

    // Contact candidates, deduplicated, then merged when the geodesic
    // midpoint still touches (a flat contact plateau is one pure output).
    std::vector<Vec3> reps;
    for (const Vec3& x : refined) {
        if (f(x) < contact2) continue;
        bool dup = false;
        for (const Vec3& r : reps) dup = dup || (r - x).norm() < 1e-4;
        if (!dup) reps.push_back(x);
    }
    PureOutputClass out;
    out.max_output_norm = std::sqrt(best);
    if (reps.empty()) {
        out.kind = Kind::Zero;
        return out;
    }
    std::vector<std::vector<Vec3>> clusters{{reps[0]}};
    for (size_t i = 1; i < reps.size(); ++i) {
        bool placed = false;
        for (auto& cl : clusters) {
            Vec3 mid = cl[0] + reps[i];
            const bool same = mid.norm() > 1e-6 && f(mid.normalized()) >= 1.0 - 3.0 * tol;
            if (same) {
                cl.push_back(reps[i]);
                placed = true;
                break;
            }
        }
        if (!placed) clusters.push_back({reps[i]});
    }
    if (clusters.size() > 2)
        throw internal_consistency_error(
            "pure_outputs_oracle: more than two contact clusters on a CP input");
    for (const auto& cl : clusters) out.points.push_back(c.R1 * output(cl[0]));
    out.kind = out.points.size() == 1 ? Kind::One : Kind::Two;
    return out;
}

/// No-pancake certificate: for an axially symmetric output ellipsoid with
/// half-axes (a, a, c), c < a^2, the shift t3 = sqrt((1-a^2)(a^2-c^2))/a puts
/// the touching circle on the sphere; both sign branches of the CP margin
/// (c +- 1)^2 - 4a^2 - t3^2 = (c^2 +- 2ca^2 - 3a^4)/a^2
/// must then be <= 0: no CP channel touches the sphere in a circle.
struct PancakeMargin {
    double t3 = 0.0;
    std::pair<double, double> margins{0.0, 0.0};
};

inline PancakeMargin pancake_margin(double a, double c) {
    if (!(a > 0.0) || a > 1.0 || !(c > 0.0) || !(c < a * a))
        throw invalid_parameter("pancake_margin: need 0 < a <= 1 and 0 < c < a^2");
    PancakeMargin out;
    out.t3 = std::sqrt((1.0 - a * a) * (a * a - c * c)) / a;
    const double a2 = a * a;
    out.margins = {(c * c + 2.0 * c * a2 - 3.0 * a2 * a2) / a2,
                   (c * c - 2.0 * c * a2 - 3.0 * a2 * a2) / a2};
    return out;
}

/// For a Two classification: reports whether the pair is antipodal (angle
/// within tol of pi, tested through the chord |p1 + p2|) and asserts the
/// equivalence antipodal <=> unital.
inline bool po_unitality_check(const PureOutputClass& po, const AffineChannel& phi,
                               double tol = 1e-8) {
    if (po.kind != PureOutputClass::Kind::Two || po.points.size() != 2)
        throw invalid_parameter("po_unitality_check: classification is not Two");
    const Vec3 p1 = po.points[0].normalized();
    const Vec3 p2 = po.points[1].normalized();
    const bool antipodal = (p1 + p2).norm() <= tol;
    const bool unital = phi.t.norm() <= tol;
    if (antipodal != unital)
        throw internal_consistency_error(
            "po_unitality_check: antipodal pure outputs must coincide with unitality");
    return antipodal;
}

}  // namespace qchan
