// Constructive decomposition into epsilon-small universal sets: unital
// channels into phase-flip chains plus one face channel (bow-tie
// construction), extremal channels into short extremal factors. Every plan
// is verified by recomposition.
#pragma once

#include "qchan/cp.hpp"
#include "qchan/extremal.hpp"
#include "qchan/generators.hpp"

#include <string>
#include <vector>

namespace qchan {

/// Ordered factor list; factors[0] is applied first:
/// Phi = F_{n-1} . ... . F_1 . F_0.
struct DecompositionPlan {
    std::vector<GeneratorSpec> factors;
    double epsilon = 0.0;
    std::optional<AffineChannel> target;
    double recomposition_error = 0.0;
};

/// Left-fold of the factors; the error is the Frobenius distance between the
/// affine 4x4 matrices of the result and the plan's target (0 if no target).
inline std::pair<AffineChannel, double> recompose(const DecompositionPlan& plan) {
    AffineChannel acc = identity_channel();
    for (const GeneratorSpec& f : plan.factors) acc = compose(make_generator(f), acc);
    const double err = plan.target ? channel_distance(acc, *plan.target) : 0.0;
    return {acc, err};
}

namespace detail {

inline std::optional<GeneratorSpec> unitary_factor(const Mat3& r) {
    if ((r - Mat3::Identity()).norm() < 1e-14) return std::nullopt;
    Vec3 axis;
    double angle = 0.0;
    axis_angle_from_rotation(r, axis, angle);
    return GeneratorSpec(Unitary{axis, angle / 2.0});
}

inline void push_unitary(std::vector<GeneratorSpec>& factors, const Mat3& r) {
    if (auto f = detail::unitary_factor(r)) factors.push_back(*f);
}

/// Phase-flip chain for the edge parameter t < 1/2; empty for t = 0.
inline std::vector<GeneratorSpec> edge_chain(double t, double eps) {
    std::vector<GeneratorSpec> factors;
    if (t <= 1e-15) return factors;
    const int n = std::max(
        1, static_cast<int>(std::ceil(std::log1p(-2.0 * t) / std::log1p(-2.0 * eps) - 1e-12)));
    const double eps_n = 0.5 * (1.0 - std::pow(1.0 - 2.0 * t, 1.0 / n));
    factors.assign(static_cast<size_t>(n), PhaseFlip{eps_n});
    return factors;
}

inline void finalize(DecompositionPlan& plan) {
    plan.recomposition_error = recompose(plan).second;
}

}  // namespace detail

/// Edge decomposition: n = ceil(ln(1-2t)/ln(1-2e)) phase flips of equal
/// parameter e' = (1 - (1-2t)^(1/n))/2 <= e. t = 1/2 stays atomic; t > 1/2
/// composes the complementary chain with the pi rotation about z.
inline DecompositionPlan decompose_edge(double t_target, double eps) {
    if (!(eps > 0.0) || !(eps < 0.5)) throw invalid_parameter("decompose_edge: eps not in (0, 1/2)");
    if (t_target < -1e-12 || t_target > 1.0 + 1e-12)
        throw invalid_parameter("decompose_edge: t_target not in [0, 1]");
    const double t = clamp01(t_target);
    DecompositionPlan plan;
    plan.epsilon = eps;
    plan.target = make_generator(PhaseFlip{t});
    if (std::abs(t - 0.5) <= 1e-15) {
        plan.factors = {PhaseFlip{0.5}};
    } else if (t < 0.5) {
        plan.factors = detail::edge_chain(t, eps);
    } else {
        plan.factors = {Unitary{Vec3::UnitZ(), kPi / 2}};
        const auto chain = detail::edge_chain(1.0 - t, eps);
        plan.factors.insert(plan.factors.end(), chain.begin(), chain.end());
    }
    detail::finalize(plan);
    return plan;
}

/// Unital decomposition (bow-tie construction). In the canonical frame with
/// z = lambda_3, the half-1 relations
///   1 - 2t = (l1 + l2)/(1 + z),  1 - 2s = (l1 - l2)(1 + z)/((1 - z)(l1 + l2))
/// express the channel as FaceChannel(s, z, 1) after a phase-flip chain of
/// parameter t; half-2 (1 - 2t = (l2 - l1)/(1 - z),
/// 1 - 2s = (l1 + l2)/((1 + z)(1 - 2t))) is the fallback when (s, t) leaves
/// the unit box. With l1 >= l2 >= 0 the degenerate corners are l1 = 1 (pure
/// edge, handled as a chain about the x axis) and l2 = z = 0 (the s-free
/// line, fixed at s = 1/2 behind PhaseFlip(1/2)).
inline DecompositionPlan decompose_unital(const AffineChannel& phi, double eps = 0.05) {
    if (!(eps > 0.0) || !(eps < 0.5))
        throw invalid_parameter("decompose_unital: eps not in (0, 1/2)");
    if (!is_unital(phi)) throw invalid_parameter("decompose_unital: channel is not unital");
    const CPReport rep = cp_report(phi);
    if (rep.verdict == CpVerdict::NotCP) throw not_cp_error(rep.eig_margin);

    const CanonicalChannel c = to_canonical(phi);
    const double l1 = c.lambda[0], l2 = c.lambda[1], z = c.lambda[2];

    DecompositionPlan plan;
    plan.epsilon = eps;
    plan.target = phi;
    detail::push_unitary(plan.factors, c.R2);

    // Rotation conjugating the z-designated chain onto the x axis, needed by
    // both degenerate corners: R_y(pi/2) maps diag(a, a, 1) to diag(1, a, a).
    const Mat3 ry = rotation_about(Vec3::UnitY(), kPi / 2);

    if (l1 >= 1.0 - 1e-12 && z >= 1.0 - 1e-12) {
        // Identity core; rotations only.
    } else if (l1 >= 1.0 - 1e-12) {
        // diag(1, z, z): a phase-flip edge about the x axis.
        detail::push_unitary(plan.factors, ry.transpose());
        auto chain = decompose_edge((1.0 - z) / 2.0, eps).factors;
        plan.factors.insert(plan.factors.end(), chain.begin(), chain.end());
        detail::push_unitary(plan.factors, ry);
    } else if (l2 == 0.0) {
        // diag(l1, 0, 0): s is unconstrained on this line; any face channel
        // over PhaseFlip(1/2) recomposes it. Conjugate z -> x as above.
        detail::push_unitary(plan.factors, ry.transpose());
        plan.factors.push_back(PhaseFlip{0.5});
        plan.factors.push_back(FaceChannel{0.5, l1, 1});
        detail::push_unitary(plan.factors, ry);
    } else {
        double t = 0.5 * (1.0 - (l1 + l2) / (1.0 + z));
        double s = 0.5 * (1.0 - (l1 - l2) * (1.0 + z) / ((1.0 - z) * (l1 + l2)));
        int half = 1;
        if (!(t >= 0.0 && t <= 0.5 && s >= 0.0 && s <= 1.0)) {
            half = 2;
            t = 0.5 * (1.0 - (l2 - l1) / (1.0 - z));
            s = 0.5 * (1.0 - (l1 + l2) / ((1.0 + z) * (1.0 - 2.0 * t)));
            if (!(t >= 0.0 && t <= 0.5 && s >= 0.0 && s <= 1.0))
                throw internal_consistency_error(
                    "decompose_unital: CP unital channel outside both bow-tie halves");
        }
        auto chain = detail::edge_chain(t, eps);
        plan.factors.insert(plan.factors.end(), chain.begin(), chain.end());
        plan.factors.push_back(FaceChannel{s, z, half});
    }

    detail::push_unitary(plan.factors, c.R1);
    detail::finalize(plan);
    return plan;
}

/// Extremal decomposition into unitaries, short one-pure-output contractions
/// and short two-pure-output arcs, dispatched on the contact taxonomy. The
/// sign-normalization pi rotations join the plan as factors.
inline DecompositionPlan decompose_extremal(const AffineChannel& phi, double eps = 0.05) {
    if (!(eps > 0.0) || !(eps < 1.0))
        throw invalid_parameter("decompose_extremal: eps not in (0, 1)");
    const detail::ExtremalFrame f = detail::extremal_frame(phi, 1e-9);
    if (!f.ok) throw invalid_parameter("decompose_extremal: channel is not extremal");
    const ExtremalClass cls = classify_extremal_uv(f.u, f.v);

    DecompositionPlan plan;
    plan.epsilon = eps;
    plan.target = phi;
    detail::push_unitary(plan.factors, f.R2);
    if (std::holds_alternative<SignFlip>(f.pre)) plan.factors.push_back(f.pre);

    const auto push_2po_arc = [&](double theta, double omega) {
        // Uniform grid with gap < eps; factors applied lowest angle first.
        const int n = static_cast<int>(std::floor((omega - theta) / eps + 1e-12)) + 1;
        for (int k = 0; k < n; ++k) {
            const double a = theta + (omega - theta) * k / n;
            const double b = k + 1 == n ? omega : theta + (omega - theta) * (k + 1) / n;
            plan.factors.push_back(ExtremalAngles{a, b});
        }
    };

    switch (cls.kind) {
        case ExtremalClass::Kind::Unitary:
            break;  // rotations only
        case ExtremalClass::Kind::OnePODeg:
            plan.factors.push_back(Constant{Vec3::UnitZ()});
            break;
        case ExtremalClass::Kind::OnePONonDeg: {
            const int n = std::max(
                1, static_cast<int>(std::ceil(std::log(cls.lambda) / std::log1p(-eps) - 1e-12)));
            const double p = std::pow(cls.lambda, 1.0 / n);
            const double u = std::acos(clamp_unit(p));
            plan.factors.insert(plan.factors.end(), static_cast<size_t>(n), Extremal{u, u});
            break;
        }
        case ExtremalClass::Kind::TwoPODeg: {
            const double x = std::min(eps / 2.0, cls.omega / 2.0);
            plan.factors.push_back(ExtremalAngles{0.0, x});
            push_2po_arc(x, cls.omega);
            break;
        }
        case ExtremalClass::Kind::TwoPONonDeg:
            push_2po_arc(cls.theta, cls.omega);
            break;
    }

    if (std::holds_alternative<SignFlip>(f.post)) plan.factors.push_back(f.post);
    detail::push_unitary(plan.factors, f.R1);
    detail::finalize(plan);
    return plan;
}

}  // namespace qchan
