// Parametric channel families used as decomposition factors and sampling
// anchors. Each GeneratorSpec value maps to one concrete AffineChannel.
#pragma once

#include "qchan/channel.hpp"

#include <variant>

namespace qchan {

/// Rotation of the Bloch ball about `axis` by angle 2*half_angle (the
/// half-angle is the SU(2) phase; only the SO(3) action is materialized).
struct Unitary {
    Vec3 axis = Vec3::UnitZ();
    double half_angle = 0.0;
};

/// Axis relabeling j -> sigma[j]. Odd permutations get a sign flip on the
/// fixed axis so the matrix stays a proper rotation.
struct Permutation {
    std::array<int, 3> sigma{0, 1, 2};
};

/// Pi rotation about the remaining axis: flips the signs of the two listed
/// axes.
struct SignFlip {
    std::array<int, 2> axes{0, 1};
};

/// diag(1-2t, 1-2t, 1); t in [0,1]. t=0 identity, t=1/2 full dephasing.
struct PhaseFlip {
    double t = 0.0;
};

/// Constant map: every input goes to rho0 (M = 0, translation rho0).
struct Constant {
    Vec3 rho0 = Vec3::UnitZ();
};

/// Two-parameter extremal family: M = diag(cos u, cos v, cos u cos v),
/// t = (0, 0, sin u sin v). Domain (u,v) in (0,pi/2]^2 with u <= v, plus the
/// isolated identity (0,0).
struct Extremal {
    double u = 0.0;
    double v = 0.0;
};

/// Extremal family re-parametrized by contact angles theta < omega: the pure
/// inputs (+-cos theta, 0, sin theta) map to the pure outputs
/// (+-cos omega, 0, sin omega). Converted to (u, v) internally.
struct ExtremalAngles {
    double theta = 0.0;
    double omega = 0.0;
};

/// Unital channel on a tetrahedron face of the Fujiwara-Algoet region:
/// half 1 interpolates diag(1,z,z) -> diag(z,1,z), half 2 interpolates
/// diag(z,1,z) -> diag(-1,-z,z); s in [0,1] is the interpolation parameter.
struct FaceChannel {
    double s = 0.0;
    double z = 0.0;
    int half = 1;
};

using GeneratorSpec = std::variant<Unitary, Permutation, SignFlip, PhaseFlip, Constant,
                                   Extremal, ExtremalAngles, FaceChannel>;

namespace detail {

inline void check_axis_index(int i, const char* what) {
    if (i < 0 || i > 2) throw invalid_parameter(std::string(what) + ": axis index out of range");
}

/// (theta, omega) -> (u, v): cos u = cos(omega)/cos(theta),
/// cos v = tan(theta)/tan(omega). theta = 0 degenerates to v = pi/2.
inline void extremal_angles_to_uv(double theta, double omega, double& u, double& v) {
    if (!(omega > 0.0) || !(omega < kPi / 2) || theta < 0.0 || theta >= omega)
        throw invalid_parameter("ExtremalAngles requires 0 <= theta < omega < pi/2");
    if (theta == 0.0) {
        u = omega;
        v = kPi / 2;
        return;
    }
    u = std::acos(clamp_unit(std::cos(omega) / std::cos(theta)));
    v = std::acos(clamp_unit(std::tan(theta) / std::tan(omega)));
}

}  // namespace detail

inline AffineChannel make_generator(const GeneratorSpec& factor) {
    return std::visit(
        [](const auto& g) -> AffineChannel {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Unitary>) {
                if (g.axis.norm() < 1e-9) throw invalid_parameter("Unitary: zero axis");
                return {rotation_about(g.axis, 2.0 * g.half_angle), Vec3::Zero()};
            } else if constexpr (std::is_same_v<T, Permutation>) {
                std::array<bool, 3> seen{false, false, false};
                for (int j : g.sigma) {
                    detail::check_axis_index(j, "Permutation");
                    seen[static_cast<size_t>(j)] = true;
                }
                if (!(seen[0] && seen[1] && seen[2]))
                    throw invalid_parameter("Permutation: sigma is not a permutation of {0,1,2}");
                Mat3 m = Mat3::Zero();
                for (int j = 0; j < 3; ++j) m(g.sigma[static_cast<size_t>(j)], j) = 1.0;
                if (m.determinant() < 0.0) {
                    // Odd permutation = transposition; negate its fixed axis.
                    for (int j = 0; j < 3; ++j)
                        if (g.sigma[static_cast<size_t>(j)] == j) m(j, j) = -1.0;
                }
                return {m, Vec3::Zero()};
            } else if constexpr (std::is_same_v<T, SignFlip>) {
                detail::check_axis_index(g.axes[0], "SignFlip");
                detail::check_axis_index(g.axes[1], "SignFlip");
                if (g.axes[0] == g.axes[1])
                    throw invalid_parameter("SignFlip: the two axes must differ");
                Vec3 d = Vec3::Ones();
                d[g.axes[0]] = -1.0;
                d[g.axes[1]] = -1.0;
                return {d.asDiagonal(), Vec3::Zero()};
            } else if constexpr (std::is_same_v<T, PhaseFlip>) {
                if (g.t < -1e-12 || g.t > 1.0 + 1e-12)
                    throw invalid_parameter("PhaseFlip: t must lie in [0,1]");
                const double t = clamp01(g.t);
                return {Vec3(1.0 - 2.0 * t, 1.0 - 2.0 * t, 1.0).asDiagonal(), Vec3::Zero()};
            } else if constexpr (std::is_same_v<T, Constant>) {
                if (g.rho0.norm() > 1.0 + 1e-10)
                    throw invalid_parameter("Constant: rho0 outside the Bloch ball");
                return {Mat3::Zero(), g.rho0};
            } else if constexpr (std::is_same_v<T, Extremal>) {
                const bool origin = g.u == 0.0 && g.v == 0.0;
                if (!origin && !(g.u > 0.0 && g.v > 0.0 && g.u <= kPi / 2 && g.v <= kPi / 2 &&
                                 g.u <= g.v))
                    throw invalid_parameter(
                        "Extremal: (u,v) must lie in (0,pi/2]^2 with u <= v, or be (0,0)");
                const double cu = std::cos(g.u), cv = std::cos(g.v);
                AffineChannel phi;
                phi.M = Vec3(cu, cv, cu * cv).asDiagonal();
                phi.t = Vec3(0.0, 0.0, std::sin(g.u) * std::sin(g.v));
                return phi;
            } else if constexpr (std::is_same_v<T, ExtremalAngles>) {
                double u = 0.0, v = 0.0;
                detail::extremal_angles_to_uv(g.theta, g.omega, u, v);
                return make_generator(Extremal{u, v});
            } else {
                static_assert(std::is_same_v<T, FaceChannel>);
                if (g.s < -1e-12 || g.s > 1.0 + 1e-12)
                    throw invalid_parameter("FaceChannel: s must lie in [0,1]");
                if (g.z < -1.0 - 1e-12 || g.z > 1.0 + 1e-12)
                    throw invalid_parameter("FaceChannel: z must lie in [-1,1]");
                if (g.half != 1 && g.half != 2)
                    throw invalid_parameter("FaceChannel: half must be 1 or 2");
                const double s = clamp01(g.s), z = clamp_unit(g.z);
                Vec3 d;
                if (g.half == 1)
                    d = Vec3(1.0 + s * (z - 1.0), z + s * (1.0 - z), z);
                else
                    d = Vec3(z - s * (1.0 + z), 1.0 - s * (1.0 + z), z);
                return {d.asDiagonal(), Vec3::Zero()};
            }
        },
        factor);
}

}  // namespace qchan
