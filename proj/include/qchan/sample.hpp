// Random channel generation for property tests and the CLI. All draws are CP
// by construction; the RNG is always caller-supplied.
#pragma once

#include "qchan/cp.hpp"
#include "qchan/generators.hpp"
#include "qchan/rng.hpp"

namespace qchan {

enum class SampleKind { Unital, General, Extremal };

inline SampleKind sample_kind_from_string(const std::string& s) {
    if (s == "unital") return SampleKind::Unital;
    if (s == "general") return SampleKind::General;
    if (s == "extremal") return SampleKind::Extremal;
    throw invalid_parameter("unknown sample kind: " + s);
}

namespace detail {

/// Barycentric map from Choi weights to the diagonal: the four Kraus-rank-1
/// vertices of the unital CP tetrahedron.
inline Vec3 lambda_from_q(const std::array<double, 4>& q) {
    static const Vec3 kVertex[4] = {Vec3(1.0, 1.0, 1.0), Vec3(1.0, -1.0, -1.0),
                                    Vec3(-1.0, 1.0, -1.0), Vec3(-1.0, -1.0, 1.0)};
    return q[0] * kVertex[0] + q[1] * kVertex[1] + q[2] * kVertex[2] + q[3] * kVertex[3];
}

}  // namespace detail

/// Unital: q uniform on the 3-simplex mapped to lambda, random rotations on
/// both sides. General: a unital draw plus a translation along a uniform
/// direction with |t|^2 uniform in [0, r - sqrt(r^2 - q_prod)]. Extremal:
/// (u, v) uniform on 0 < u <= v <= pi/2, emitted in diagonal form.
inline AffineChannel sample_channel(Rng& rng, SampleKind kind) {
    if (kind == SampleKind::Extremal) {
        const double x = kPi / 2 * (1.0 - rng.uniform());
        const double y = kPi / 2 * (1.0 - rng.uniform());
        return make_generator(Extremal{std::min(x, y), std::max(x, y)});
    }
    const Vec3 lambda = detail::lambda_from_q(rng.simplex4());
    Vec3 t_c = Vec3::Zero();
    if (kind == SampleKind::General) {
        const Vec3 dir = rng.unit_vector();
        CPReport rep;
        detail::gfa_scalars(lambda, dir, rep);
        t_c = std::sqrt(std::max(0.0, rep.bound) * rng.uniform()) * dir;
    }
    const Mat3 ra = rng.rotation();
    const Mat3 rb = rng.rotation();
    return {ra * lambda.asDiagonal() * rb, ra * t_c};
}

}  // namespace qchan
