// Core channel type: a qubit map in affine Bloch form r -> M r + t, plus the
// density-matrix round trip rho = (I + r.sigma)/2.
#pragma once

#include "qchan/linalg.hpp"

#include <complex>

namespace qchan {

using BlochVector = Vec3;

/// Qubit channel in affine Bloch-ball form: r -> M r + t.
/// M is the 3x3 distortion block, t the translation. Complete positivity is
/// NOT enforced by the type; see cp.hpp.
struct AffineChannel {
    Mat3 M = Mat3::Identity();
    Vec3 t = Vec3::Zero();
};

inline AffineChannel identity_channel() { return {}; }

/// Functional composition: (outer . inner)(r) = outer(inner(r)).
inline AffineChannel compose(const AffineChannel& outer, const AffineChannel& inner) {
    return {outer.M * inner.M, outer.M * inner.t + outer.t};
}

inline Vec3 apply(const AffineChannel& phi, const Vec3& r) { return phi.M * r + phi.t; }

/// 4x4 affine representation acting on (1, r): first row (1, 0, 0, 0),
/// first column (1, t), lower-right block M.
inline Mat4 to_affine_matrix(const AffineChannel& phi) {
    Mat4 T = Mat4::Zero();
    T(0, 0) = 1.0;
    T.block<3, 1>(1, 0) = phi.t;
    T.block<3, 3>(1, 1) = phi.M;
    return T;
}

/// Frobenius distance between the 4x4 affine representations; the metric used
/// for recomposition checks.
inline double channel_distance(const AffineChannel& a, const AffineChannel& b) {
    return (to_affine_matrix(a) - to_affine_matrix(b)).norm();
}

inline bool is_unital(const AffineChannel& phi, double tol = 1e-12) {
    return phi.t.norm() <= tol;
}

/// Pauli basis {I, sx, sy, sz}.
inline const CMat2& pauli(int i) {
    using namespace std::complex_literals;
    static const std::array<CMat2, 4> s = [] {
        std::array<CMat2, 4> m;
        m[0] << 1, 0, 0, 1;
        m[1] << 0, 1, 1, 0;
        m[2] << 0, -1i, 1i, 0;
        m[3] << 1, 0, 0, -1;
        return m;
    }();
    return s[static_cast<size_t>(i)];
}

/// rho = (I + r.sigma)/2. Requires |r| <= 1 (+tol): points outside the ball
/// are not states.
inline CMat2 density_from_bloch(const Vec3& r, double tol = 1e-10) {
    if (r.norm() > 1.0 + tol)
        throw invalid_parameter("density_from_bloch: Bloch vector outside the unit ball");
    CMat2 rho = pauli(0);
    for (int i = 0; i < 3; ++i) rho += r[i] * pauli(i + 1);
    return rho / 2.0;
}

/// Inverse of density_from_bloch: r_i = tr(rho sigma_i). Requires rho
/// Hermitian with unit trace (+tol).
inline Vec3 bloch_from_density(const CMat2& rho, double tol = 1e-10) {
    if ((rho - rho.adjoint()).norm() > tol)
        throw invalid_parameter("bloch_from_density: matrix is not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol)
        throw invalid_parameter("bloch_from_density: trace is not 1");
    Vec3 r;
    for (int i = 0; i < 3; ++i) r[i] = (rho * pauli(i + 1)).trace().real();
    return r;
}

}  // namespace qchan
