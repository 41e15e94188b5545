// Choi matrix of an affine channel (trace-2 convention), its Bell-basis
// rotation, and the Kraus decomposition obtained from the Choi eigenvectors.
#pragma once

#include "qchan/channel.hpp"

#include <vector>

namespace qchan {

/// Choi eigenvalue weights of a diagonal channel: q_i are quarter-sums of
/// (1, +-lambda) patterns and always sum to 1. For unital channels the Choi
/// spectrum is exactly (2q_0, 2q_1, 2q_2, 2q_3).
inline Vec4 q_weights(const Vec3& lambda) {
    const double l1 = lambda[0], l2 = lambda[1], l3 = lambda[2];
    return {(1.0 + l1 + l2 + l3) / 4.0, (1.0 + l1 - l2 - l3) / 4.0,
            (1.0 - l1 + l2 - l3) / 4.0, (1.0 - l1 - l2 + l3) / 4.0};
}

namespace detail {

inline CMat4 kron2(const CMat2& a, const CMat2& b) {
    CMat4 k;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return k;
}

/// Pauli with the first tensor slot conjugated: sigma_2 flips sign.
inline CMat2 pauli_conj(int i) { return i == 2 ? CMat2(-pauli(2)) : pauli(i); }

}  // namespace detail

/// Choi matrix, trace 2, Hermitian. The first tensor factor carries the
/// conjugated Pauli basis; with diagonal M = diag(lambda) the entries are
/// C00 = (1+l3+t3)/2, C03 = (l1+l2)/2, C12 = (l1-l2)/2, C02 = (t1+i t2)/2,
/// and Hermitian reflections. Set normalize_trace for the trace-1 variant.
inline CMat4 choi(const AffineChannel& phi, bool normalize_trace = false) {
    CMat4 c = detail::kron2(pauli(0), pauli(0));
    for (int i = 0; i < 3; ++i) {
        c += phi.t[i] * detail::kron2(detail::pauli_conj(i + 1), pauli(0));
        for (int j = 0; j < 3; ++j)
            c += phi.M(i, j) * detail::kron2(detail::pauli_conj(i + 1), pauli(j + 1));
    }
    return normalize_trace ? CMat4(c / 4.0) : CMat4(c / 2.0);
}

/// Basis change diagonalizing the unital part: rows are the Bell-like
/// combinations (|00>+|11>, |01>+|10>, i(|10>-|01>), |00>-|11>)/sqrt(2).
inline CMat4 bell_basis_rotation() {
    using namespace std::complex_literals;
    CMat4 r;
    const double s = 1.0 / std::sqrt(2.0);
    r << s, 0, 0, s,
         0, s, s, 0,
         0, -1i * s, 1i * s, 0,
         s, 0, 0, -s;
    return r;
}

/// Closed form of R choi(Phi) R^dagger for diagonal M: diagonal (2q_i),
/// translation entries t_i/2 along the first row and +-i t_k/2 in the lower
/// block. Requires M diagonal.
inline CMat4 choi_rotated(const AffineChannel& phi) {
    using namespace std::complex_literals;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j && std::abs(phi.M(i, j)) > 1e-14)
                throw invalid_parameter("choi_rotated: M must be diagonal (canonical frame)");
    const Vec4 q = q_weights(phi.M.diagonal());
    const Vec3& t = phi.t;
    CMat4 c = CMat4::Zero();
    for (int i = 0; i < 4; ++i) c(i, i) = 2.0 * q[i];
    c(0, 1) = t[0] / 2.0;
    c(0, 2) = t[1] / 2.0;
    c(0, 3) = t[2] / 2.0;
    c(1, 2) = 1i * t[2] / 2.0;
    c(1, 3) = -1i * t[1] / 2.0;
    c(2, 3) = 1i * t[0] / 2.0;
    c(1, 0) = std::conj(c(0, 1));
    c(2, 0) = std::conj(c(0, 2));
    c(3, 0) = std::conj(c(0, 3));
    c(2, 1) = std::conj(c(1, 2));
    c(3, 1) = std::conj(c(1, 3));
    c(3, 2) = std::conj(c(2, 3));
    return c;
}

/// Ascending real eigenvalues of the Choi matrix (trace-2 convention).
inline Vec4 choi_eigenvalues(const AffineChannel& phi) {
    Eigen::SelfAdjointEigenSolver<CMat4> es(choi(phi), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Raised by operations requiring a CP input; carries the offending
/// eigenvalue.
struct not_cp_error : invalid_parameter {
    explicit not_cp_error(double eig)
        : invalid_parameter("channel is not CP: min Choi eigenvalue = " + std::to_string(eig)),
          min_eigenvalue(eig) {}
    double min_eigenvalue;
};

/// Kraus operators from the Choi eigendecomposition: for eigenpair (c, psi)
/// with c above rank_tol, A = sqrt(c) * reshape(conj(psi)) row-major. The
/// conjugation matches this file's Choi convention; sum A^dag A = I.
/// Operators are ordered by decreasing eigenvalue.
inline std::vector<CMat2> kraus_decomposition(const AffineChannel& phi, double rank_tol = 1e-9,
                                              double cp_tol = 1e-10) {
    Eigen::SelfAdjointEigenSolver<CMat4> es(choi(phi));
    const Vec4 eigs = es.eigenvalues();  // ascending
    if (eigs[0] < -cp_tol) throw not_cp_error(eigs[0]);
    std::vector<CMat2> kraus;
    for (int k = 3; k >= 0; --k) {
        if (eigs[k] <= rank_tol) continue;
        const CVec4 psi = es.eigenvectors().col(k);
        const double w = std::sqrt(eigs[k]);
        CMat2 a;
        a << std::conj(psi[0]), std::conj(psi[1]), std::conj(psi[2]), std::conj(psi[3]);
        kraus.push_back(w * a);
    }
    return kraus;
}

}  // namespace qchan
