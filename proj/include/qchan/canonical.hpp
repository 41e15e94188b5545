// Canonical (signed-SVD) form of a channel: M = R1 diag(lambda) R2 with
// proper rotations on both sides, |lambda| non-increasing, lambda_1,2 >= 0
// and the determinant sign carried by lambda_3 alone.
#pragma once

#include "qchan/channel.hpp"
#include "qchan/generators.hpp"

#include <optional>

namespace qchan {

struct CanonicalChannel {
    Vec3 lambda = Vec3::Ones();  ///< signed diagonal, |l1| >= |l2| >= |l3|
    Vec3 t = Vec3::Zero();       ///< translation in the canonical frame, R1^T t_original
    Mat3 R1 = Mat3::Identity();  ///< post-rotation
    Mat3 R2 = Mat3::Identity();  ///< pre-rotation
};

struct SignedSvd {
    Mat3 R1;
    Vec3 lambda;
    Mat3 R2;
};

namespace detail {

/// Proper rotation that permutes axes: row k picks old axis perm[k]; for odd
/// permutations the last row is negated. Conjugating a diagonal matrix by it
/// reorders the diagonal without touching signs.
inline Mat3 ordering_rotation(const std::array<int, 3>& perm) {
    Mat3 p = Mat3::Zero();
    for (int k = 0; k < 3; ++k) p(k, perm[static_cast<size_t>(k)]) = 1.0;
    if (p.determinant() < 0.0) p.row(2) *= -1.0;
    return p;
}

inline std::array<int, 3> abs_descending_order(const Vec3& d) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (std::abs(d[a]) != std::abs(d[b])) return std::abs(d[a]) > std::abs(d[b]);
        return a < b;  // stable for ties
    });
    return idx;
}

}  // namespace detail

/// Signed SVD. Exact (rounding-free) on diagonal and orthogonal inputs;
/// Jacobi SVD otherwise. Invariants: R1, R2 proper rotations,
/// M = R1 diag(lambda) R2, |lambda| non-increasing, lambda_1, lambda_2 >= 0,
/// sign(lambda_3) = sign(det M).
inline SignedSvd signed_svd(const Mat3& m) {
    SignedSvd out;

    const bool diagonal = m(0, 1) == 0.0 && m(0, 2) == 0.0 && m(1, 0) == 0.0 &&
                          m(1, 2) == 0.0 && m(2, 0) == 0.0 && m(2, 1) == 0.0;
    if (diagonal) {
        const Vec3 d = m.diagonal();
        const auto perm = detail::abs_descending_order(d);
        const Mat3 p = detail::ordering_rotation(perm);
        const Vec3 dt = (p * m * p.transpose()).diagonal();  // ordered, signs intact
        double s = 1.0;
        for (int k = 0; k < 3; ++k) s *= (dt[k] < 0.0 ? -1.0 : 1.0);
        out.lambda = Vec3(std::abs(dt[0]), std::abs(dt[1]), s * std::abs(dt[2]));
        if (out.lambda[2] == 0.0) out.lambda[2] = 0.0;  // normalize -0.0
        // F = diag(dt) * diag(lambda)^-1 entrywise; always +-1 with det +1.
        Vec3 f;
        for (int k = 0; k < 3; ++k)
            f[k] = (dt[k] < 0.0 ? -1.0 : 1.0) * (out.lambda[k] < 0.0 ? -1.0 : 1.0);
        if (f[0] * f[1] * f[2] < 0.0) {
            // Only possible when some dt[k] == 0; flip an arbitrary zero slot.
            for (int k = 2; k >= 0; --k)
                if (dt[k] == 0.0) {
                    f[k] = -f[k];
                    break;
                }
        }
        out.R1 = p.transpose() * f.asDiagonal();
        out.R2 = p;
        return out;
    }

    if ((m.transpose() * m - Mat3::Identity()).norm() < 1e-12) {
        // Orthogonal block: singular values are all 1.
        const double s = m.determinant() < 0.0 ? -1.0 : 1.0;
        out.lambda = Vec3(1.0, 1.0, s);
        out.R1 = m * Vec3(1.0, 1.0, s).asDiagonal();
        out.R2 = Mat3::Identity();
        return out;
    }

    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    Mat3 v = svd.matrixV();
    Vec3 sig = svd.singularValues();  // descending, nonnegative
    double s3 = 1.0;
    if (u.determinant() < 0.0) {
        u.col(2) *= -1.0;
        s3 = -s3;
    }
    if (v.determinant() < 0.0) {
        v.col(2) *= -1.0;
        s3 = -s3;
    }
    out.lambda = Vec3(sig[0], sig[1], s3 * sig[2]);
    out.R1 = u;
    out.R2 = v.transpose();
    return out;
}

/// Canonical form of a channel. The optional axis_order applies a further
/// permutation on top of the default |lambda|-descending ordering: output
/// slot k receives default slot axis_order[k].
inline CanonicalChannel to_canonical(const AffineChannel& phi,
                                     std::optional<std::array<int, 3>> axis_order = {}) {
    const SignedSvd svd = signed_svd(phi.M);
    CanonicalChannel c;
    c.lambda = svd.lambda;
    c.R1 = svd.R1;
    c.R2 = svd.R2;
    c.t = svd.R1.transpose() * phi.t;
    if (axis_order) {
        const Mat3 p = detail::ordering_rotation(*axis_order);
        c.lambda = (p * Mat3(c.lambda.asDiagonal()) * p.transpose()).diagonal();
        c.t = p * c.t;
        c.R1 = c.R1 * p.transpose();
        c.R2 = p * c.R2;
    }
    return c;
}

/// The diagonal-frame channel (diag(lambda), t) of a canonical form.
inline AffineChannel diagonal_channel(const CanonicalChannel& c) {
    return {Mat3(c.lambda.asDiagonal()), c.t};
}

/// Reassembled original channel R1 diag(lambda) R2, t_original = R1 t.
inline AffineChannel channel_from_canonical(const CanonicalChannel& c) {
    return {c.R1 * Mat3(c.lambda.asDiagonal()) * c.R2, c.R1 * c.t};
}

struct SignNormalization {
    CanonicalChannel result;  ///< lambda >= 0 and t_z >= 0; R1 = R2 = I
    GeneratorSpec pre;        ///< pi rotation (or identity) applied before
    GeneratorSpec post;       ///< pi rotation (or identity) applied after
};

namespace detail {

inline GeneratorSpec pi_rotation_about(int axis) {
    return SignFlip{{(axis + 1) % 3, (axis + 2) % 3}};
}

inline Vec3 flip_signs(const Vec3& x, int fixed_axis) {
    Vec3 y = -x;
    y[fixed_axis] = x[fixed_axis];
    return y;
}

}  // namespace detail

/// Removes the sign freedom left by signed_svd using pi rotations only:
/// post . result . pre reproduces the diagonal-frame channel of c exactly.
/// Requires a sign pattern reachable by pair flips (an even number of
/// negative lambda entries, zeros acting as wildcards); other patterns have
/// det < 0 and cannot come from a completely positive extremal candidate.
inline SignNormalization normalize_extremal_signs(const CanonicalChannel& c) {
    Vec3 lam = c.lambda;
    Vec3 t = c.t;
    for (int i = 0; i < 3; ++i)
        if (std::abs(lam[i]) <= 1e-14) lam[i] = 0.0;

    std::array<bool, 3> neg{lam[0] < 0.0, lam[1] < 0.0, lam[2] < 0.0};
    int nneg = neg[0] + neg[1] + neg[2];
    if (nneg % 2 == 1) {
        bool padded = false;
        for (int i = 2; i >= 0 && !padded; --i)
            if (lam[i] == 0.0 && !neg[i]) {
                neg[static_cast<size_t>(i)] = true;
                ++nneg;
                padded = true;
            }
        if (!padded)
            throw invalid_parameter(
                "normalize_extremal_signs: odd sign pattern (det < 0) has no pi-rotation fix");
    }

    int pre_axis = -1, post_axis = -1;  // -1 = identity
    if (t[2] >= 0.0) {
        if (nneg == 2) {
            for (int i = 0; i < 3; ++i)
                if (!neg[static_cast<size_t>(i)]) pre_axis = i;  // flip the two negative axes
        }
    } else {
        if (nneg == 0) {
            pre_axis = 0;  // manufacture negatives on axes 1,2 ...
            post_axis = 0;  // ... then flip them back along with t_z
        } else if (neg[0] && neg[1]) {
            pre_axis = 0;   // flips 1,2: negative set becomes {0,2}
            post_axis = 1;  // flips 0,2 and t_z
        } else if (neg[0]) {
            post_axis = 1;  // neg = {0,2}
        } else {
            post_axis = 0;  // neg = {1,2}
        }
    }

    if (pre_axis >= 0) lam = detail::flip_signs(lam, pre_axis);
    if (post_axis >= 0) {
        lam = detail::flip_signs(lam, post_axis);
        t = detail::flip_signs(t, post_axis);
    }

    SignNormalization out;
    out.result.lambda = lam;
    out.result.t = t;
    out.pre = pre_axis >= 0 ? detail::pi_rotation_about(pre_axis) : GeneratorSpec(Unitary{});
    out.post = post_axis >= 0 ? detail::pi_rotation_about(post_axis) : GeneratorSpec(Unitary{});
    return out;
}

}  // namespace qchan
