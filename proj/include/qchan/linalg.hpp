// Small fixed-size linear algebra helpers shared across the library.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>

namespace qchan {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using CMat2 = Eigen::Matrix2cd;
using CMat4 = Eigen::Matrix4cd;
using CVec4 = Eigen::Vector4cd;

using std::size_t;

inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when two internally redundant computations disagree beyond any
/// plausible rounding band. Indicates a bug, not bad input.
struct internal_consistency_error : std::logic_error {
    using std::logic_error::logic_error;
};

/// Thrown on invalid arguments (malformed parameters, domain violations).
struct invalid_parameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

inline double clamp_unit(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

/// Rotation about a unit axis, angle in radians (Rodrigues form).
inline Mat3 rotation_about(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (n < 1e-12) throw invalid_parameter("rotation_about: axis has zero norm");
    const Vec3 u = axis / n;
    Mat3 k;
    k << 0, -u.z(), u.y(), u.z(), 0, -u.x(), -u.y(), u.x(), 0;
    const double c = std::cos(angle), s = std::sin(angle);
    return c * Mat3::Identity() + s * k + (1.0 - c) * (u * u.transpose());
}

/// Inverse of rotation_about: axis (unit) and angle in [0, pi].
/// R must be a proper rotation; the angle-pi branch is handled separately
/// because the skew part vanishes there.
inline void axis_angle_from_rotation(const Mat3& r, Vec3& axis, double& angle) {
    const double tr = r.trace();
    angle = std::acos(clamp_unit((tr - 1.0) / 2.0));
    if (angle < 1e-12) {
        axis = Vec3::UnitZ();
        angle = 0.0;
        return;
    }
    if (kPi - angle > 1e-7) {
        axis = Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
        axis /= (2.0 * std::sin(angle));
        axis.normalize();
        return;
    }
    // Near pi: R ~ 2*n*n^T - I, take the dominant column of (R + I)/2.
    Mat3 b = (r + Mat3::Identity()) / 2.0;
    int j = 0;
    b.diagonal().maxCoeff(&j);
    axis = b.col(j);
    axis.normalize();
    // Fix residual signs from the skew part when not exactly at pi.
    const Vec3 w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
    if (w.norm() > 1e-12 && axis.dot(w) < 0.0) axis = -axis;
}

namespace detail {

/// Compensated double-double arithmetic (value + error term). Only the
/// handful of operations needed to keep r^2 - q accurate near its double
/// root; catastrophic cancellation there would otherwise cost ~half the
/// significand.
struct dd {
    double hi = 0.0, lo = 0.0;
};

inline dd two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline dd two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd dd_add(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    const double lo = s.lo + a.lo + b.lo;
    dd r = two_sum(s.hi, lo);
    return r;
}

inline dd dd_add(dd a, double b) { return dd_add(a, dd{b, 0.0}); }

inline dd dd_neg(dd a) { return {-a.hi, -a.lo}; }

inline dd dd_sub(dd a, dd b) { return dd_add(a, dd_neg(b)); }

inline dd dd_mul(dd a, dd b) {
    dd p = two_prod(a.hi, b.hi);
    const double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
    dd r = two_sum(p.hi, lo);
    return r;
}

inline dd dd_mul(dd a, double b) { return dd_mul(a, dd{b, 0.0}); }

inline dd dd_scale(dd a, double b) { return {a.hi * b, a.lo * b}; }

inline double dd_value(dd a) { return a.hi + a.lo; }

}  // namespace detail

}  // namespace qchan
