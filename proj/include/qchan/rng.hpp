// Deterministic random primitives. mt19937_64 supplies bits; every variate
// transform is written out here because std::*_distribution output is
// implementation-defined and sampled output must be reproducible byte for
// byte across platforms.
#pragma once

#include "qchan/linalg.hpp"

#include <algorithm>
#include <random>

namespace qchan {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal, Box-Muller; the spare value is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
        const double u2 = uniform();
        const double m = std::sqrt(-2.0 * std::log(u1));
        spare_ = m * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return m * std::cos(2.0 * kPi * u2);
    }

    /// Uniform direction on the unit sphere.
    Vec3 unit_vector() {
        const double z = 2.0 * uniform() - 1.0;
        const double phi = 2.0 * kPi * uniform();
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {s * std::cos(phi), s * std::sin(phi), z};
    }

    /// Haar-uniform rotation via a uniform unit quaternion.
    Mat3 rotation() {
        double q[4];
        double n2 = 0.0;
        do {
            n2 = 0.0;
            for (double& c : q) {
                c = normal();
                n2 += c * c;
            }
        } while (n2 < 1e-12);
        const double inv = 1.0 / std::sqrt(n2);
        const double w = q[0] * inv, x = q[1] * inv, y = q[2] * inv, z = q[3] * inv;
        Mat3 r;
        r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
             2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
             2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
        return r;
    }

    /// Uniform point on the probability 4-simplex (sorted-gaps construction).
    std::array<double, 4> simplex4() {
        std::array<double, 3> u{uniform(), uniform(), uniform()};
        std::sort(u.begin(), u.end());
        return {u[0], u[1] - u[0], u[2] - u[1], 1.0 - u[2]};
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qchan
