#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "backreaction/vec3.hpp"

namespace backreaction {

/// Dense real 3x3 linear map, row major.
class LinearMap3 {
  public:
    constexpr LinearMap3() : m_{} {}

    static constexpr LinearMap3 zero() { return LinearMap3{}; }

    static constexpr LinearMap3 identity() {
        LinearMap3 r;
        r.m_[0][0] = r.m_[1][1] = r.m_[2][2] = 1.0;
        return r;
    }

    static constexpr LinearMap3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        LinearMap3 r;
        r.m_ = {{{r0.x, r0.y, r0.z}, {r1.x, r1.y, r1.z}, {r2.x, r2.y, r2.z}}};
        return r;
    }

    /// a b^T
    static constexpr LinearMap3 outer(const Vec3& a, const Vec3& b) {
        LinearMap3 r;
        const double av[3] = {a.x, a.y, a.z};
        const double bv[3] = {b.x, b.y, b.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m_[i][j] = av[i] * bv[j];
        return r;
    }

    constexpr double operator()(int i, int j) const { return m_[i][j]; }
    constexpr double& operator()(int i, int j) { return m_[i][j]; }

    constexpr Vec3 operator*(const Vec3& v) const {
        return {m_[0][0] * v.x + m_[0][1] * v.y + m_[0][2] * v.z,
                m_[1][0] * v.x + m_[1][1] * v.y + m_[1][2] * v.z,
                m_[2][0] * v.x + m_[2][1] * v.y + m_[2][2] * v.z};
    }

    constexpr LinearMap3 operator*(const LinearMap3& o) const {
        LinearMap3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += m_[i][k] * o.m_[k][j];
                r.m_[i][j] = s;
            }
        return r;
    }

    constexpr LinearMap3 operator+(const LinearMap3& o) const {
        LinearMap3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m_[i][j] = m_[i][j] + o.m_[i][j];
        return r;
    }

    constexpr LinearMap3 operator-(const LinearMap3& o) const {
        LinearMap3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m_[i][j] = m_[i][j] - o.m_[i][j];
        return r;
    }

    constexpr LinearMap3 operator*(double s) const {
        LinearMap3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m_[i][j] = m_[i][j] * s;
        return r;
    }

    [[nodiscard]] constexpr LinearMap3 transpose() const {
        LinearMap3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m_[i][j] = m_[j][i];
        return r;
    }

    [[nodiscard]] constexpr double trace() const { return m_[0][0] + m_[1][1] + m_[2][2]; }

    [[nodiscard]] double max_abs() const {
        double r = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r = std::max(r, std::abs(m_[i][j]));
        return r;
    }

    [[nodiscard]] bool is_finite() const {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (!std::isfinite(m_[i][j])) return false;
        return true;
    }

  private:
    std::array<std::array<double, 3>, 3> m_;
};

constexpr inline LinearMap3 operator*(double s, const LinearMap3& a) { return a * s; }

inline double max_abs_diff(const LinearMap3& a, const LinearMap3& b) {
    return (a - b).max_abs();
}

/// Antisymmetric map v |-> v x b_vec (the magnetic part of the Lorentz force
/// in reduced variables).
inline LinearMap3 cross_map(const Vec3& b_vec) {
    return LinearMap3::from_rows({0.0, b_vec.z, -b_vec.y},
                                 {-b_vec.z, 0.0, b_vec.x},
                                 {b_vec.y, -b_vec.x, 0.0});
}

/// Orthogonal projector onto the plane perpendicular to b_vec.
inline LinearMap3 orthogonal_projector(const Vec3& b_vec) {
    const double b2 = b_vec.norm2();
    if (!(b2 > 0.0)) throw std::invalid_argument("degenerate magnetic direction");
    return LinearMap3::identity() - LinearMap3::outer(b_vec, b_vec) * (1.0 / b2);
}

/// Split v into (parallel, perpendicular) parts relative to b_vec.
inline std::pair<Vec3, Vec3> project_parallel_perp(const Vec3& v, const Vec3& b_vec) {
    const double b2 = b_vec.norm2();
    if (!(b2 > 0.0)) throw std::invalid_argument("degenerate magnetic direction");
    const Vec3 parallel = b_vec * (v.dot(b_vec) / b2);
    return {parallel, v - parallel};
}

}  // namespace backreaction
