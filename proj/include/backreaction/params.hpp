#pragma once

#include <cmath>
#include <stdexcept>

#include "backreaction/vec3.hpp"

namespace backreaction {

/// Reduced (per-mass) constant-field data: electric acceleration e_vec,
/// gyro-frequency vector b_vec, damping timescale eta. Mass, charge and the
/// speed of light never enter separately.
struct FieldParams {
    Vec3 e_vec{};
    Vec3 b_vec{};
    double eta = 1.0;

    [[nodiscard]] double b() const { return b_vec.norm(); }
    [[nodiscard]] double coupling() const { return eta * b(); }

    void validate() const {
        if (!(eta > 0.0) || !std::isfinite(eta))
            throw std::invalid_argument("FieldParams: eta must be positive and finite");
        if (!e_vec.is_finite() || !b_vec.is_finite())
            throw std::invalid_argument("FieldParams: non-finite field vector");
    }
};

/// One-dimensional harmonic force, reduced variables.
struct ElasticParams {
    double omega = 0.0;
    double eta = 1.0;

    [[nodiscard]] double coupling() const { return eta * omega; }

    void validate() const {
        if (!(eta > 0.0) || !std::isfinite(eta))
            throw std::invalid_argument("ElasticParams: eta must be positive and finite");
        if (!(omega >= 0.0) || !std::isfinite(omega))
            throw std::invalid_argument("ElasticParams: omega must be non-negative and finite");
    }
};

/// Default tolerances. Overridable wherever they appear as arguments.
struct Tolerances {
    static constexpr double fixed_point_rel = 1e-10;  ///< fixed-point convergence
    static constexpr double algebra_rel = 1e-12;      ///< algebraic identity checks
};

}  // namespace backreaction
