#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "backreaction/linmap3.hpp"
#include "backreaction/params.hpp"
#include "backreaction/vec3.hpp"

namespace backreaction::dynamics {

/// External force per unit mass, with optional analytic derivatives. When a
/// derivative is absent, central finite differences with step
/// h = max(1e-6, 1e-6 |argument|) substitute for it.
struct ForceField {
    std::function<Vec3(const Vec3& x, const Vec3& v)> value;
    std::function<LinearMap3(const Vec3& x, const Vec3& v)> position_derivative;
    std::function<LinearMap3(const Vec3& x, const Vec3& v)> velocity_derivative;

    [[nodiscard]] LinearMap3 d_position(const Vec3& x, const Vec3& v) const;
    [[nodiscard]] LinearMap3 d_velocity(const Vec3& x, const Vec3& v) const;
};

/// f(v) = e + B v with exact derivatives.
ForceField constant_field(const FieldParams& params);

/// Isotropic harmonic force f(x) = -omega^2 x; the one-dimensional analysis
/// applies componentwise.
ForceField elastic_field(const ElasticParams& params);

using SelfForceFn = std::function<Vec3(const Vec3& x, const Vec3& v)>;

/// Initial-value triple of the third-order equation.
struct LDState {
    Vec3 x{};
    Vec3 v{};
    Vec3 a{};
    double t = 0.0;

    [[nodiscard]] bool is_finite() const {
        return x.is_finite() && v.is_finite() && a.is_finite() && std::isfinite(t);
    }
};

struct Trajectory {
    struct Sample {
        double t = 0.0;
        Vec3 x{};
        Vec3 v{};
        Vec3 a{};
    };

    std::vector<Sample> samples;
    std::string solver;
    double rtol = 0.0;
    double atol = 0.0;
    bool has_acceleration = false;     ///< acceleration column is part of the state (LD runs)
    std::string termination = "completed";  ///< or "runaway" / "failed"
    double runaway_time = std::numeric_limits<double>::quiet_NaN();
};

/// When the initial acceleration scale is positive, integration terminates
/// with reason "runaway" once |a| exceeds runaway_threshold times that scale.
inline constexpr double kRunawayThreshold = 1e12;

/// Integrates xdot = v, vdot = a, adot = (a - f(x, v)) / eta from the given
/// triple. Default solver is the semi-implicit one; "dopri5" may be selected
/// for trajectories on the critical manifold, which are not stiff.
Trajectory integrate_lorentz_dirac(const ForceField& field, const LDState& s0, double eta,
                                   double t_end, double tol, int n_samples,
                                   std::string_view solver = "rosenbrock23");

/// Integrates the reduced second-order equation vdot = f(x, v) + s(x, v).
/// Samples carry a = vdot for convenience.
Trajectory integrate_reduced(const ForceField& field, const SelfForceFn& self_force,
                             const Vec3& x0, const Vec3& v0, double t_end, double tol,
                             int n_samples, std::string_view solver = "dopri5");

/// First-order reduction of the radiation term:
/// s1(x, v) = eta [ (df/dx) v + (df/dv) f(x, v) ].
SelfForceFn landau_first_approximation(const ForceField& field, double eta);

/// Max over interior samples of |eta * jerk - s(x, v)|, with the jerk (third
/// position derivative) estimated from the stored velocity samples by the
/// five-point fourth-order central stencil. Requires at least 5 uniformly
/// spaced samples.
double third_derivative_residual(const Trajectory& traj, const SelfForceFn& self_force,
                                 double eta);

}  // namespace backreaction::dynamics
