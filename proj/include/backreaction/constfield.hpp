#pragma once

#include <complex>
#include <vector>

#include "backreaction/iteration.hpp"
#include "backreaction/linmap3.hpp"
#include "backreaction/params.hpp"
#include "backreaction/polynomial.hpp"
#include "backreaction/vec3.hpp"

namespace backreaction::constfield {

/// Closed-form self-force coefficients for a constant field.
///
/// phi = (1-beta)^2 is the non-negative root of 4 (eta b)^2 phi^2 + phi = 1,
/// evaluated in the cancellation-free form phi = 2 / (1 + sqrt(1 + 16 (eta b)^2)),
/// which is exact for every coupling including b = 0. The branch is the one
/// with beta, alpha -> 0 as the field is switched off.
struct Coefficients {
    double phi = 1.0;
    double beta = 0.0;
    double alpha = 0.0;           ///< [1/time]
    double lambda_kernel = 0.0;   ///< coefficient on (I - P); zero by the no-field condition
    bool outside_iteration_regime = false;  ///< eta*b >= 1: closed form valid, iterations are not
};

Coefficients closed_form_coefficients(const FieldParams& params);

/// Affine self-force s(v) = linear * v + constant.
struct SelfForceAffine {
    LinearMap3 linear;   ///< -beta B - alpha P   [1/time]
    Vec3 constant;       ///< -beta P e + (alpha/b^2) B e   [acceleration]

    [[nodiscard]] Vec3 operator()(const Vec3& v) const { return linear * v + constant; }
};

SelfForceAffine self_force(const FieldParams& params);

/// Residual of the self-force PDE at velocity v for an affine candidate:
/// s(v) - eta (B + M)(e + B v + s(v)). Zero iff the candidate solves the PDE at v.
Vec3 pde_residual(const SelfForceAffine& s, const FieldParams& params, const Vec3& v);

/// Exact solution of the reduced equation of motion for initial velocity c0.
/// For b = 0 this degenerates to uniform acceleration c0 + e t.
Vec3 closed_form_trajectory(const FieldParams& params, const Vec3& c0, double t);

/// Position along the closed-form trajectory, x(0) = x0.
Vec3 closed_form_position(const FieldParams& params, const Vec3& x0, const Vec3& c0, double t);

/// Decaying root of the envelope characteristic polynomial
/// z^2 - (1/eta - 2ib) z - b^2 = 0, branch chosen to vanish as b -> 0.
/// The root equals -alpha - i beta b.
struct CharacteristicRoot {
    std::complex<double> root;
    double alpha = 0.0;
    double beta = 0.0;
};

CharacteristicRoot characteristic_root(const FieldParams& params);

/// Fixed-point iteration of the radiation term K_{n+1} = eta (B + K_n)^2,
/// started from K_1 = -eta b^2 P; a nonzero electric field adds the affine
/// recursion d_{n+1} = eta (B + K_n)(e + d_n). Entries record (beta_n,
/// alpha_n, d_n). The iteration converges only for eta*b below about 0.636;
/// at eta*b = 1 it cycles with period 2, beyond that it blows up.
IterationTrace iterate_radiation_term(const FieldParams& params, int max_steps, double tol);

/// Envelope polynomials (p_n, q_n) of the solution iteration; p_n(0) = 1,
/// q_n(0) = 0.
struct EnvelopePair {
    Polynomial<double> p;
    Polynomial<double> q;
};

/// Runs the solution iteration for steps 0..n and returns all envelope pairs.
/// Requires e = 0 (use solution_iterate_velocity for the general field).
std::vector<EnvelopePair> iterate_solution_envelopes(const FieldParams& params, int n);

/// Velocity of the n-th solution iterate for e = 0:
/// w_n(t) = (I-P) c0 + [p_n(t) + q_n(t) B] e^{Bt} P c0.
Vec3 envelope_trajectory(const FieldParams& params, const EnvelopePair& step, const Vec3& c0,
                         double t);

/// Velocity of the n-th solution iterate for a general field. The component
/// parallel to b evolves exactly (uniform acceleration); the orthogonal
/// channel applies the e = 0 envelopes to the shifted variable
/// u = P v - B e / b^2, which both iteration schemes preserve.
Vec3 solution_iterate_velocity(const FieldParams& params, const EnvelopePair& step,
                               const Vec3& c0, double t);

}  // namespace backreaction::constfield
