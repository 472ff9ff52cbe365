#include "backreaction/constfield.hpp"

#include <cmath>
#include <stdexcept>

namespace backreaction::constfield {

Coefficients closed_form_coefficients(const FieldParams& params) {
    params.validate();
    const double k = params.coupling();  // eta * b
    Coefficients c;
    c.phi = 2.0 / (1.0 + std::sqrt(1.0 + 16.0 * k * k));
    const double sqrt_phi = std::sqrt(c.phi);
    c.beta = 1.0 - sqrt_phi;
    c.alpha = (1.0 / sqrt_phi - 1.0) / (2.0 * params.eta);
    c.lambda_kernel = 0.0;
    c.outside_iteration_regime = k >= 1.0;
    return c;
}

SelfForceAffine self_force(const FieldParams& params) {
    params.validate();
    const double b = params.b();
    if (b == 0.0) {
        // Constant force only: uniform acceleration has zero jerk, so the
        // self-force vanishes identically.
        return {};
    }
    const Coefficients c = closed_form_coefficients(params);
    const LinearMap3 B = cross_map(params.b_vec);
    const LinearMap3 P = orthogonal_projector(params.b_vec);
    SelfForceAffine s;
    s.linear = B * (-c.beta) + P * (-c.alpha);
    s.constant = (P * params.e_vec) * (-c.beta) + (B * params.e_vec) * (c.alpha / (b * b));
    return s;
}

Vec3 pde_residual(const SelfForceAffine& s, const FieldParams& params, const Vec3& v) {
    const LinearMap3 B = cross_map(params.b_vec);
    const Vec3 total = params.e_vec + B * v + s(v);
    return s(v) - (B + s.linear) * total * params.eta;
}

namespace {

/// e^{B s} u for u perpendicular to b (plane rotation by angle -b s).
Vec3 rotate_perp(const LinearMap3& B, double b, double s, const Vec3& u) {
    return u * std::cos(b * s) + (B * u) * (std::sin(b * s) / b);
}

}  // namespace

Vec3 closed_form_trajectory(const FieldParams& params, const Vec3& c0, double t) {
    params.validate();
    const double b = params.b();
    if (b == 0.0) return c0 + params.e_vec * t;

    const Coefficients c = closed_form_coefficients(params);
    const LinearMap3 B = cross_map(params.b_vec);
    const LinearMap3 P = orthogonal_projector(params.b_vec);
    const LinearMap3 IP = LinearMap3::identity() - P;

    const Vec3 drift = B * params.e_vec * (1.0 / (b * b));
    const Vec3 transient = rotate_perp(B, b, (1.0 - c.beta) * t, P * c0 - drift);
    return IP * params.e_vec * t + IP * c0 + drift + transient * std::exp(-c.alpha * t);
}

Vec3 closed_form_position(const FieldParams& params, const Vec3& x0, const Vec3& c0, double t) {
    params.validate();
    const double b = params.b();
    if (b == 0.0) return x0 + c0 * t + params.e_vec * (0.5 * t * t);

    const Coefficients c = closed_form_coefficients(params);
    const LinearMap3 B = cross_map(params.b_vec);
    const LinearMap3 P = orthogonal_projector(params.b_vec);
    const LinearMap3 IP = LinearMap3::identity() - P;

    const Vec3 drift = B * params.e_vec * (1.0 / (b * b));
    const Vec3 w = P * c0 - drift;

    // On the orthogonal plane the transient is e^{A t} w with
    // A = -alpha P + (1-beta) B; its integral is A^{-1} (e^{At} - I) w.
    const double kappa = 1.0 - c.beta;
    const double denom = c.alpha * c.alpha + kappa * kappa * b * b;
    const Vec3 eat_w =
        rotate_perp(B, b, kappa * t, w) * std::exp(-c.alpha * t) - w;  // (e^{At} - I) w
    const Vec3 integral = (eat_w * (-c.alpha) - (B * eat_w) * kappa) * (1.0 / denom);

    return x0 + IP * params.e_vec * (0.5 * t * t) + IP * c0 * t + drift * t + integral;
}

CharacteristicRoot characteristic_root(const FieldParams& params) {
    params.validate();
    const double eta = params.eta;
    const double b = params.b();
    CharacteristicRoot out;
    if (b == 0.0) {
        out.root = {0.0, 0.0};
        return out;
    }
    const std::complex<double> half{1.0 / (2.0 * eta), 0.0};
    const std::complex<double> rad = std::sqrt(half * half - std::complex<double>{0.0, b / eta});
    out.root = half - std::complex<double>{0.0, b} - rad;
    out.alpha = -out.root.real();
    out.beta = -out.root.imag() / b;
    return out;
}

IterationTrace iterate_radiation_term(const FieldParams& params, int max_steps, double tol) {
    params.validate();
    if (max_steps < 1) throw std::invalid_argument("iterate_radiation_term: max_steps must be >= 1");

    IterationTrace trace;
    const double b = params.b();
    if (b == 0.0) {
        // No magnetic field: every iterate is exactly zero.
        trace.entries.push_back({1, 0.0, 0.0, {}});
        trace.status = IterationStatus::converged;
        return trace;
    }

    const double eta = params.eta;
    const double k2 = eta * b * eta * b;
    const LinearMap3 B = cross_map(params.b_vec);
    const LinearMap3 P = orthogonal_projector(params.b_vec);

    ConvergenceMonitor monitor(tol);
    double beta = 0.0;
    double ea = k2;  // eta * alpha_1, from K_1 = -eta b^2 P
    Vec3 d{};        // constant term; d_1 = eta B e
    {
        const LinearMap3 M0 = LinearMap3::zero();
        d = (B + M0) * params.e_vec * eta;
    }

    for (int n = 1; n <= max_steps; ++n) {
        trace.entries.push_back({n, beta, ea / eta, d});
        const double vals[5] = {beta, ea, d.x, d.y, d.z};
        trace.status = monitor.push(std::span<const double>(vals, 5));
        trace.period = monitor.period();
        if (trace.status != IterationStatus::max_steps) return trace;
        if (n == max_steps) break;

        const LinearMap3 M = B * (-beta) + P * (-(ea / eta));
        const Vec3 d_next = (B + M) * (params.e_vec + d) * eta;
        const double beta_next = 2.0 * ea * (1.0 - beta);
        const double ea_next = k2 * (1.0 - beta) * (1.0 - beta) - ea * ea;
        beta = beta_next;
        ea = ea_next;
        d = d_next;
    }
    trace.status = IterationStatus::max_steps;
    return trace;
}

std::vector<EnvelopePair> iterate_solution_envelopes(const FieldParams& params, int n) {
    params.validate();
    if (params.e_vec.norm2() != 0.0)
        throw std::invalid_argument(
            "iterate_solution_envelopes: requires e = 0; use solution_iterate_velocity");
    if (n < 0) throw std::invalid_argument("iterate_solution_envelopes: n must be >= 0");

    const double eta = params.eta;
    const double b2 = params.b() * params.b();

    std::vector<EnvelopePair> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back({Polynomial<double>{1.0}, Polynomial<double>{}});
    for (int k = 1; k <= n; ++k) {
        const auto& [p, q] = out.back();
        const auto p_dot_rhs = (p.derivative().derivative() - q.derivative() * (2.0 * b2)
                                - p * b2) * eta;
        const auto q_dot_rhs = (q.derivative().derivative() + p.derivative() * 2.0
                                - q * b2) * eta;
        out.push_back({p_dot_rhs.antiderivative(1.0), q_dot_rhs.antiderivative(0.0)});
    }
    return out;
}

Vec3 envelope_trajectory(const FieldParams& params, const EnvelopePair& step, const Vec3& c0,
                         double t) {
    const double b = params.b();
    if (b == 0.0) return c0;
    const LinearMap3 B = cross_map(params.b_vec);
    const LinearMap3 P = orthogonal_projector(params.b_vec);
    const Vec3 u0 = P * c0;
    const Vec3 rotated = rotate_perp(B, b, t, u0);
    return (c0 - u0) + rotated * step.p.evaluate(t) + (B * rotated) * step.q.evaluate(t);
}

Vec3 solution_iterate_velocity(const FieldParams& params, const EnvelopePair& step,
                               const Vec3& c0, double t) {
    params.validate();
    const double b = params.b();
    if (b == 0.0) return c0 + params.e_vec * t;
    const LinearMap3 B = cross_map(params.b_vec);
    const LinearMap3 P = orthogonal_projector(params.b_vec);
    const LinearMap3 IP = LinearMap3::identity() - P;

    const Vec3 drift = B * params.e_vec * (1.0 / (b * b));
    const Vec3 u0 = P * c0 - drift;
    const Vec3 rotated = rotate_perp(B, b, t, u0);
    const Vec3 u_t = rotated * step.p.evaluate(t) + (B * rotated) * step.q.evaluate(t);
    return IP * params.e_vec * t + IP * c0 + drift + u_t;
}

}  // namespace backreaction::constfield
