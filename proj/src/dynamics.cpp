#include "backreaction/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "backreaction/ode.hpp"

namespace backreaction::dynamics {

namespace {

LinearMap3 central_difference(const std::function<Vec3(const Vec3&)>& g, const Vec3& at) {
    const double h = std::max(1e-6, 1e-6 * at.norm());
    LinearMap3 J;
    const Vec3 unit[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int j = 0; j < 3; ++j) {
        const Vec3 plus = g(at + unit[j] * h);
        const Vec3 minus = g(at - unit[j] * h);
        const Vec3 col = (plus - minus) / (2.0 * h);
        J(0, j) = col.x;
        J(1, j) = col.y;
        J(2, j) = col.z;
    }
    return J;
}

std::vector<double> sample_times(double t0, double t_end, int n_samples) {
    if (n_samples < 2) throw std::invalid_argument("trajectory needs at least 2 samples");
    if (!(t_end > t0)) throw std::invalid_argument("t_end must exceed the initial time");
    std::vector<double> t(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i)
        t[static_cast<std::size_t>(i)] = t0 + (t_end - t0) * i / (n_samples - 1);
    return t;
}

Vec3 get3(std::span<const double> y, std::size_t at) { return {y[at], y[at + 1], y[at + 2]}; }

void put3(std::span<double> y, std::size_t at, const Vec3& v) {
    y[at] = v.x;
    y[at + 1] = v.y;
    y[at + 2] = v.z;
}

void put_block(std::span<double> J, std::size_t n, std::size_t row, std::size_t col,
               const LinearMap3& m) {
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            J[(row + i) * n + (col + j)] = m(static_cast<int>(i), static_cast<int>(j));
}

}  // namespace

LinearMap3 ForceField::d_position(const Vec3& x, const Vec3& v) const {
    if (position_derivative) return position_derivative(x, v);
    return central_difference([&](const Vec3& p) { return value(p, v); }, x);
}

LinearMap3 ForceField::d_velocity(const Vec3& x, const Vec3& v) const {
    if (velocity_derivative) return velocity_derivative(x, v);
    return central_difference([&](const Vec3& w) { return value(x, w); }, v);
}

ForceField constant_field(const FieldParams& params) {
    params.validate();
    const LinearMap3 B = cross_map(params.b_vec);
    const Vec3 e = params.e_vec;
    ForceField f;
    f.value = [e, B](const Vec3&, const Vec3& v) { return e + B * v; };
    f.position_derivative = [](const Vec3&, const Vec3&) { return LinearMap3::zero(); };
    f.velocity_derivative = [B](const Vec3&, const Vec3&) { return B; };
    return f;
}

ForceField elastic_field(const ElasticParams& params) {
    params.validate();
    const double w2 = params.omega * params.omega;
    ForceField f;
    f.value = [w2](const Vec3& x, const Vec3&) { return x * (-w2); };
    f.position_derivative = [w2](const Vec3&, const Vec3&) {
        return LinearMap3::identity() * (-w2);
    };
    f.velocity_derivative = [](const Vec3&, const Vec3&) { return LinearMap3::zero(); };
    return f;
}

Trajectory integrate_lorentz_dirac(const ForceField& field, const LDState& s0, double eta,
                                   double t_end, double tol, int n_samples,
                                   std::string_view solver) {
    if (!s0.is_finite()) throw std::invalid_argument("integrate_lorentz_dirac: non-finite state");
    if (!(eta > 0.0)) throw std::invalid_argument("integrate_lorentz_dirac: eta must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_lorentz_dirac: tol must be positive");

    Trajectory traj;
    traj.solver = std::string(solver);
    traj.rtol = tol;
    traj.atol = tol * 1e-2;
    traj.has_acceleration = true;

    double scale = std::max(s0.a.norm(), field.value(s0.x, s0.v).norm());
    if (scale == 0.0) scale = 1.0;
    const double limit = kRunawayThreshold * scale;

    const auto rhs = [&field, eta](double, std::span<const double> y, std::span<double> dy) {
        const Vec3 x = get3(y, 0), v = get3(y, 3), a = get3(y, 6);
        put3(dy, 0, v);
        put3(dy, 3, a);
        put3(dy, 6, (a - field.value(x, v)) / eta);
    };
    const ode::Jacobian jac = [&field, eta](double, std::span<const double> y,
                                            std::span<double> J) {
        const Vec3 x = get3(y, 0), v = get3(y, 3);
        std::fill(J.begin(), J.end(), 0.0);
        put_block(J, 9, 0, 3, LinearMap3::identity());
        put_block(J, 9, 3, 6, LinearMap3::identity());
        put_block(J, 9, 6, 0, field.d_position(x, v) * (-1.0 / eta));
        put_block(J, 9, 6, 3, field.d_velocity(x, v) * (-1.0 / eta));
        put_block(J, 9, 6, 6, LinearMap3::identity() * (1.0 / eta));
    };

    const auto t_out = sample_times(s0.t, t_end, n_samples);
    double y0[9];
    put3(std::span<double>(y0, 9), 0, s0.x);
    put3(std::span<double>(y0, 9), 3, s0.v);
    put3(std::span<double>(y0, 9), 6, s0.a);

    ode::Options opts;
    opts.rtol = traj.rtol;
    opts.atol = traj.atol;
    const auto observer = [&traj, limit](double t, std::span<const double> y) {
        const Vec3 a = get3(y, 6);
        traj.samples.push_back({t, get3(y, 0), get3(y, 3), a});
        if (a.norm() > limit || !a.is_finite()) {
            traj.termination = "runaway";
            traj.runaway_time = t;
            return false;
        }
        return true;
    };

    const auto result = ode::integrate(solver, rhs, &jac, std::span<const double>(y0, 9), t_out,
                                       opts, observer);
    if (result.status == ode::Status::step_underflow
        || result.status == ode::Status::too_many_steps)
        traj.termination = "failed";
    return traj;
}

Trajectory integrate_reduced(const ForceField& field, const SelfForceFn& self_force,
                             const Vec3& x0, const Vec3& v0, double t_end, double tol,
                             int n_samples, std::string_view solver) {
    if (!x0.is_finite() || !v0.is_finite())
        throw std::invalid_argument("integrate_reduced: non-finite initial state");
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_reduced: tol must be positive");

    Trajectory traj;
    traj.solver = std::string(solver);
    traj.rtol = tol;
    traj.atol = tol * 1e-2;

    const auto rhs = [&field, &self_force](double, std::span<const double> y,
                                           std::span<double> dy) {
        const Vec3 x = get3(y, 0), v = get3(y, 3);
        put3(dy, 0, v);
        put3(dy, 3, field.value(x, v) + self_force(x, v));
    };

    const auto t_out = sample_times(0.0, t_end, n_samples);
    double y0[6];
    put3(std::span<double>(y0, 6), 0, x0);
    put3(std::span<double>(y0, 6), 3, v0);

    ode::Options opts;
    opts.rtol = traj.rtol;
    opts.atol = traj.atol;
    const auto observer = [&traj, &field, &self_force](double t, std::span<const double> y) {
        const Vec3 x = get3(y, 0), v = get3(y, 3);
        traj.samples.push_back({t, x, v, field.value(x, v) + self_force(x, v)});
        return true;
    };

    const auto result = ode::integrate(solver, rhs, nullptr, std::span<const double>(y0, 6),
                                       t_out, opts, observer);
    if (result.status != ode::Status::ok) traj.termination = "failed";
    return traj;
}

SelfForceFn landau_first_approximation(const ForceField& field, double eta) {
    return [field, eta](const Vec3& x, const Vec3& v) {
        return (field.d_position(x, v) * v + field.d_velocity(x, v) * field.value(x, v)) * eta;
    };
}

double third_derivative_residual(const Trajectory& traj, const SelfForceFn& self_force,
                                 double eta) {
    const auto& s = traj.samples;
    if (s.size() < 5)
        throw std::invalid_argument("third_derivative_residual: need at least 5 samples");
    const double h = s[1].t - s[0].t;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (!(s[i].t > s[i - 1].t))
            throw std::invalid_argument("third_derivative_residual: t must be increasing");
        if (std::abs((s[i].t - s[i - 1].t) - h) > 1e-9 * h)
            throw std::invalid_argument("third_derivative_residual: requires uniform spacing");
    }

    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < s.size(); ++i) {
        const Vec3 jerk = (s[i - 2].v * -1.0 + s[i - 1].v * 16.0 + s[i].v * -30.0
                           + s[i + 1].v * 16.0 + s[i + 2].v * -1.0)
                          / (12.0 * h * h);
        const Vec3 residual = jerk * eta - self_force(s[i].x, s[i].v);
        worst = std::max(worst, residual.norm());
    }
    return worst;
}

}  // namespace backreaction::dynamics
