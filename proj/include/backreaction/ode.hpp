#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace backreaction::ode {

/// dydt = f(t, y)
using Rhs = std::function<void(double, std::span<const double>, std::span<double>)>;

/// Row-major n x n Jacobian df/dy.
using Jacobian = std::function<void(double, std::span<const double>, std::span<double>)>;

/// Called at every requested output time; return false to stop early.
using Observer = std::function<bool(double, std::span<const double>)>;

struct Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_max = 0.0;      ///< 0 = unlimited
    double fixed_h = 0.0;    ///< > 0 disables error control and steps exactly this h
    std::size_t max_steps = 50'000'000;
};

enum class Status { ok, observer_stop, step_underflow, too_many_steps };

[[nodiscard]] constexpr const char* to_string(Status s) noexcept {
    switch (s) {
        case Status::ok: return "ok";
        case Status::observer_stop: return "observer-stop";
        case Status::step_underflow: return "step-underflow";
        case Status::too_many_steps: return "too-many-steps";
    }
    return "unknown";
}

struct Result {
    Status status = Status::ok;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

/// Adaptive explicit Dormand-Prince 5(4) pair. Output times must be strictly
/// increasing; the first one is where y0 lives and is reported immediately.
Result dopri5(const Rhs& f, std::span<const double> y0, std::span<const double> t_out,
              const Options& opts, const Observer& observer);

/// Semi-implicit Rosenbrock 2(3) pair (the ode23s scheme). L-stable; meant
/// for the third-order Lorentz-Dirac system with its 1/eta runaway mode.
Result rosenbrock23(const Rhs& f, const Jacobian& jac, std::span<const double> y0,
                    std::span<const double> t_out, const Options& opts, const Observer& observer);

/// Dispatch by solver name: "dopri5" or "rosenbrock23". The Jacobian may be
/// null for dopri5; rosenbrock23 falls back to finite differences without one.
Result integrate(std::string_view solver, const Rhs& f, const Jacobian* jac,
                 std::span<const double> y0, std::span<const double> t_out, const Options& opts,
                 const Observer& observer);

}  // namespace backreaction::ode
