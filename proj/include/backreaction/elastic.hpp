#pragma once

#include <complex>
#include <vector>

#include "backreaction/iteration.hpp"
#include "backreaction/params.hpp"
#include "backreaction/polynomial.hpp"

namespace backreaction::elastic {

/// Roots of eta lambda^3 - lambda^2 - omega^2 = 0 via the Cardano formula.
/// rho_minus is evaluated as 1/(9 rho_plus); the product rho_plus rho_minus
/// equals 1/9 identically, which avoids the cancellation the direct formula
/// suffers for small eta*omega.
struct CubicRoots {
    double rho_plus = 0.0;
    double rho_minus = 0.0;
    std::complex<double> lambda1;  ///< decaying pair, Im >= 0
    std::complex<double> lambda2;  ///< conj(lambda1)
    double lambda3 = 0.0;          ///< real runaway root, >= 1/eta
};

CubicRoots cardano_roots(const ElasticParams& params);

/// Self-force coefficients: s(x, v) = beta omega^2 x - alpha v.
struct Coefficients {
    double beta = 0.0;
    double alpha = 0.0;  ///< [1/time]
};

Coefficients elastic_coefficients(const ElasticParams& params);

[[nodiscard]] inline double self_force_value(const Coefficients& c, const ElasticParams& params,
                                             double x, double v) {
    return c.beta * params.omega * params.omega * x - c.alpha * v;
}

/// Residual of the quasi-linear self-force PDE for the linear ansatz
/// s = s_beta omega^2 x - s_alpha v; zero for elastic_coefficients output.
double pde_residual(double s_beta, double s_alpha, const ElasticParams& params, double x,
                    double v);

/// Real part mu >= 0 (half the damping rate) and frequency nu >= 0 of the
/// decaying characteristic mode of the solution-iteration limit; selected so
/// that mu -> 0 as omega -> 0. Guarantees alpha = 2 mu.
struct CharRootConditions {
    double mu = 0.0;
    double nu = 0.0;
};

CharRootConditions char_root_conditions(const ElasticParams& params);

/// One sample of the characteristic flow of the self-force PDE.
struct FlowState {
    double xi = 0.0;
    double x = 0.0;
    double v = 0.0;
    double s = 0.0;
};

/// Integrates dx/dxi = v, dv/dxi = -omega^2 x + s, ds/dxi = s/eta + omega^2 v
/// exactly through the eigen-decomposition built from CubicRoots. The stiff
/// runaway mode lambda3 makes step-wise integration useless here.
std::vector<FlowState> characteristic_flow(const ElasticParams& params, double x0, double v0,
                                           double s0, double xi_span, int samples);

/// Fixed-point iteration of the radiation term, started from the Landau
/// approximation (beta_1, alpha_1) = (0, eta omega^2). Converges for
/// eta*omega below about 0.945; at eta*omega = 1 it cycles through three
/// states (including the zero self-force) and never converges.
IterationTrace iterate_radiation_term(const ElasticParams& params, int max_steps, double tol);

/// Complex envelope of the n-th solution iterate: z_n(t) = p_n(t) e^{i omega t} + c.c.
struct ComplexEnvelope {
    Polynomial<std::complex<double>> p;
};

/// Runs the solution iteration for steps 0..n with initial position a0 and
/// velocity h0. Each step solves pddot + 2 i omega pdot = source by a
/// polynomial particular solution plus the complex constant fixed by the two
/// real initial conditions.
std::vector<ComplexEnvelope> iterate_solution(const ElasticParams& params, double a0, double h0,
                                              int n);

double envelope_value(const ComplexEnvelope& env, const ElasticParams& params, double t);
double envelope_derivative(const ComplexEnvelope& env, const ElasticParams& params, double t);

/// Analytic solution of the reduced equation xddot = -(1-beta) omega^2 x - alpha xdot.
double reduced_solution(const ElasticParams& params, const Coefficients& c, double a0, double h0,
                        double t);
double reduced_solution_velocity(const ElasticParams& params, const Coefficients& c, double a0,
                                 double h0, double t);

}  // namespace backreaction::elastic
