#include "backreaction/elastic.hpp"

#include <cmath>
#include <stdexcept>

namespace backreaction::elastic {

CubicRoots cardano_roots(const ElasticParams& params) {
    params.validate();
    const double eta = params.eta;
    const double c = eta * eta * params.omega * params.omega;

    CubicRoots r;
    r.rho_plus = std::cbrt(c / 2.0 + 1.0 / 27.0 + std::sqrt(c * c / 4.0 + c / 27.0));
    r.rho_minus = 1.0 / (9.0 * r.rho_plus);
    const double sum = r.rho_plus + r.rho_minus;
    const double diff = r.rho_plus - r.rho_minus;
    r.lambda1 = {(1.0 / 3.0 - sum / 2.0) / eta, std::sqrt(3.0) * diff / (2.0 * eta)};
    r.lambda2 = std::conj(r.lambda1);
    r.lambda3 = (1.0 / 3.0 + sum) / eta;
    return r;
}

Coefficients elastic_coefficients(const ElasticParams& params) {
    params.validate();
    if (params.omega == 0.0) return {0.0, 0.0};
    const CubicRoots r = cardano_roots(params);
    const double eta_alpha = -2.0 / 3.0 + r.rho_plus + r.rho_minus;
    return {eta_alpha / (1.0 + eta_alpha), eta_alpha / params.eta};
}

double pde_residual(double s_beta, double s_alpha, const ElasticParams& params, double x,
                    double v) {
    const double w2 = params.omega * params.omega;
    const double s = s_beta * w2 * x - s_alpha * v;
    const double ds_dx = s_beta * w2;
    const double ds_dv = -s_alpha;
    return s - params.eta * (-w2 * v + ds_dx * v + ds_dv * (-w2 * x + s));
}

CharRootConditions char_root_conditions(const ElasticParams& params) {
    params.validate();
    const double t = params.coupling() * params.coupling();  // (eta omega)^2
    // Real root of 8 Y^3 + 8 Y^2 + 2 Y = (eta omega)^2 with Y = eta mu;
    // monotone for Y >= 0, so Newton from the leading-order seed is safe.
    double y = t / 2.0;
    for (int i = 0; i < 64; ++i) {
        const double f = ((8.0 * y + 8.0) * y + 2.0) * y - t;
        const double fp = (24.0 * y + 16.0) * y + 2.0;
        const double step = f / fp;
        y -= step;
        if (std::abs(step) <= 1e-17 * (1.0 + std::abs(y))) break;
    }
    CharRootConditions out;
    out.mu = y / params.eta;
    out.nu = std::sqrt(std::max(0.0, 3.0 * out.mu * out.mu + 2.0 * out.mu / params.eta));
    return out;
}

std::vector<FlowState> characteristic_flow(const ElasticParams& params, double x0, double v0,
                                           double s0, double xi_span, int samples) {
    params.validate();
    if (samples < 2) throw std::invalid_argument("characteristic_flow: need at least 2 samples");

    std::vector<FlowState> out;
    out.reserve(static_cast<std::size_t>(samples));
    const double eta = params.eta;
    const double w2 = params.omega * params.omega;

    if (params.omega == 0.0) {
        // Degenerate pair of zero roots: solve directly.
        for (int i = 0; i < samples; ++i) {
            const double xi = xi_span * i / (samples - 1);
            const double g = std::expm1(xi / eta);
            const double s = s0 * (1.0 + g);
            const double v = v0 + eta * s0 * g;
            const double x = x0 + v0 * xi + eta * s0 * (eta * g - xi);
            out.push_back({xi, x, v, s});
        }
        return out;
    }

    const CubicRoots r = cardano_roots(params);
    // State = a1 e^{l1 xi} (1, l1, l1^2 + w^2) + c.c. + a3 e^{l3 xi} (1, l3, l3^2 + w^2).
    // Solve the 3x3 real system for (Re a1, Im a1, a3).
    const std::complex<double> l1 = r.lambda1;
    const std::complex<double> w1 = l1 * l1 + w2;
    const double l3 = r.lambda3;
    const double w3 = l3 * l3 + w2;

    double A[3][4] = {{2.0, 0.0, 1.0, x0},
                      {2.0 * l1.real(), -2.0 * l1.imag(), l3, v0},
                      {2.0 * w1.real(), -2.0 * w1.imag(), w3, s0}};
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(A[row][col]) > std::abs(A[piv][col])) piv = row;
        std::swap(A[piv], A[col]);
        for (int row = col + 1; row < 3; ++row) {
            const double f = A[row][col] / A[col][col];
            for (int j = col; j < 4; ++j) A[row][j] -= f * A[col][j];
        }
    }
    double sol[3];
    for (int row = 2; row >= 0; --row) {
        double s = A[row][3];
        for (int j = row + 1; j < 3; ++j) s -= A[row][j] * sol[j];
        sol[row] = s / A[row][row];
    }
    const std::complex<double> a1{sol[0], sol[1]};
    const double a3 = sol[2];

    for (int i = 0; i < samples; ++i) {
        const double xi = xi_span * i / (samples - 1);
        const std::complex<double> e1 = std::exp(l1 * xi);
        const double e3 = std::exp(l3 * xi);
        const double x = 2.0 * (a1 * e1).real() + a3 * e3;
        const double v = 2.0 * (l1 * a1 * e1).real() + l3 * a3 * e3;
        const double s = 2.0 * (w1 * a1 * e1).real() + w3 * a3 * e3;
        out.push_back({xi, x, v, s});
    }
    return out;
}

IterationTrace iterate_radiation_term(const ElasticParams& params, int max_steps, double tol) {
    params.validate();
    if (max_steps < 1) throw std::invalid_argument("iterate_radiation_term: max_steps must be >= 1");

    IterationTrace trace;
    if (params.omega == 0.0) {
        trace.entries.push_back({1, 0.0, 0.0, {}});
        trace.status = IterationStatus::converged;
        return trace;
    }

    const double eta = params.eta;
    const double t = params.coupling() * params.coupling();  // (eta omega)^2
    ConvergenceMonitor monitor(tol);
    double beta = 0.0;
    double ea = t;  // eta * alpha_1 from the Landau term -eta omega^2 v

    for (int n = 1; n <= max_steps; ++n) {
        trace.entries.push_back({n, beta, ea / eta, {}});
        const double vals[2] = {beta, ea};
        trace.status = monitor.push(std::span<const double>(vals, 2));
        trace.period = monitor.period();
        if (trace.status != IterationStatus::max_steps) return trace;
        if (n == max_steps) break;

        const double beta_next = ea * (1.0 - beta);
        const double ea_next = t * (1.0 - beta) - ea * ea;
        beta = beta_next;
        ea = ea_next;
    }
    trace.status = IterationStatus::max_steps;
    return trace;
}

std::vector<ComplexEnvelope> iterate_solution(const ElasticParams& params, double a0, double h0,
                                              int n) {
    params.validate();
    if (params.omega == 0.0)
        throw std::invalid_argument("iterate_solution: use free-particle branch");
    if (n < 0) throw std::invalid_argument("iterate_solution: n must be >= 0");

    using C = std::complex<double>;
    using Poly = Polynomial<C>;
    const double w = params.omega;
    const double eta = params.eta;
    const C i{0.0, 1.0};

    std::vector<ComplexEnvelope> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back({Poly{C{a0 / 2.0, -h0 / (2.0 * w)}}});

    for (int k = 1; k <= n; ++k) {
        const Poly& p = out.back().p;
        const Poly dp = p.derivative();
        const Poly ddp = dp.derivative();
        const Poly dddp = ddp.derivative();
        // Source eta (pddd + 3 i w pdd - 3 w^2 pd - i w^3 p) of the step equation
        // pddot + 2 i w pdot = source.
        const Poly source = (dddp + ddp * (C{0.0, 3.0 * w}) - dp * C{3.0 * w * w, 0.0}
                             - p * (C{0.0, w * w * w})) * C{eta, 0.0};

        // Polynomial particular solution of udot + 2 i w u = source:
        // u = sum_k (-1)^k source^{(k)} / (2 i w)^{k+1}, a finite sum.
        const C fac = 1.0 / (2.0 * i * w);
        Poly u;
        Poly term = source;
        C coef = fac;
        while (true) {
            u = u + term * coef;
            if (term.degree() <= 0) break;
            term = term.derivative();
            coef = coef * (-fac);
        }
        Poly particular = u.antiderivative(C{0.0, 0.0});

        // Fix the homogeneous complex constant from z(0) = a0, zdot(0) = h0:
        // z(0) = 2 Re p(0), zdot(0) = 2 Re(pdot(0) + i w p(0)).
        const C p0 = particular.coefficient(0);       // = 0
        const C dp0 = particular.coefficient(1);
        const double re_c = a0 / 2.0 - p0.real();
        const double im_c = (dp0.real() - h0 / 2.0) / w - p0.imag();
        out.push_back({particular + Poly{C{re_c, im_c}}});
    }
    return out;
}

double envelope_value(const ComplexEnvelope& env, const ElasticParams& params, double t) {
    const std::complex<double> phase = std::exp(std::complex<double>{0.0, params.omega * t});
    return 2.0 * (env.p.evaluate({t, 0.0}) * phase).real();
}

double envelope_derivative(const ComplexEnvelope& env, const ElasticParams& params, double t) {
    const std::complex<double> phase = std::exp(std::complex<double>{0.0, params.omega * t});
    const std::complex<double> val = env.p.evaluate({t, 0.0});
    const std::complex<double> dval = env.p.derivative().evaluate({t, 0.0});
    return 2.0 * ((dval + std::complex<double>{0.0, params.omega} * val) * phase).real();
}

namespace {

struct DampedMode {
    double decay;  // alpha / 2
    double nu;
    double A;
    double B;
};

DampedMode damped_mode(const ElasticParams& params, const Coefficients& c, double a0, double h0) {
    const double w2 = params.omega * params.omega;
    const double decay = c.alpha / 2.0;
    const double nu = std::sqrt((1.0 - c.beta) * w2 - decay * decay);
    return {decay, nu, a0, (h0 + decay * a0) / nu};
}

}  // namespace

double reduced_solution(const ElasticParams& params, const Coefficients& c, double a0, double h0,
                        double t) {
    if (params.omega == 0.0) return a0 + h0 * t;
    const DampedMode m = damped_mode(params, c, a0, h0);
    return std::exp(-m.decay * t) * (m.A * std::cos(m.nu * t) + m.B * std::sin(m.nu * t));
}

double reduced_solution_velocity(const ElasticParams& params, const Coefficients& c, double a0,
                                 double h0, double t) {
    if (params.omega == 0.0) return h0;
    const DampedMode m = damped_mode(params, c, a0, h0);
    const double cs = std::cos(m.nu * t);
    const double sn = std::sin(m.nu * t);
    return std::exp(-m.decay * t)
           * (-m.decay * (m.A * cs + m.B * sn) + m.nu * (m.B * cs - m.A * sn));
}

}  // namespace backreaction::elastic
