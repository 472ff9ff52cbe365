#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "backreaction/cli/config.hpp"
#include "backreaction/cli/output.hpp"
#include "backreaction/constfield.hpp"
#include "backreaction/dynamics.hpp"
#include "backreaction/elastic.hpp"

namespace backreaction::cli {

namespace {

namespace cf = backreaction::constfield;
namespace el = backreaction::elastic;
namespace dyn = backreaction::dynamics;

FieldParams field_params(const RunConfig& cfg) {
    FieldParams p{cfg.e_vec, cfg.b_vec, cfg.eta};
    p.validate();
    return p;
}

ElasticParams elastic_params(const RunConfig& cfg) {
    ElasticParams p{cfg.omega, cfg.eta};
    p.validate();
    return p;
}

int status_exit_code(IterationStatus s) {
    switch (s) {
        case IterationStatus::converged: return kOk;
        case IterationStatus::oscillating: return kNoConvergence;
        case IterationStatus::diverged: return kBlowup;
        case IterationStatus::max_steps: return kMaxSteps;
    }
    return kUsage;
}

int sample_count(const RunConfig& cfg) {
    if (cfg.sample_dt > 0.0) {
        const double n = std::round(cfg.t_end / cfg.sample_dt) + 1.0;
        if (n < 2 || n > 5e7) throw std::invalid_argument("sample-dt yields unusable sample count");
        return static_cast<int>(n);
    }
    return cfg.samples;
}

// ---------------------------------------------------------------------------
// coeffs
// ---------------------------------------------------------------------------

int cmd_coeffs(const RunConfig& cfg) {
    Table t;
    nlohmann::json extra;
    if (cfg.system == "const-field") {
        const auto p = field_params(cfg);
        const auto c = cf::closed_form_coefficients(p);
        const auto root = cf::characteristic_root(p);
        const double b = p.b();
        const double ea = p.eta * c.alpha;
        const double r_beta = c.beta - 2.0 * ea * (1.0 - c.beta);
        const double r_alpha =
            c.alpha - (p.eta * (1.0 - c.beta) * (1.0 - c.beta) * b * b - ea * c.alpha);
        const double k2 = p.coupling() * p.coupling();
        const double r_quartic = 4.0 * k2 * c.phi * c.phi + c.phi - 1.0;
        t.columns = {"eta", "b", "phi", "beta", "alpha", "lambda_kernel",
                     "residual_fixed_point_beta", "residual_fixed_point_alpha",
                     "residual_quartic", "char_root_beta", "char_root_alpha",
                     "outside_iteration_regime", "branch"};
        t.rows.push_back({cfg.eta, b, c.phi, c.beta, c.alpha, c.lambda_kernel, r_beta, r_alpha,
                          r_quartic, root.beta, root.alpha,
                          static_cast<long long>(c.outside_iteration_regime ? 1 : 0),
                          std::string("vanishing-at-zero-field")});
        extra["residuals"] = {{"fixed_point_beta", r_beta},
                              {"fixed_point_alpha", r_alpha},
                              {"quartic", r_quartic}};
        extra["beta"] = c.beta;
        extra["alpha"] = c.alpha;
        extra["phi"] = c.phi;
    } else {
        const auto p = elastic_params(cfg);
        const auto c = el::elastic_coefficients(p);
        const auto roots = el::cardano_roots(p);
        const auto cr = el::char_root_conditions(p);
        const double ea = p.eta * c.alpha;
        const double k2 = p.coupling() * p.coupling();
        const double r_beta = c.beta - ea / (1.0 + ea);
        const double r_cubic = ea * (1.0 + ea) * (1.0 + ea) - k2;
        t.columns = {"eta", "omega", "beta", "alpha", "residual_relation_beta", "residual_cubic",
                     "lambda3", "mu", "nu", "branch"};
        t.rows.push_back({cfg.eta, cfg.omega, c.beta, c.alpha, r_beta, r_cubic, roots.lambda3,
                          cr.mu, cr.nu, std::string("vanishing-at-zero-field")});
        extra["residuals"] = {{"relation_beta", r_beta}, {"cubic", r_cubic}};
        extra["beta"] = c.beta;
        extra["alpha"] = c.alpha;
    }
    write_output(cfg, "coeffs", t, extra);
    return kOk;
}

// ---------------------------------------------------------------------------
// iterate
// ---------------------------------------------------------------------------

int iterate_term(const RunConfig& cfg) {
    IterationTrace trace;
    double beta_ref = 0.0, alpha_ref = 0.0;
    const bool constf = cfg.system == "const-field";
    if (constf) {
        const auto p = field_params(cfg);
        const auto c = cf::closed_form_coefficients(p);
        beta_ref = c.beta;
        alpha_ref = c.alpha;
        trace = cf::iterate_radiation_term(p, cfg.steps, cfg.tol);
    } else {
        const auto p = elastic_params(cfg);
        const auto c = el::elastic_coefficients(p);
        beta_ref = c.beta;
        alpha_ref = c.alpha;
        trace = el::iterate_radiation_term(p, cfg.steps, cfg.tol);
    }

    Table t;
    t.columns = {"n", "beta", "alpha"};
    if (constf) t.columns.insert(t.columns.end(), {"d_x", "d_y", "d_z"});
    t.columns.insert(t.columns.end(), {"delta_beta", "delta_alpha"});
    for (const auto& e : trace.entries) {
        std::vector<Cell> row{static_cast<long long>(e.step), e.beta, e.alpha};
        if (constf) row.insert(row.end(), {e.constant.x, e.constant.y, e.constant.z});
        row.insert(row.end(), {e.beta - beta_ref, e.alpha - alpha_ref});
        t.rows.push_back(std::move(row));
    }
    std::ostringstream status;
    status << "status: " << to_string(trace.status);
    if (trace.status == IterationStatus::oscillating) status << " period=" << trace.period;
    t.footers.push_back(status.str());

    nlohmann::json extra{{"status", to_string(trace.status)}, {"period", trace.period}};
    write_output(cfg, "iterate", t, extra);
    return status_exit_code(trace.status);
}

int iterate_solution(const RunConfig& cfg) {
    if (cfg.steps > 500)
        throw CLI::ValidationError("--steps",
                                   "iterate-solution grows one polynomial degree per step; "
                                   "use at most 500");
    Table t;
    t.columns = {"n", "deg_p", "deg_q", "rate_re", "rate_im", "delta_to_char_root"};
    double last_delta = std::numeric_limits<double>::infinity();
    const double t_probe = 1.0;

    if (cfg.system == "const-field") {
        RunConfig c2 = cfg;
        c2.e_vec = Vec3{};  // envelopes describe the shifted orthogonal channel
        const auto p = field_params(c2);
        const double b = p.b();
        const auto root = cf::characteristic_root(p);
        const auto envs = cf::iterate_solution_envelopes(p, cfg.steps);
        for (std::size_t n = 0; n < envs.size(); ++n) {
            const auto& e = envs[n];
            const std::complex<double> sigma =
                e.p.evaluate(t_probe) + std::complex<double>{0.0, b} * e.q.evaluate(t_probe);
            const std::complex<double> dsigma =
                e.p.derivative().evaluate(t_probe)
                + std::complex<double>{0.0, b} * e.q.derivative().evaluate(t_probe);
            const std::complex<double> rate = dsigma / sigma;
            const double delta = std::abs(rate - root.root);
            last_delta = delta;
            t.rows.push_back({static_cast<long long>(n), static_cast<long long>(e.p.degree()),
                              static_cast<long long>(e.q.degree()), rate.real(), rate.imag(),
                              delta});
        }
    } else {
        const auto p = elastic_params(cfg);
        if (p.omega == 0.0) throw std::invalid_argument("iterate-solution: use free-particle branch");
        const auto cr = el::char_root_conditions(p);
        const std::complex<double> target{-cr.mu, cr.nu};
        const auto envs = el::iterate_solution(p, cfg.x0.x, cfg.v0.x, cfg.steps);
        for (std::size_t n = 0; n < envs.size(); ++n) {
            const auto& e = envs[n];
            const std::complex<double> val = e.p.evaluate({t_probe, 0.0});
            const std::complex<double> dval = e.p.derivative().evaluate({t_probe, 0.0});
            const std::complex<double> rate =
                dval / val + std::complex<double>{0.0, p.omega};  // mode of z, not of p
            const double delta = std::abs(rate - target);
            last_delta = delta;
            t.rows.push_back({static_cast<long long>(n), static_cast<long long>(e.p.degree()),
                              static_cast<long long>(0), rate.real(), rate.imag(), delta});
        }
    }

    const bool converged = last_delta < cfg.tol;
    const std::string status = converged ? "converged" : "max-steps";
    t.footers.push_back("status: " + status);
    nlohmann::json extra{{"status", status}, {"final_delta", last_delta}};
    write_output(cfg, "iterate", t, extra);
    return converged ? kOk : kMaxSteps;
}

int cmd_iterate(const RunConfig& cfg) {
    if (cfg.method == "iterate-term") return iterate_term(cfg);
    if (cfg.method == "iterate-solution") return iterate_solution(cfg);
    throw CLI::ValidationError("--method", "iterate requires iterate-term or iterate-solution");
}

// ---------------------------------------------------------------------------
// trajectory
// ---------------------------------------------------------------------------

struct ReferenceFn {
    std::function<Vec3(double)> v;  // null when no reference is defined
};

ReferenceFn closed_form_reference(const RunConfig& cfg) {
    if (cfg.system == "const-field") {
        const auto p = field_params(cfg);
        const Vec3 c0 = cfg.v0;
        return {[p, c0](double t) { return cf::closed_form_trajectory(p, c0, t); }};
    }
    const auto p = elastic_params(cfg);
    const auto c = el::elastic_coefficients(p);
    const double a0 = cfg.x0.x, h0 = cfg.v0.x;
    return {[p, c, a0, h0](double t) {
        return Vec3{el::reduced_solution_velocity(p, c, a0, h0, t), 0.0, 0.0};
    }};
}

dyn::SelfForceFn select_self_force(const RunConfig& cfg) {
    if (cfg.system == "const-field") {
        const auto p = field_params(cfg);
        if (cfg.method == "landau")
            return dyn::landau_first_approximation(dyn::constant_field(p), p.eta);
        if (cfg.method == "iterate-term") {
            const auto trace = cf::iterate_radiation_term(p, cfg.steps, cfg.tol);
            const auto& e = trace.last();
            const LinearMap3 M = cross_map(p.b_vec) * (-e.beta)
                                 + (p.b() > 0 ? orthogonal_projector(p.b_vec) : LinearMap3::zero())
                                       * (-e.alpha);
            const Vec3 d = e.constant;
            return [M, d](const Vec3&, const Vec3& v) { return M * v + d; };
        }
        const auto s = cf::self_force(p);
        return [s](const Vec3&, const Vec3& v) { return s(v); };
    }
    const auto p = elastic_params(cfg);
    el::Coefficients c;
    if (cfg.method == "landau") {
        c = {0.0, p.eta * p.omega * p.omega};
    } else if (cfg.method == "iterate-term") {
        const auto trace = el::iterate_radiation_term(p, cfg.steps, cfg.tol);
        c = {trace.last().beta, trace.last().alpha};
    } else {
        c = el::elastic_coefficients(p);
    }
    const double w2 = p.omega * p.omega;
    return [c, w2](const Vec3& x, const Vec3& v) { return x * (c.beta * w2) - v * c.alpha; };
}

int cmd_trajectory(const RunConfig& cfg) {
    const int n = sample_count(cfg);
    const bool constf = cfg.system == "const-field";
    const dyn::ForceField field =
        constf ? dyn::constant_field(field_params(cfg)) : dyn::elastic_field(elastic_params(cfg));

    Table t;
    t.columns = {"t", "x_x", "x_y", "x_z", "v_x", "v_y", "v_z"};
    nlohmann::json extra;
    int exit_code = kOk;

    const ReferenceFn ref = closed_form_reference(cfg);
    double max_diff = 0.0;
    const auto push_row = [&](double time, const Vec3& x, const Vec3& v, const Vec3* a) {
        std::vector<Cell> row{time, x.x, x.y, x.z, v.x, v.y, v.z};
        if (a != nullptr) row.insert(row.end(), {a->x, a->y, a->z});
        if (cfg.compare) {
            const double d = (v - ref.v(time)).norm();
            max_diff = std::max(max_diff, d);
            row.push_back(d);
        }
        t.rows.push_back(std::move(row));
    };

    if (cfg.method == "closed-form") {
        if (cfg.compare) t.columns.push_back("diff_v");
        for (int i = 0; i < n; ++i) {
            const double time = cfg.t_end * i / (n - 1);
            if (constf) {
                const auto p = field_params(cfg);
                push_row(time, cf::closed_form_position(p, cfg.x0, cfg.v0, time),
                         cf::closed_form_trajectory(p, cfg.v0, time), nullptr);
            } else {
                const auto p = elastic_params(cfg);
                const auto c = el::elastic_coefficients(p);
                const double x = el::reduced_solution(p, c, cfg.x0.x, cfg.v0.x, time);
                const double v = el::reduced_solution_velocity(p, c, cfg.x0.x, cfg.v0.x, time);
                push_row(time, {x, 0, 0}, {v, 0, 0}, nullptr);
            }
        }
    } else if (cfg.method == "iterate-solution") {
        if (cfg.steps > 500)
            throw CLI::ValidationError("--steps",
                                       "iterate-solution grows one polynomial degree per step; "
                                       "use at most 500");
        if (cfg.compare) t.columns.push_back("diff_v");
        if (constf) {
            RunConfig c2 = cfg;
            c2.e_vec = Vec3{};
            const auto p = field_params(cfg);
            const auto envs = cf::iterate_solution_envelopes(field_params(c2), cfg.steps);
            const auto& env = envs.back();
            // x by composite trapezoid on the same grid; the envelope gives v only.
            Vec3 x = cfg.x0;
            Vec3 prev_v = cf::solution_iterate_velocity(p, env, cfg.v0, 0.0);
            for (int i = 0; i < n; ++i) {
                const double time = cfg.t_end * i / (n - 1);
                const Vec3 v = cf::solution_iterate_velocity(p, env, cfg.v0, time);
                if (i > 0) x += (v + prev_v) * (0.5 * cfg.t_end / (n - 1));
                prev_v = v;
                push_row(time, x, v, nullptr);
            }
        } else {
            const auto p = elastic_params(cfg);
            const auto envs = el::iterate_solution(p, cfg.x0.x, cfg.v0.x, cfg.steps);
            const auto& env = envs.back();
            for (int i = 0; i < n; ++i) {
                const double time = cfg.t_end * i / (n - 1);
                push_row(time, {el::envelope_value(env, p, time), 0, 0},
                         {el::envelope_derivative(env, p, time), 0, 0}, nullptr);
            }
        }
    } else if (cfg.method == "lorentz-dirac") {
        t.columns.insert(t.columns.end(), {"a_x", "a_y", "a_z"});
        if (cfg.compare) t.columns.push_back("diff_v");
        const double eta = cfg.eta;
        Vec3 a0;
        if (cfg.a0.has_value()) {
            a0 = *cfg.a0;
        } else {
            const dyn::SelfForceFn s = select_self_force(cfg);
            a0 = field.value(cfg.x0, cfg.v0) + s(cfg.x0, cfg.v0);
        }
        a0.x += cfg.perturb_a0;
        const std::string solver = cfg.solver.empty() ? "rosenbrock23" : cfg.solver;
        const auto traj = dyn::integrate_lorentz_dirac(field, {cfg.x0, cfg.v0, a0, 0.0}, eta,
                                                       cfg.t_end, cfg.tol, n, solver);
        for (const auto& s : traj.samples) push_row(s.t, s.x, s.v, &s.a);
        extra["termination"] = traj.termination;
        extra["solver"] = traj.solver;
        t.comments.push_back("solver: " + traj.solver);
        if (traj.termination == "runaway") {
            extra["runaway_time"] = traj.runaway_time;
            exit_code = kBlowup;
            t.footers.push_back("runaway_time: " + format_double(traj.runaway_time));
        }
        t.footers.push_back("termination: " + traj.termination);
    } else {  // landau / iterate-term: reduced integration with the selected self-force
        if (cfg.compare) t.columns.push_back("diff_v");
        const dyn::SelfForceFn s = select_self_force(cfg);
        const std::string solver = cfg.solver.empty() ? "dopri5" : cfg.solver;
        const auto traj =
            dyn::integrate_reduced(field, s, cfg.x0, cfg.v0, cfg.t_end, cfg.tol, n, solver);
        for (const auto& smp : traj.samples) push_row(smp.t, smp.x, smp.v, nullptr);
        extra["solver"] = traj.solver;
        t.comments.push_back("solver: " + traj.solver);
    }

    if (cfg.compare) {
        extra["max_diff_v"] = max_diff;
        t.footers.push_back("max_diff_v: " + format_double(max_diff));
    }
    write_output(cfg, "trajectory", t, extra);
    return exit_code;
}

// ---------------------------------------------------------------------------
// residual
// ---------------------------------------------------------------------------

int cmd_residual(const RunConfig& cfg) {
    double max_r = 0.0, mean_r = 0.0;
    long long count = 0;
    const double bound = cfg.bound.value_or(cfg.on_trajectory ? 1e-5 : 1e-12);
    std::mt19937 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    if (cfg.on_trajectory) {
        const bool constf = cfg.system == "const-field";
        const dyn::ForceField field = constf ? dyn::constant_field(field_params(cfg))
                                             : dyn::elastic_field(elastic_params(cfg));
        const dyn::SelfForceFn s = select_self_force(cfg);
        const double dt = cfg.sample_dt > 0.0 ? cfg.sample_dt : 1e-3;
        const int n = static_cast<int>(std::round(cfg.t_end / dt)) + 1;
        const auto traj =
            dyn::integrate_reduced(field, s, cfg.x0, cfg.v0, cfg.t_end, cfg.tol, n);
        max_r = dyn::third_derivative_residual(traj, s, cfg.eta);
        mean_r = max_r;  // the trajectory estimator reports the max only
        count = static_cast<long long>(traj.samples.size());
    } else if (cfg.system == "const-field") {
        const auto p = field_params(cfg);
        cf::SelfForceAffine s;
        if (cfg.method == "landau") {
            const LinearMap3 B = cross_map(p.b_vec);
            s.linear = B * B * p.eta;
            s.constant = B * p.e_vec * p.eta;
        } else {
            s = cf::self_force(p);
        }
        for (int i = 0; i < cfg.residual_samples; ++i) {
            const Vec3 v{uni(rng), uni(rng), uni(rng)};
            const double r = cf::pde_residual(s, p, v).norm();
            max_r = std::max(max_r, r);
            mean_r += r;
            ++count;
        }
        mean_r /= static_cast<double>(count);
    } else {
        const auto p = elastic_params(cfg);
        el::Coefficients c = cfg.method == "landau"
                                 ? el::Coefficients{0.0, p.eta * p.omega * p.omega}
                                 : el::elastic_coefficients(p);
        for (int i = 0; i < cfg.residual_samples; ++i) {
            const double x = uni(rng), v = uni(rng);
            const double r = std::abs(el::pde_residual(c.beta, c.alpha, p, x, v));
            max_r = std::max(max_r, r);
            mean_r += r;
            ++count;
        }
        mean_r /= static_cast<double>(count);
    }

    const bool pass = max_r < bound;
    Table t;
    t.comments.push_back(std::string("mode: ") + (cfg.on_trajectory ? "trajectory" : "grid"));
    t.columns = {"samples", "max_residual", "mean_residual", "bound", "pass"};
    t.rows.push_back({count, max_r, mean_r, bound, static_cast<long long>(pass ? 1 : 0)});
    nlohmann::json extra{{"max_residual", max_r},
                         {"mean_residual", mean_r},
                         {"bound", bound},
                         {"pass", pass},
                         {"mode", cfg.on_trajectory ? "trajectory" : "grid"}};
    write_output(cfg, "residual", t, extra);
    return pass ? kOk : kNoConvergence;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

int cmd_sweep(const RunConfig& cfg) {
    std::string param = cfg.sweep_param;
    if (param.empty()) param = cfg.system == "elastic" ? "omega" : "b";
    if ((cfg.system == "elastic" && param != "omega")
        || (cfg.system == "const-field" && param != "b"))
        throw CLI::ValidationError("--param", "sweep parameter must match the system");
    if (cfg.sweep_count < 1) throw CLI::ValidationError("--count", "need at least one point");

    struct Row {
        double value = 0.0;
        double beta_closed = 0.0, alpha_closed = 0.0;
        std::string status;
        int period = 0;
        long long steps_used = 0;
        double beta_iter = 0.0, alpha_iter = 0.0;
        double beta_char = 0.0, alpha_char = 0.0;
    };
    std::vector<Row> rows(static_cast<std::size_t>(cfg.sweep_count));

    Vec3 b_dir{0.0, 0.0, 1.0};
    if (cfg.b_vec.norm() > 0.0) b_dir = cfg.b_vec / cfg.b_vec.norm();

    const auto compute = [&](std::size_t idx) {
        const double value =
            cfg.sweep_count == 1
                ? cfg.sweep_from
                : cfg.sweep_from
                      + (cfg.sweep_to - cfg.sweep_from) * static_cast<double>(idx)
                            / (cfg.sweep_count - 1);
        Row r;
        r.value = value;
        if (cfg.system == "const-field") {
            FieldParams p{cfg.e_vec, b_dir * value, cfg.eta};
            const auto c = cf::closed_form_coefficients(p);
            const auto root = cf::characteristic_root(p);
            const auto trace = cf::iterate_radiation_term(p, cfg.steps, cfg.tol);
            r.beta_closed = c.beta;
            r.alpha_closed = c.alpha;
            r.beta_char = root.beta;
            r.alpha_char = root.alpha;
            r.status = to_string(trace.status);
            r.period = trace.period;
            r.steps_used = static_cast<long long>(trace.entries.size());
            r.beta_iter = trace.last().beta;
            r.alpha_iter = trace.last().alpha;
        } else {
            ElasticParams p{value, cfg.eta};
            const auto c = el::elastic_coefficients(p);
            const auto cr = el::char_root_conditions(p);
            const auto trace = el::iterate_radiation_term(p, cfg.steps, cfg.tol);
            r.beta_closed = c.beta;
            r.alpha_closed = c.alpha;
            r.alpha_char = 2.0 * cr.mu;
            r.beta_char = p.omega > 0.0
                              ? 1.0 - (cr.nu * cr.nu + cr.mu * cr.mu) / (p.omega * p.omega)
                              : 0.0;
            r.status = to_string(trace.status);
            r.period = trace.period;
            r.steps_used = static_cast<long long>(trace.entries.size());
            r.beta_iter = trace.last().beta;
            r.alpha_iter = trace.last().alpha;
        }
        rows[idx] = std::move(r);
    };

    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) compute(i);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w)
            workers.emplace_back([&, w] {
                for (std::size_t i = static_cast<std::size_t>(w); i < rows.size();
                     i += static_cast<std::size_t>(jobs))
                    compute(i);
            });
        for (auto& th : workers) th.join();
    }

    Table t;
    t.columns = {param,        "beta_closed", "alpha_closed", "status",     "period",
                 "steps_used", "beta_iter",   "alpha_iter",   "beta_char",  "alpha_char",
                 "delta_iter", "delta_char"};
    for (const auto& r : rows) {
        const double delta_iter =
            std::max(std::abs(r.beta_iter - r.beta_closed), std::abs(r.alpha_iter - r.alpha_closed));
        const double delta_char =
            std::max(std::abs(r.beta_char - r.beta_closed), std::abs(r.alpha_char - r.alpha_closed));
        t.rows.push_back({r.value, r.beta_closed, r.alpha_closed, r.status,
                          static_cast<long long>(r.period), r.steps_used, r.beta_iter,
                          r.alpha_iter, r.beta_char, r.alpha_char, delta_iter, delta_char});
    }
    t.comments.push_back("param: " + param);
    nlohmann::json extra{{"param", param}, {"count", cfg.sweep_count}};
    write_output(cfg, "sweep", t, extra);
    return kOk;
}

// ---------------------------------------------------------------------------
// argument plumbing
// ---------------------------------------------------------------------------

void add_common_options(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
    sub->add_option("--config", config_path, "flat key=value config file");
    sub->add_option("--system", cfg.system)->check(CLI::IsMember({"const-field", "elastic"}));
    sub->add_option("--eta", cfg.eta);
    sub->add_option("--omega", cfg.omega);
    sub->add_option("--e", [&cfg](const std::vector<std::string>& vals) {
            cfg.e_vec = Vec3{std::stod(vals[0]), std::stod(vals[1]), std::stod(vals[2])};
            return true;
        }, "electric acceleration vector")->expected(3);
    sub->add_option("--b", [&cfg](const std::vector<std::string>& vals) {
            cfg.b_vec = Vec3{std::stod(vals[0]), std::stod(vals[1]), std::stod(vals[2])};
            return true;
        }, "gyro-frequency vector")->expected(3);
    sub->add_option("--method", cfg.method)
        ->check(CLI::IsMember(
            {"closed-form", "iterate-term", "iterate-solution", "landau", "lorentz-dirac"}));
    sub->add_option("--steps", cfg.steps);
    sub->add_option("--tol", cfg.tol);
    sub->add_option("--t-end", cfg.t_end);
    sub->add_option("--samples", cfg.samples);
    sub->add_option("--sample-dt", cfg.sample_dt);
    sub->add_option("--x0", [&cfg](const std::vector<std::string>& vals) {
            cfg.x0 = Vec3{std::stod(vals[0]), std::stod(vals[1]), std::stod(vals[2])};
            return true;
        })->expected(3);
    sub->add_option("--v0", [&cfg](const std::vector<std::string>& vals) {
            cfg.v0 = Vec3{std::stod(vals[0]), std::stod(vals[1]), std::stod(vals[2])};
            return true;
        })->expected(3);
    sub->add_option("--a0", [&cfg](const std::vector<std::string>& vals) {
            cfg.a0 = Vec3{std::stod(vals[0]), std::stod(vals[1]), std::stod(vals[2])};
            return true;
        })->expected(3);
    sub->add_option("--perturb-a0", cfg.perturb_a0);
    sub->add_option("--residual-samples", cfg.residual_samples);
    sub->add_option("--bound", [&cfg](const std::vector<std::string>& vals) {
            cfg.bound = std::stod(vals[0]);
            return true;
        });
    sub->add_flag("--on-trajectory", cfg.on_trajectory);
    sub->add_option("--solver", cfg.solver)->check(CLI::IsMember({"dopri5", "rosenbrock23"}));
    sub->add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out);
    sub->add_flag("--no-timestamp", cfg.no_timestamp);
    sub->add_option("--seed", cfg.seed);
    sub->add_flag("--compare", cfg.compare);
    sub->add_option("--param", cfg.sweep_param);
    sub->add_option("--from", cfg.sweep_from);
    sub->add_option("--to", cfg.sweep_to);
    sub->add_option("--count", cfg.sweep_count);
    sub->add_option("--jobs", cfg.jobs);
}

/// Configuration precedence: command-line flags > config file > defaults.
/// The config file comes from --config or the BACKREACTION_CONFIG variable.
void preload_config(RunConfig& cfg, const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) {
        if (const char* env = std::getenv("BACKREACTION_CONFIG")) path = env;
    }
    if (path.empty()) return;
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config file: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    apply_config(cfg, parse_config_text(buf.str()));
}

}  // namespace

int run(const std::vector<std::string>& args) {
    RunConfig cfg;
    std::string config_path;

    CLI::App app{"radiation back-reaction: coefficients, iterations, trajectories, residuals"};
    app.require_subcommand(1);
    CLI::App* coeffs = app.add_subcommand("coeffs", "closed-form self-force coefficients");
    CLI::App* iterate = app.add_subcommand("iterate", "fixed-point iteration table");
    CLI::App* trajectory = app.add_subcommand("trajectory", "sampled trajectory");
    CLI::App* residual = app.add_subcommand("residual", "self-force PDE / jerk residual report");
    CLI::App* sweep = app.add_subcommand("sweep", "coupling sweep of all three methods");
    for (CLI::App* sub : {coeffs, iterate, trajectory, residual, sweep})
        add_common_options(sub, cfg, config_path);

    try {
        preload_config(cfg, args);
        // CLI11 wants argv in reverse order for its vector-parse entry point.
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(std::move(rev));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help() << std::endl;
            return kOk;
        }
        std::cerr << "usage error: " << e.what() << std::endl;
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << std::endl;
        return kUsage;
    }

    try {
        if (coeffs->parsed()) return cmd_coeffs(cfg);
        if (iterate->parsed()) return cmd_iterate(cfg);
        if (trajectory->parsed()) return cmd_trajectory(cfg);
        if (residual->parsed()) return cmd_residual(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg);
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << std::endl;
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << std::endl;
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kBlowup;
    }
    return kUsage;
}

}  // namespace backreaction::cli
