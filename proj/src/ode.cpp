#include "backreaction/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace backreaction::ode {

namespace {

double error_norm(std::span<const double> err, std::span<const double> y0,
                  std::span<const double> y1, const Options& opts) {
    double sum = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double sc = opts.atol + opts.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double e = err[i] / sc;
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(err.size()));
}

double initial_step(double span, const Options& opts) {
    if (opts.fixed_h > 0.0) return opts.fixed_h;
    double h = span / 100.0;
    if (opts.h_max > 0.0) h = std::min(h, opts.h_max);
    return h;
}

double clamp_step(double h, double h_max, double remaining) {
    if (h_max > 0.0) h = std::min(h, h_max);
    return std::min(h, remaining);
}

void check_times(std::span<const double> t_out) {
    if (t_out.size() < 2) throw std::invalid_argument("ode: need at least two output times");
    for (std::size_t i = 1; i < t_out.size(); ++i)
        if (!(t_out[i] > t_out[i - 1]))
            throw std::invalid_argument("ode: output times must be strictly increasing");
}

/// In-place LU with partial pivoting; solve overwriting b.
class Lu {
  public:
    explicit Lu(std::vector<double> a, std::size_t n) : a_(std::move(a)), piv_(n), n_(n) {
        for (std::size_t col = 0; col < n_; ++col) {
            std::size_t p = col;
            for (std::size_t row = col + 1; row < n_; ++row)
                if (std::abs(at(row, col)) > std::abs(at(p, col))) p = row;
            piv_[col] = p;
            if (p != col)
                for (std::size_t j = 0; j < n_; ++j) std::swap(at(p, j), at(col, j));
            const double d = at(col, col);
            if (d == 0.0) throw std::runtime_error("ode: singular iteration matrix");
            for (std::size_t row = col + 1; row < n_; ++row) {
                const double f = at(row, col) / d;
                at(row, col) = f;
                for (std::size_t j = col + 1; j < n_; ++j) at(row, j) -= f * at(col, j);
            }
        }
    }

    void solve(std::span<double> b) const {
        for (std::size_t col = 0; col < n_; ++col) {
            std::swap(b[piv_[col]], b[col]);
            for (std::size_t row = col + 1; row < n_; ++row) b[row] -= at(row, col) * b[col];
        }
        for (std::size_t col = n_; col-- > 0;) {
            b[col] /= at(col, col);
            for (std::size_t row = 0; row < col; ++row) b[row] -= at(row, col) * b[col];
        }
    }

  private:
    double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    std::vector<double> a_;
    std::vector<std::size_t> piv_;
    std::size_t n_;
};

}  // namespace

Result dopri5(const Rhs& f, std::span<const double> y0, std::span<const double> t_out,
              const Options& opts, const Observer& observer) {
    check_times(t_out);
    const std::size_t n = y0.size();
    std::vector<double> y(y0.begin(), y0.end());
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);

    Result res;
    if (!observer(t_out[0], y)) {
        res.status = Status::observer_stop;
        return res;
    }

    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                     e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                     e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    double t = t_out[0];
    double h = initial_step(t_out.back() - t_out.front(), opts);
    f(t, y, k1);
    bool fsal_valid = true;

    for (std::size_t seg = 1; seg < t_out.size(); ++seg) {
        const double t_target = t_out[seg];
        while (t < t_target) {
            if (res.accepted + res.rejected > opts.max_steps) {
                res.status = Status::too_many_steps;
                return res;
            }
            const double h_try = (opts.fixed_h > 0.0)
                                     ? std::min(opts.fixed_h, t_target - t)
                                     : clamp_step(h, opts.h_max, t_target - t);
            if (!(h_try > std::abs(t) * 1e-15 + 1e-300)) {
                res.status = Status::step_underflow;
                return res;
            }
            if (!fsal_valid) f(t, y, k1);

            for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h_try * a21 * k1[i];
            f(t + h_try / 5.0, ytmp, k2);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h_try * (a31 * k1[i] + a32 * k2[i]);
            f(t + 3.0 * h_try / 10.0, ytmp, k3);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h_try * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            f(t + 4.0 * h_try / 5.0, ytmp, k4);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h_try * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            f(t + 8.0 * h_try / 9.0, ytmp, k5);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i]
                          + h_try * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i]
                                     + a65 * k5[i]);
            f(t + h_try, ytmp, k6);
            for (std::size_t i = 0; i < n; ++i)
                ynew[i] = y[i]
                          + h_try * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i]
                                     + b6 * k6[i]);
            f(t + h_try, ynew, k7);

            if (opts.fixed_h > 0.0) {
                y = ynew;
                k1 = k7;
                fsal_valid = true;
                t += h_try;
                ++res.accepted;
                continue;
            }

            for (std::size_t i = 0; i < n; ++i)
                err[i] = h_try
                         * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i]
                            + e7 * k7[i]);
            const double enorm = error_norm(err, y, ynew, opts);
            if (std::isfinite(enorm) && enorm <= 1.0) {
                t += h_try;
                y = ynew;
                k1 = k7;
                fsal_valid = true;
                ++res.accepted;
                const double grow = std::isfinite(enorm) && enorm > 0.0
                                        ? 0.9 * std::pow(enorm, -0.2)
                                        : 5.0;
                h = h_try * std::clamp(grow, 0.2, 5.0);
            } else {
                ++res.rejected;
                fsal_valid = false;
                const double shrink = std::isfinite(enorm) ? 0.9 * std::pow(enorm, -0.2) : 0.1;
                h = h_try * std::clamp(shrink, 0.1, 0.9);
            }
        }
        if (!observer(t_target, y)) {
            res.status = Status::observer_stop;
            return res;
        }
    }
    return res;
}

Result rosenbrock23(const Rhs& f, const Jacobian& jac, std::span<const double> y0,
                    std::span<const double> t_out, const Options& opts,
                    const Observer& observer) {
    check_times(t_out);
    const std::size_t n = y0.size();
    std::vector<double> y(y0.begin(), y0.end());
    std::vector<double> f0(n), f1(n), f2(n), k1(n), k2(n), k3(n), ytmp(n), ynew(n), err(n);
    std::vector<double> J(n * n), W(n * n);

    const double d = 1.0 / (2.0 + std::sqrt(2.0));
    const double e32 = 6.0 + std::sqrt(2.0);

    Result res;
    if (!observer(t_out[0], y)) {
        res.status = Status::observer_stop;
        return res;
    }

    double t = t_out[0];
    double h = initial_step((t_out.back() - t_out.front()) / 10.0, opts);

    for (std::size_t seg = 1; seg < t_out.size(); ++seg) {
        const double t_target = t_out[seg];
        while (t < t_target) {
            if (res.accepted + res.rejected > opts.max_steps) {
                res.status = Status::too_many_steps;
                return res;
            }
            const double h_try = (opts.fixed_h > 0.0)
                                     ? std::min(opts.fixed_h, t_target - t)
                                     : clamp_step(h, opts.h_max, t_target - t);
            if (!(h_try > std::abs(t) * 1e-15 + 1e-300)) {
                res.status = Status::step_underflow;
                return res;
            }

            f(t, y, f0);
            jac(t, y, J);
            for (std::size_t i = 0; i < n * n; ++i) W[i] = -h_try * d * J[i];
            for (std::size_t i = 0; i < n; ++i) W[i * n + i] += 1.0;
            const Lu lu(W, n);

            k1 = f0;
            lu.solve(k1);
            for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * h_try * k1[i];
            f(t + 0.5 * h_try, ytmp, f1);
            for (std::size_t i = 0; i < n; ++i) k2[i] = f1[i] - k1[i];
            lu.solve(k2);
            for (std::size_t i = 0; i < n; ++i) k2[i] += k1[i];
            for (std::size_t i = 0; i < n; ++i) ynew[i] = y[i] + h_try * k2[i];
            f(t + h_try, ynew, f2);
            for (std::size_t i = 0; i < n; ++i)
                k3[i] = f2[i] - e32 * (k2[i] - f1[i]) - 2.0 * (k1[i] - f0[i]);
            lu.solve(k3);

            if (opts.fixed_h > 0.0) {
                y = ynew;
                t += h_try;
                ++res.accepted;
                continue;
            }

            for (std::size_t i = 0; i < n; ++i)
                err[i] = (h_try / 6.0) * (k1[i] - 2.0 * k2[i] + k3[i]);
            const double enorm = error_norm(err, y, ynew, opts);
            if (std::isfinite(enorm) && enorm <= 1.0) {
                t += h_try;
                y = ynew;
                ++res.accepted;
                const double grow = enorm > 0.0 ? 0.9 * std::pow(enorm, -1.0 / 3.0) : 5.0;
                h = h_try * std::clamp(grow, 0.2, 5.0);
            } else {
                ++res.rejected;
                const double shrink =
                    std::isfinite(enorm) ? 0.9 * std::pow(enorm, -1.0 / 3.0) : 0.1;
                h = h_try * std::clamp(shrink, 0.1, 0.9);
            }
        }
        if (!observer(t_target, y)) {
            res.status = Status::observer_stop;
            return res;
        }
    }
    return res;
}

namespace {

Jacobian finite_difference_jacobian(const Rhs& f) {
    return [f](double t, std::span<const double> y, std::span<double> J) {
        const std::size_t n = y.size();
        std::vector<double> yp(y.begin(), y.end()), ym(y.begin(), y.end());
        std::vector<double> fp(n), fm(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double h = std::max(1e-7, 1e-7 * std::abs(y[j]));
            yp[j] = y[j] + h;
            ym[j] = y[j] - h;
            f(t, yp, fp);
            f(t, ym, fm);
            for (std::size_t i = 0; i < n; ++i) J[i * n + j] = (fp[i] - fm[i]) / (2.0 * h);
            yp[j] = y[j];
            ym[j] = y[j];
        }
    };
}

}  // namespace

Result integrate(std::string_view solver, const Rhs& f, const Jacobian* jac,
                 std::span<const double> y0, std::span<const double> t_out, const Options& opts,
                 const Observer& observer) {
    if (solver == "dopri5") return dopri5(f, y0, t_out, opts, observer);
    if (solver == "rosenbrock23") {
        if (jac != nullptr && *jac) return rosenbrock23(f, *jac, y0, t_out, opts, observer);
        const Jacobian fd = finite_difference_jacobian(f);
        return rosenbrock23(f, fd, y0, t_out, opts, observer);
    }
    throw std::invalid_argument("unknown solver: " + std::string(solver));
}

}  // namespace backreaction::ode
