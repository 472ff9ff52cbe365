#pragma once

// Test-only oracles, independent of the library implementation paths they
// check: bisection root finding, a plain fixed-step RK4 integrator, a general
// complex cubic solver, and a tiny linear least-squares helper.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// Bisection on [lo, hi]; f(lo) and f(hi) must bracket a root.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     int iters = 200) {
    double flo = f(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Classic fixed-step RK4 for small systems.
template <std::size_t N>
std::array<double, N> rk4(const std::function<std::array<double, N>(double, const std::array<double, N>&)>& f,
                          std::array<double, N> y, double t0, double t1, int steps) {
    const double h = (t1 - t0) / steps;
    double t = t0;
    for (int i = 0; i < steps; ++i) {
        const auto k1 = f(t, y);
        std::array<double, N> tmp;
        for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        const auto k2 = f(t + 0.5 * h, tmp);
        for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        const auto k3 = f(t + 0.5 * h, tmp);
        for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] + h * k3[j];
        const auto k4 = f(t + h, tmp);
        for (std::size_t j = 0; j < N; ++j)
            y[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        t += h;
    }
    return y;
}

/// Durand-Kerner iteration for a monic cubic z^3 + a z^2 + b z + c.
inline std::array<std::complex<double>, 3> cubic_roots_generic(double a, double b, double c) {
    using C = std::complex<double>;
    const auto p = [&](C z) { return ((z + a) * z + b) * z + c; };
    std::array<C, 3> r{C{0.4, 0.9}, C{-0.7, 0.5}, C{0.3, -1.1}};
    for (int it = 0; it < 500; ++it) {
        for (int i = 0; i < 3; ++i) {
            C denom{1.0, 0.0};
            for (int j = 0; j < 3; ++j)
                if (j != i) denom *= r[i] - r[j];
            r[i] -= p(r[i]) / denom;
        }
    }
    return r;
}

/// Least squares fit of y ~ c0*f0 + c1*f1 over given samples (2 regressors).
inline std::array<double, 2> lstsq2(const std::vector<double>& f0, const std::vector<double>& f1,
                                    const std::vector<double>& y) {
    double a00 = 0, a01 = 0, a11 = 0, b0 = 0, b1 = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        a00 += f0[i] * f0[i];
        a01 += f0[i] * f1[i];
        a11 += f1[i] * f1[i];
        b0 += f0[i] * y[i];
        b1 += f1[i] * y[i];
    }
    const double det = a00 * a11 - a01 * a01;
    return {(b0 * a11 - b1 * a01) / det, (a00 * b1 - a01 * b0) / det};
}

/// Straight-line fit y ~ a + b x; returns (a, b).
inline std::array<double, 2> linfit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> ones(x.size(), 1.0);
    const auto c = lstsq2(ones, x, y);
    return {c[0], c[1]};
}

inline std::mt19937 seeded_rng(unsigned seed) { return std::mt19937(seed); }

}  // namespace oracle
