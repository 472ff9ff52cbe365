#include "backreaction/iteration.hpp"

#include <cmath>

namespace backreaction {

double ConvergenceMonitor::rel_diff(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = 1.0 + std::max(std::abs(a[i]), std::abs(b[i]));
        worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
    }
    return worst;
}

IterationStatus ConvergenceMonitor::push(std::span<const double> values) {
    for (double v : values) {
        if (!std::isfinite(v) || std::abs(v) > blowup_) return IterationStatus::diverged;
    }
    history_.emplace_back(values.begin(), values.end());
    const auto n = history_.size();
    if (n < 2) return IterationStatus::max_steps;

    const double step_delta = rel_diff(history_[n - 1], history_[n - 2]);
    if (step_delta <= tol_) return IterationStatus::converged;

    // Cycle detection only fires when the per-step motion is well above the
    // cycle tolerance; slow convergence would otherwise match period 2.
    if (step_delta > 100.0 * cycle_tol_) {
        for (int p = 2; p <= max_period_; ++p) {
            if (n < static_cast<std::size_t>(p) + 1) break;
            if (rel_diff(history_[n - 1], history_[n - 1 - p]) <= cycle_tol_) {
                if (++counts_[p] >= confirmations_) {
                    period_ = p;
                    return IterationStatus::oscillating;
                }
            } else {
                counts_[p] = 0;
            }
        }
    }
    return IterationStatus::max_steps;
}

}  // namespace backreaction
