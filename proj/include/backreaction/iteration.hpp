#pragma once

#include <span>
#include <vector>

#include "backreaction/vec3.hpp"

namespace backreaction {

enum class IterationStatus { converged, oscillating, diverged, max_steps };

[[nodiscard]] constexpr const char* to_string(IterationStatus s) noexcept {
    switch (s) {
        case IterationStatus::converged: return "converged";
        case IterationStatus::oscillating: return "oscillating";
        case IterationStatus::diverged: return "diverged";
        case IterationStatus::max_steps: return "max-steps";
    }
    return "unknown";
}

/// One fixed-point step: the linear self-force coefficients plus the constant
/// term (zero for the elastic system and for vanishing electric field).
struct IterationEntry {
    int step = 0;
    double beta = 0.0;
    double alpha = 0.0;
    Vec3 constant{};
};

struct IterationTrace {
    std::vector<IterationEntry> entries;
    IterationStatus status = IterationStatus::max_steps;
    int period = 0;  ///< cycle length when status == oscillating

    [[nodiscard]] const IterationEntry& last() const { return entries.back(); }
};

/// Classifies a fixed-point sequence online. Convergence: successive entries
/// agree within `tol` (relative). Oscillation: entry n matches entry n-p to
/// `cycle_tol` while successive entries still differ by a finite amount,
/// confirmed `confirmations` times in a row; the smallest period wins.
/// Divergence: non-finite values or magnitudes beyond `blowup`.
class ConvergenceMonitor {
  public:
    explicit ConvergenceMonitor(double tol, double cycle_tol = 1e-9, int confirmations = 3,
                                int max_period = 8, double blowup = 1e12)
        : tol_(tol), cycle_tol_(cycle_tol), confirmations_(confirmations),
          max_period_(max_period), blowup_(blowup), counts_(max_period + 1, 0) {}

    /// Feed the next entry (as a flat component vector); returns the decided
    /// status, or max_steps while undecided.
    IterationStatus push(std::span<const double> values);

    [[nodiscard]] int period() const { return period_; }

  private:
    static double rel_diff(std::span<const double> a, std::span<const double> b);

    double tol_;
    double cycle_tol_;
    int confirmations_;
    int max_period_;
    double blowup_;
    int period_ = 0;
    std::vector<std::vector<double>> history_;
    std::vector<int> counts_;
};

}  // namespace backreaction
