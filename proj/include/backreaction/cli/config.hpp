#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "backreaction/vec3.hpp"

namespace backreaction::cli {

/// Exit-status convention (documented in the README):
/// 0 success/converged, 2 usage error, 3 non-convergence (oscillating or
/// failed residual bound), 4 numerical blow-up (diverged/runaway),
/// 5 step budget exhausted without a verdict.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kNoConvergence = 3,
    kBlowup = 4,
    kMaxSteps = 5,
};

struct RunConfig {
    std::string system = "const-field";  // const-field | elastic
    double eta = 1.0;
    double omega = 0.5;
    Vec3 e_vec{};
    Vec3 b_vec{0.0, 0.0, 0.5};
    std::string method = "closed-form";  // closed-form | iterate-term | iterate-solution |
                                         // landau | lorentz-dirac
    int steps = 2000;
    double tol = 1e-10;
    double t_end = 10.0;
    int samples = 201;
    double sample_dt = 0.0;  // overrides samples when positive
    Vec3 x0{};
    Vec3 v0{1.0, 0.0, 0.0};
    std::optional<Vec3> a0;
    double perturb_a0 = 0.0;
    int residual_samples = 100;
    std::optional<double> bound;  // residual pass bound; default depends on mode
    bool on_trajectory = false;
    std::string solver;  // empty = command default
    std::string format = "csv";
    std::string out = "-";
    bool no_timestamp = false;
    unsigned seed = 20140101;
    bool compare = false;
    // sweep
    std::string sweep_param;
    double sweep_from = 0.1;
    double sweep_to = 0.9;
    int sweep_count = 9;
    int jobs = 1;
};

/// Flat key=value text (one pair per line, '#' comments). Keys use the long
/// option names without the leading dashes.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Applies a parsed key=value map onto a RunConfig. Unknown keys throw.
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv);

/// Entry point used by the binary and by tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args);

}  // namespace backreaction::cli
