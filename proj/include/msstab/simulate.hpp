#pragma once

// Monte-Carlo simulation of the stochastic impulsive dynamics with impulse
// schedules and clock-dependent feedback, plus the exact-moment cross-check.
// Paths are independent work units with counter-derived per-path random
// streams; results are bit-identical for any thread count.

#include "msstab/moments.hpp"
#include "msstab/pwl.hpp"
#include "msstab/system.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace msstab {

struct ScheduleSpec {
    enum class Kind { Constant, Uniform, MinDwell } kind = Kind::Constant;
    double T = 1.0;        // constant spacing / minimum dwell
    double T_min = 0.0;    // uniform gaps
    double T_max = 0.0;
    double excess_scale = 0.0; // MinDwell: mean of the exponential excess (0: use T)
};

struct ImpulseSchedule {
    ScheduleSpec spec;
    double horizon = 0.0;
    std::vector<double> times; // realized impulse instants, strictly increasing
};

// Realize an impulse schedule on [0, horizon]; `stream` seeds the gap draws
// (unused for constant spacing).
ImpulseSchedule generate_schedule(const ScheduleSpec& spec, double horizon, uint64_t stream);

enum class JumpNoise { Gaussian, Rademacher };

struct SimSpec {
    ImpulsiveSystem system;
    std::optional<ControllerGains> gains;
    ImpulseSchedule schedule;
    std::vector<double> x0;
    double step = 0.0;       // Euler-Maruyama step; 0: min gap / 100
    int paths = 1000;
    uint64_t seed = 1;
    std::vector<double> grid; // output times; empty: 50 uniform points
    JumpNoise jump_noise = JumpNoise::Gaussian;
    int threads = 0;
    bool keep_terminal_norms = false;
};

struct SimResult {
    std::vector<double> grid;
    std::vector<double> mean_sq;  // ensemble mean of ||x||^2
    std::vector<double> std_err;  // standard error of the mean
    std::vector<double> terminal_norms; // per path, when requested
    int flagged_paths = 0;        // paths that left the representable range
};

// Euler-Maruyama between impulses, exact jump updates at impulse times.
// Clock feedback u_c(t_k + tau) = K_c(tau) x and u_d(k) = K_d x(t_k) when
// gains are present. Throws NumericalError when more than 1% of paths
// overflow.
SimResult simulate(const SimSpec& spec);

struct MomentCheckReport {
    std::vector<double> exact;     // exact E||x||^2 on the grid
    std::vector<double> z_scores;  // (simulated - exact) / std_err
    double max_abs_z = 0.0;
    std::vector<double> post_jump_moments; // exact E||x(t_k^+)||^2 sequence
};

// Compare a simulation against the exact second-moment trajectory obtained
// by integrating the lifted covariance ODE along the realized schedule.
MomentCheckReport moment_check(const SimSpec& spec, const SimResult& result);

// Exact E[x x^T] trajectory sampled on `grid` for the given system,
// schedule and gains (deterministic; used by the oracle and reports).
std::vector<double> exact_mean_sq(const SimSpec& spec, const std::vector<double>& grid,
                                  std::vector<double>* post_jump = nullptr);

} // namespace msstab
