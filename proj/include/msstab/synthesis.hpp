#pragma once

// State-feedback synthesis under ranged and minimum dwell-time, and for
// sampled-data systems. Gains are recovered in factored form from the
// convexified (dual) clock-dependent programs, and every feasible solve is
// re-verified against the exact closed-loop second-moment maps before being
// reported as a success.

#include "msstab/clock_conditions.hpp"
#include "msstab/moments.hpp"
#include "msstab/pwl.hpp"
#include "msstab/system.hpp"

#include <string>
#include <vector>

namespace msstab {

struct SynthesisOptions {
    int segments = 12;          // clock grid segments for the decision functions
    double eps = 1e-6;          // jump strictness offset (relative)
    std::vector<double> verify_at; // dwell times for re-verification; empty = policy default
    int verify_grid = 21;       // theta grid for the sampled-data check
    int flow_steps = 0;         // RK4 steps for closed-loop verification (0 = default)
    LmiOptions lmi;
};

struct SynthesisResult {
    bool feasible = false;       // the LMI program was feasible
    bool verified = false;       // closed loop re-verified stable at all checked dwell times
    ControllerGains gains;       // empty unless feasible
    double program_margin = 0.0;
    double closed_loop_rho = 0.0; // worst spectral radius over the checked dwell times
    std::vector<double> checked_at;
    std::string notes;
};

// Clock-dependent state feedback for ranged dwell-time [T_min, T_max].
SynthesisResult ranged_sf(const ImpulsiveSystem& sys, double T_min, double T_max, int N = -1,
                          const SynthesisOptions& opts = {});

// State feedback under minimum dwell-time T (continuous gain frozen at its
// horizon value for clocks beyond T). Requires a single flow-diffusion
// channel (the printed conditions combine the noise columns).
SynthesisResult min_dt_sf(const ImpulsiveSystem& sys, double T, int N = -1, const SynthesisOptions& opts = {});

// Discrete (sampled) state feedback for the sampled-data system under
// ranged dwell-time; returns the gain on the extended state (plant, hold).
SynthesisResult sampled_data_sf(const SampledDataSystem& sd, double T_min, double T_max, int N = -1,
                                const SynthesisOptions& opts = {});

// U_c(tau) * Stilde(tau)^{-1}, clamped at the horizon (same as
// ControllerGains::eval_Kc; kept as a free function for callers that hold
// the pieces separately).
Mat eval_gain(const ControllerGains& gains, double tau);

} // namespace msstab
