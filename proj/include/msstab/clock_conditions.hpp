#pragma once

// Finite LMI certificates of mean-square stability under constant, ranged
// and minimum dwell-time: exact tests (linear in a single matrix P via the
// lifted moment propagation) and piecewise-linear clock-dependent tests,
// plus the switched-system and lifted quadratic-stability variants.

#include "msstab/lmi.hpp"
#include "msstab/moments.hpp"
#include "msstab/pwl.hpp"
#include "msstab/system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace msstab {

struct ClockOptions {
    int pwl_segments = 100;  // default N for piecewise-linear tests
    int grid_points = 201;   // default theta grid for gridded tests
    double eps = 1e-6;       // jump strictness offset, scaled by the system norms
    LmiOptions lmi;
};

struct StabilityCertificate {
    std::string kind; // "exact" | "pwl" | "lifted-quadratic"
    DwellTimeSpec dwell{ConstantDwell{0.0}};
    bool verdict = false;
    double margin = 0.0;
    std::optional<Mat> P;                 // single-matrix witness (exact / lifted kinds)
    std::vector<PwlMatrixFunction> S;     // clock-dependent witness(es); one per mode for switched
    std::vector<double> residuals;        // per-block min eig of the negated assembled blocks
    std::vector<double> block_scales;
    std::vector<std::string> caveats;     // e.g. "gridded: inter-grid dwell times unchecked"
};

// Strictness offset used in the jump conditions: eps_rel scaled by the
// magnitude of the system matrices.
double eps_scale(const ImpulsiveSystem& sys);

// Exact test at constant dwell time: P > 0 with
// unvec(jump^T expm(gen^T T) vec(P)) - P <= -t I.
StabilityCertificate exact_constant_dt(const ImpulsiveSystem& sys, double T, const ClockOptions& opts = {});

// Piecewise-linear clock-dependent test on [0, T] with N segments
// (backward flow form; jump J^T S_N J - S_0 + Ed^T S_N Ed + eps I <= 0).
StabilityCertificate pwl_constant_dt(const ImpulsiveSystem& sys, double T, int N = -1,
                                     const ClockOptions& opts = {});

// Exact-per-theta test on a grid of [T_min, T_max]; carries the "gridded"
// caveat since intermediate dwell times are unchecked.
StabilityCertificate exact_ranged_dt(const ImpulsiveSystem& sys, double T_min, double T_max, int grid_n = -1,
                                     const ClockOptions& opts = {});

// Clock-dependent PWL test for ranged dwell-time: flow on [0, T_max], jump
// at every grid node in [T_min, T_max] (lossless over the PWL class).
StabilityCertificate pwl_ranged_dt(const ImpulsiveSystem& sys, double T_min, double T_max, int N = -1,
                                   const ClockOptions& opts = {});

// Exact minimum dwell-time test: the constant-dwell jump condition at T
// plus the continuous mean-square Lyapunov condition; certifies all
// dwell times >= T.
StabilityCertificate exact_minimum_dt(const ImpulsiveSystem& sys, double T, const ClockOptions& opts = {});

// Clock-dependent PWL test for minimum dwell-time (forward flow form with a
// stationarity condition at the horizon).
StabilityCertificate pwl_minimum_dt(const ImpulsiveSystem& sys, double T, int N = -1,
                                    const ClockOptions& opts = {});

// Per-mode clock-dependent certificate for switched systems under minimum
// dwell-time; block-diagonal structure, no lifting to dimension N*n.
StabilityCertificate switched_min_dt(const SwitchedSystem& sw, double T, int N = -1,
                                     const ClockOptions& opts = {});

// Gridded quadratic stability of the lifted one-period maps: a single
// P in S^{n^2} with M(theta)^T P M(theta) - P <= -t I on the grid.
StabilityCertificate lifted_quadratic_stability(const ImpulsiveSystem& sys, double T_min, double T_max,
                                                int grid_n = -1, const ClockOptions& opts = {});

// Clock grid on [0, horizon] with `segments` requested segments that
// contains `mark` as a node (snapped when it lands on the uniform grid,
// inserted otherwise). Returns the node times and the index of `mark`.
std::pair<std::vector<double>, int> make_clock_grid(double horizon, int segments, double mark);

} // namespace msstab
