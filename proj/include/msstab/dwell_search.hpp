#pragma once

// Scalar searches over dwell-time parameters: smallest constant dwell-time,
// smallest minimum dwell-time, largest T_max for a fixed T_min, and
// mean-square decay-rate estimation. Coarse scans are data-parallel
// (OpenMP) with results identical to the serial path by construction.

#include "msstab/clock_conditions.hpp"
#include "msstab/system.hpp"

#include <functional>
#include <string>
#include <vector>

namespace msstab {

struct SearchResult {
    double threshold = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};
    int evaluations = 0;
    std::vector<std::pair<double, double>> stable_intervals; // from the coarse scan
    std::string method;
    bool empty_interval = false;      // largest_ranged_tmax: infeasible already at T_min
    std::vector<double> scan_T;       // coarse scan trace (for reports/plots)
    std::vector<double> scan_value;   // spectral radius at scan_T
};

struct SearchOptions {
    double tol = 1e-4;
    int scan_points = 200;
    int threads = 0;       // 0: library default
    int pwl_segments = 100;
    int grid_points = 201;
    ClockOptions clock;
};

enum class CertMode { Exact, Pwl, Lifted };

// rho(M(T)) on a uniform grid; parallel over grid points, bit-identical for
// any thread count (independent evaluations stored by index).
std::vector<double> scan_spectral_radius(const ImpulsiveSystem& sys, double T_lo, double T_hi, int points,
                                         int threads = 0);

// Smallest constant dwell-time: scan rho(M(T)) for crossings of 1, then
// bisect the first entry into the stable region. rho need not be monotone;
// every stable interval found by the scan is reported. Throws
// NumericalError("no threshold in range") when the scan finds no crossing.
SearchResult smallest_constant_dt(const ImpulsiveSystem& sys, double T_lo, double T_hi,
                                  const SearchOptions& opts = {});

// Same threshold through the piecewise-linear certificate with N segments
// (bisection seeded by the spectral bracket; the certificate threshold lies
// above the spectral one and converges to it as N grows).
SearchResult smallest_constant_dt_pwl(const ImpulsiveSystem& sys, double T_lo, double T_hi, int N,
                                      const SearchOptions& opts = {});

// Smallest minimum dwell-time by bisection on certificate feasibility
// (monotone in T). Short-circuits with NumericalError("flow not mean-square
// stable") when the lifted generator is not Hurwitz, and throws
// "no certificate in range" when infeasible at T_hi.
SearchResult smallest_minimum_dt(const ImpulsiveSystem& sys, double T_lo, double T_hi,
                                 CertMode mode = CertMode::Exact, const SearchOptions& opts = {});

// Largest T_max for the given T_min under the selected certificate. An
// interval infeasible already at [T_min, T_min] is reported with
// empty_interval set rather than thrown.
SearchResult largest_ranged_tmax(const ImpulsiveSystem& sys, double T_min, double T_hi, CertMode mode,
                                 const SearchOptions& opts = {});

// Exponential mean-square decay rate alpha = -ln(rho(M(T)))/(2T) under
// constant dwell-time T; throws when the system is unstable at T.
double decay_rate(const ImpulsiveSystem& sys, double T);

// Generic bisection on a monotone feasibility predicate: smallest x in
// [lo, hi] with pred(x) true, to within tol. pred(hi) must hold.
double bisect_smallest(const std::function<bool(double)>& pred, double lo, double hi, double tol,
                       int* evaluations = nullptr);

} // namespace msstab
