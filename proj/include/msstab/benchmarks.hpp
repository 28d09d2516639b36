#pragma once

// Bundled benchmark problems and their published reference values. These
// drive the `reproduce` command and the acceptance suite.

#include "msstab/system.hpp"

#include <array>
#include <vector>

namespace msstab::bench {

// 2x2 system with a stable flow and an expanding jump map; stabilized by
// impulses arriving slowly enough. kappa scales the flow noise E_c = kappa*I,
// delta the jump noise E_d = delta*I.
ImpulsiveSystem stable_flow_expanding_jump(double kappa, double delta);

// 2x2 system with an unstable flow and a contracting jump map; stabilized by
// impulses arriving fast enough.
ImpulsiveSystem unstable_flow_contracting_jump(double kappa, double delta);

// 2x2 single-input system with noise on both flow and jump, used by the
// state-feedback synthesis benchmarks.
ImpulsiveSystem synthesis_benchmark();

// Double-integrator-like sampled-data plant with multiplicative state noise
// and noise on the control channel (alpha = 0.1).
SampledDataSystem sampled_data_benchmark();

// Parameter axes of the published tables for the two analysis benchmarks.
inline constexpr std::array<double, 5> kTableKappa = {0.0, 0.3, 0.6, 0.9, 1.2};
inline constexpr std::array<double, 5> kTableDelta = {0.0, 0.6, 1.2, 1.8, 2.4};
inline constexpr std::array<double, 5> kRangedKappa = {0.0, 0.75, 1.5, 2.75, 3.0};
inline constexpr std::array<double, 5> kRangedDelta = {0.0, 0.2, 0.4, 0.6, 0.8};

using Table5x5 = std::array<std::array<double, 5>, 5>;

// T1: smallest constant dwell-time of stable_flow_expanding_jump, reference
//     values from a degree-6 polynomial relaxation of the clock conditions.
// T2: same quantity from the exact spectral criterion.
// T3: smallest minimum dwell-time, degree-6 polynomial relaxation.
// T4: largest T_max (T_min = 0.01) for unstable_flow_contracting_jump from
//     the gridded quadratic stability test on a 201-point grid; the last
//     cell (kappa=3, delta=0.8) is known to be unreliable in the source.
const Table5x5& table_t1();
const Table5x5& table_t2();
const Table5x5& table_t3();
const Table5x5& table_t4();

// T5 rows: dwell-time windows for sampled-data state-feedback synthesis.
struct RangedWindow {
    double T_min, T_max;
};
const std::vector<RangedWindow>& table_t5_windows();

} // namespace msstab::bench
