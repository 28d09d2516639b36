// Serial vs OpenMP benchmark for the data-parallel kernels: Monte-Carlo
// path ensembles, spectral-radius scans, and closed-loop flow propagation.
// The parallel paths are bit-identical to the serial reference by
// construction; this harness reports timings and verifies equality.

#include "msstab/benchmarks.hpp"
#include "msstab/dwell_search.hpp"
#include "msstab/simulate.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

using namespace msstab;

namespace {

template <typename F>
double time_it(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    int paths = 20000;
    if (argc > 1) paths = std::atoi(argv[1]);
    const int max_threads = omp_get_max_threads();
    bool all_identical = true;

    std::printf("kernel benchmark (max threads: %d)\n", max_threads);
    std::printf("%-28s %12s %12s %9s %s\n", "kernel", "serial [s]", "parallel [s]", "speedup", "identical");

    // Monte-Carlo ensemble
    {
        auto sys = bench::stable_flow_expanding_jump(0.6, 0.6);
        ScheduleSpec s;
        s.kind = ScheduleSpec::Kind::Constant;
        s.T = 1.5;
        SimSpec spec;
        spec.system = sys;
        spec.schedule = generate_schedule(s, 7.5, 1);
        spec.x0 = {2.0, -2.0};
        spec.paths = paths;
        spec.seed = 9;

        SimResult serial, parallel;
        spec.threads = 1;
        const double ts = time_it([&] { serial = simulate(spec); });
        spec.threads = max_threads;
        const double tp = time_it([&] { parallel = simulate(spec); });
        bool same = serial.mean_sq == parallel.mean_sq && serial.std_err == parallel.std_err;
        all_identical = all_identical && same;
        std::printf("%-28s %12.3f %12.3f %8.2fx %s\n", "monte-carlo ensemble", ts, tp, ts / tp,
                    same ? "yes" : "NO");
    }

    // spectral-radius scan
    {
        auto sys = bench::stable_flow_expanding_jump(0.9, 1.8);
        std::vector<double> serial, parallel;
        const double ts = time_it([&] { serial = scan_spectral_radius(sys, 0.2, 6.0, 2000, 1); });
        const double tp = time_it([&] { parallel = scan_spectral_radius(sys, 0.2, 6.0, 2000, max_threads); });
        all_identical = all_identical && serial == parallel;
        std::printf("%-28s %12.3f %12.3f %8.2fx %s\n", "spectral-radius scan", ts, tp, ts / tp,
                    serial == parallel ? "yes" : "NO");
    }

    // benchmark-table sweep (one row of constant dwell-time thresholds)
    {
        SearchOptions opts;
        opts.tol = 1e-5;
        std::vector<double> serial(5), parallel(5);
        const double ts = time_it([&] {
            for (int j = 0; j < 5; ++j) {
                auto sys = bench::stable_flow_expanding_jump(0.6, bench::kTableDelta[j]);
                opts.threads = 1;
                serial[j] = smallest_constant_dt(sys, 0.2, 6.0, opts).threshold;
            }
        });
        const double tp = time_it([&] {
#pragma omp parallel for schedule(dynamic)
            for (int j = 0; j < 5; ++j) {
                auto sys = bench::stable_flow_expanding_jump(0.6, bench::kTableDelta[j]);
                SearchOptions local = opts;
                local.threads = 1;
                parallel[j] = smallest_constant_dt(sys, 0.2, 6.0, local).threshold;
            }
        });
        all_identical = all_identical && serial == parallel;
        std::printf("%-28s %12.3f %12.3f %8.2fx %s\n", "threshold sweep row", ts, tp, ts / tp,
                    serial == parallel ? "yes" : "NO");
    }

    return all_identical ? 0 : 1;
}
