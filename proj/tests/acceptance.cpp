// Acceptance suite: end-to-end checks against the published benchmark
// tables and the statistical/structural properties the toolkit guarantees.
// Each criterion prints one PASS/FAIL line; run with a criterion number to
// execute a single one, without arguments to run all.

#include "msstab/benchmarks.hpp"
#include "msstab/clock_conditions.hpp"
#include "msstab/dwell_search.hpp"
#include "msstab/runner.hpp"
#include "msstab/simulate.hpp"
#include "msstab/synthesis.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace msstab;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

// deterministic generator for the property suites
struct Rng {
    uint64_t s;
    explicit Rng(uint64_t seed) : s(seed * 0x9E3779B97F4A7C15ULL + 1) {}
    uint64_t u64() {
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        return s * 2685821657736338717ULL;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * ((u64() >> 11) * 0x1.0p-53); }
    Mat mat(int r, int c, double lo, double hi) {
        Mat m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = uniform(lo, hi);
        return m;
    }
};

// --- criterion 1: constant dwell-time table, exact spectral test ------------

Outcome criterion_table_t2() {
    RunOptions opts;
    json rep = reproduce_table("T2", opts);
    const double max_dev = rep["max_abs_deviation"].get<double>();
    Outcome out;
    out.pass = max_dev <= 5e-3;
    std::ostringstream os;
    os << "25 cells, max |deviation| = " << max_dev << " (tolerance 5e-3)";
    out.detail = os.str();
    return out;
}

// --- criterion 2: minimum dwell-time table, exact mode ----------------------

Outcome criterion_table_t3() {
    RunOptions opts;
    json rep = reproduce_table("T3", opts);
    const double max_dev = rep["max_abs_deviation"].get<double>();
    Outcome out;
    out.pass = max_dev <= 2e-2;
    std::ostringstream os;
    os << "25 cells, max |deviation| = " << max_dev << " (tolerance 2e-2)";
    // the corner cell is the known-delicate one; report it explicitly
    for (const auto& c : rep["cells"])
        if (c["kappa"].get<double>() == 1.2 && c["delta"].get<double>() == 2.4)
            os << "; corner cell computed " << c["computed"].get<double>() << " vs reference "
               << c["reference"].get<double>();
    out.detail = os.str();
    return out;
}

// --- criterion 3: ranged dwell-time table, lifted quadratic test ------------

Outcome criterion_table_t4() {
    RunOptions opts;
    json rep = reproduce_table("T4", opts);
    const double max_dev = rep["max_abs_deviation"].get<double>();
    Outcome out;
    out.pass = max_dev <= 2e-3;
    std::ostringstream os;
    os << "24 of 25 cells (one excluded as unreliable), max |deviation| = " << max_dev
       << " (tolerance 2e-3)";
    out.detail = os.str();
    return out;
}

// --- criterion 4: piecewise-linear convergence to the exact thresholds ------

Outcome criterion_pwl_convergence() {
    const int Ns[] = {10, 25, 50, 100};
    SearchOptions opts;
    opts.tol = 5e-4;
    Outcome out;
    std::ostringstream os;
    for (int cell = 0; cell < 5; ++cell) {
        const double kappa = bench::kTableKappa[cell];
        const double delta = bench::kTableDelta[cell];
        auto sys = bench::stable_flow_expanding_jump(kappa, delta);
        const double exact = smallest_constant_dt(sys, 0.2, 6.5, opts).threshold;
        double prev_dev = 1e300;
        double dev100 = 0.0;
        bool monotone = true;
        for (int N : Ns) {
            const double pwl = smallest_constant_dt_pwl(sys, 0.2, 6.5, N, opts).threshold;
            const double dev = std::abs(pwl - exact);
            if (dev >= prev_dev) monotone = false;
            prev_dev = dev;
            if (N == 100) dev100 = dev;
        }
        os << "(" << kappa << "," << delta << "): dev@N100 = " << dev100 << (monotone ? " monotone" : " NOT monotone")
           << "; ";
        if (dev100 > 1e-2) out.pass = false;
        if (!monotone) out.pass = false;
    }
    os << "(tolerance 1e-2 at N=100)";
    out.detail = os.str();
    return out;
}

// --- criterion 5: theorem-equivalence property suite ------------------------

Outcome criterion_equivalence() {
    Rng rng(2024);
    ClockOptions copts;
    copts.lmi.feas_tolerance = 1e-9;
    copts.lmi.gap_tolerance = 1e-12;

    int tested = 0, disagreements = 0, boundary_skips = 0;
    int min_dt_instances = 0, implication_failures = 0;
    while (tested < 50) {
        Mat a = rng.mat(2, 2, -2.0, 2.0);
        Mat j = rng.mat(2, 2, -2.0, 2.0);
        Mat ec = rng.mat(2, 2, -1.0, 1.0);
        Mat ed = rng.mat(2, 2, -1.0, 1.0);
        auto sys = ImpulsiveSystem::uncontrolled(a, ec, j, ed);
        const double T = rng.uniform(0.1, 2.0);
        double rho;
        try {
            rho = spectral_radius(monodromy(sys, T));
        } catch (const NumericalError&) {
            continue; // overflow for extreme draws; not part of the property
        }
        if (!std::isfinite(rho) || rho > 1e6) continue;
        ++tested;
        if (std::abs(rho - 1.0) < 1e-6) {
            ++boundary_skips;
            continue;
        }
        const bool lmi = exact_constant_dt(sys, T, copts).verdict;
        if (lmi != (rho < 1.0)) ++disagreements;

        // second leg: a minimum dwell-time certificate extends to larger
        // constant dwell-times
        if (rho < 1.0 && exact_minimum_dt(sys, T, copts).verdict) {
            ++min_dt_instances;
            for (double f : {1.0, 1.5, 2.0, 10.0}) {
                try {
                    if (!exact_constant_dt(sys, f * T, copts).verdict) ++implication_failures;
                } catch (const NumericalError&) {
                    ++implication_failures;
                }
            }
        }
    }
    Outcome out;
    out.pass = disagreements == 0 && implication_failures == 0 && min_dt_instances >= 3;
    std::ostringstream os;
    os << tested << " random systems, " << disagreements << " spectral/LMI disagreements, " << boundary_skips
       << " boundary skips; " << min_dt_instances << " minimum-dwell certificates, " << implication_failures
       << " implication failures";
    out.detail = os.str();
    return out;
}

// --- criterion 6: synthesis soundness ---------------------------------------

// simulate a closed loop and require the terminal mean square < 1% of the
// initial one
bool mc_decay(const ImpulsiveSystem& closed, const std::optional<ControllerGains>& gains,
              const ScheduleSpec& sched, double horizon, const std::vector<double>& x0, double step,
              std::string& note) {
    SimSpec spec;
    spec.system = closed;
    spec.gains = gains;
    spec.schedule = generate_schedule(sched, horizon, 77);
    spec.x0 = x0;
    spec.paths = 10000;
    spec.seed = 313;
    spec.step = step;
    spec.grid = {0.0, horizon};
    auto res = simulate(spec);
    const double ratio = res.mean_sq.back() / res.mean_sq.front();
    std::ostringstream os;
    os << " decay " << ratio;
    note += os.str();
    return ratio < 0.01;
}

Outcome criterion_synthesis() {
    Outcome out;
    std::string detail;

    // impulsive control benchmark under minimum dwell-time
    {
        auto sys = bench::synthesis_benchmark();
        auto res = min_dt_sf(sys, 0.1, 10);
        bool ok = res.feasible && res.verified;
        detail += "min-dwell: feasible=" + std::to_string(res.feasible) +
                  " rho=" + std::to_string(res.closed_loop_rho);
        if (ok) {
            ScheduleSpec sched;
            sched.kind = ScheduleSpec::Kind::MinDwell;
            sched.T = 0.1;
            sched.excess_scale = 0.1;
            ok = mc_decay(sys, res.gains, sched, 4.0, {2.0, -2.0}, 0.0, detail);
        }
        out.pass = out.pass && ok;
        detail += ok ? " [ok]; " : " [FAIL]; ";
    }

    // sampled-data rows
    auto sd = bench::sampled_data_benchmark();
    for (const auto& w : bench::table_t5_windows()) {
        auto res = sampled_data_sf(sd, w.T_min, w.T_max, 12);
        bool ok = res.feasible && res.verified;
        std::ostringstream os;
        os << "[" << w.T_min << "," << w.T_max << "]: rho=" << res.closed_loop_rho;
        detail += os.str();
        if (ok) {
            const ImpulsiveSystem closed = sampled_data_to_impulsive(sd, res.gains.Kd);
            // pick the horizon from the exact decay of the closed loop
            SimSpec probe;
            probe.system = closed;
            probe.x0 = {2.0, -2.0, 0.0};
            ScheduleSpec sched;
            sched.kind = ScheduleSpec::Kind::Uniform;
            sched.T_min = w.T_min;
            sched.T_max = w.T_max;
            double horizon = 4.0 * w.T_max;
            probe.schedule = generate_schedule(sched, horizon, 77);
            std::vector<double> grid = {horizon};
            while (exact_mean_sq(probe, grid).front() > 0.002 * 8.0 && horizon < 400.0 * w.T_max) {
                horizon *= 1.6;
                probe.schedule = generate_schedule(sched, horizon, 77);
                grid = {horizon};
            }
            // honor the step bound h <= min gap / 20 without paying for
            // microscopic realized gaps
            double min_gap = horizon;
            double prev = 0.0;
            for (double tk : probe.schedule.times) {
                min_gap = std::min(min_gap, tk - prev);
                prev = tk;
            }
            ok = mc_decay(closed, std::nullopt, sched, horizon, {2.0, -2.0, 0.0}, min_gap / 20.0, detail);
        }
        out.pass = out.pass && ok;
        detail += ok ? " [ok]; " : " [FAIL]; ";
    }
    out.detail = detail;
    return out;
}

// --- criterion 7: simulation vs exact moment oracle -------------------------

Outcome criterion_sim_oracle() {
    auto sys = bench::stable_flow_expanding_jump(0.6, 0.6);
    ScheduleSpec sched;
    sched.kind = ScheduleSpec::Kind::Constant;
    sched.T = 1.5;
    SimSpec spec;
    spec.system = sys;
    spec.schedule = generate_schedule(sched, 4.5, 7);
    spec.x0 = {2.0, -2.0};
    spec.paths = 10000;
    spec.seed = 99;
    spec.step = 1.5 / 200.0; // keep the weak-order-1 bias well under the sampling noise
    spec.grid.resize(50);
    for (int i = 0; i < 50; ++i) spec.grid[i] = 4.5 * (i + 1) / 50.0;

    spec.threads = 1;
    auto res1 = simulate(spec);
    spec.threads = 8;
    auto res8 = simulate(spec);
    const bool identical = res1.mean_sq == res8.mean_sq && res1.std_err == res8.std_err;

    auto rep = moment_check(spec, res1);
    Outcome out;
    out.pass = rep.max_abs_z <= 3.0 && identical;
    std::ostringstream os;
    os << "max |z| = " << rep.max_abs_z << " over 50 grid points (tolerance 3); 1-vs-8-thread results "
       << (identical ? "identical" : "DIFFER");
    out.detail = os.str();
    return out;
}

// --- criterion 8: scalar closed-form regression ------------------------------

Outcome criterion_scalar_closed_form() {
    SearchOptions opts;
    opts.tol = 1e-8;
    Outcome out;
    std::ostringstream os;

    auto sys0 = ImpulsiveSystem::uncontrolled(Mat{{-1.0}}, Mat{{0.0}}, Mat{{2.0}}, Mat{{0.0}});
    const double t0 = smallest_constant_dt(sys0, 0.05, 3.0, opts).threshold;
    const double ref0 = std::log(4.0) / 2.0;
    os << "ln(4)/2 case: |dev| = " << std::abs(t0 - ref0);
    if (std::abs(t0 - ref0) > 1e-6) out.pass = false;

    Rng rng(4096);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double a = rng.uniform(-2.0, -0.25);
        const double ec = rng.uniform(0.0, std::sqrt(-1.8 * a) * 0.9);
        const double rate = 2.0 * a + ec * ec; // < 0 by construction
        double j = rng.uniform(1.05, 1.9);
        double ed = rng.uniform(0.0, 0.8);
        const double gain = j * j + ed * ed; // > 1 so a threshold exists
        const double closed_form = -std::log(gain) / rate;
        auto sys = ImpulsiveSystem::uncontrolled(Mat{{a}}, Mat{{ec}}, Mat{{j}}, Mat{{ed}});
        const double found =
            smallest_constant_dt(sys, 0.2 * closed_form, 5.0 * closed_form + 0.1, opts).threshold;
        worst = std::max(worst, std::abs(found - closed_form));
    }
    os << "; 20 random scalar systems: worst |dev| = " << worst << " (tolerance 1e-6)";
    if (worst > 1e-6) out.pass = false;
    out.detail = os.str();
    return out;
}

struct Criterion {
    const char* name;
    std::function<Outcome()> fn;
    double budget_s; // stated runtime budget (0: none)
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"constant dwell-time table (exact spectral + bisection)", criterion_table_t2, 10.0},
        {"minimum dwell-time table (exact mode)", criterion_table_t3, 120.0},
        {"ranged dwell-time table (lifted quadratic, 201-point grid)", criterion_table_t4, 300.0},
        {"piecewise-linear vs exact threshold convergence", criterion_pwl_convergence, 0.0},
        {"theorem-equivalence property suite", criterion_equivalence, 0.0},
        {"synthesis soundness with exact and Monte-Carlo verification", criterion_synthesis, 300.0},
        {"simulation vs exact moment oracle", criterion_sim_oracle, 0.0},
        {"scalar closed-form regression", criterion_scalar_closed_form, 0.0},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    bool all_pass = true;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const int num = static_cast<int>(i) + 1;
        if (only != 0 && only != num) continue;
        const double t0 = now_s();
        Outcome out;
        try {
            out = criteria[i].fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double dt = now_s() - t0;
        bool in_budget = criteria[i].budget_s <= 0.0 || dt <= criteria[i].budget_s;
        if (!in_budget) out.pass = false;
        std::printf("[%s] criterion %d: %s — %s (%.1f s%s)\n", out.pass ? "PASS" : "FAIL", num,
                    criteria[i].name, out.detail.c_str(), dt,
                    in_budget ? "" : ", OVER BUDGET");
        std::fflush(stdout);
        all_pass = all_pass && out.pass;
    }
    return all_pass ? 0 : 1;
}
