#include "msstab/simulate.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

namespace msstab {

namespace {

// Counter-style generator: a splitmix64 walk whose starting point is derived
// from (seed, stream). Streams are statistically independent and the draw
// sequence depends only on (seed, stream), never on threading.
struct CounterRng {
    uint64_t state;

    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    CounterRng(uint64_t seed, uint64_t stream) { state = mix(seed + 0x9E3779B97F4A7C15ULL * (stream + 1)); }

    uint64_t next_u64() {
        state += 0x9E3779B97F4A7C15ULL;
        return mix(state);
    }

    double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; } // [0, 1)

    bool have_spare = false;
    double spare = 0.0;
    double normal() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double u1 = 1.0 - uniform01(); // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare = r * std::sin(a);
        have_spare = true;
        return r * std::cos(a);
    }

    double rademacher() { return (next_u64() & 1) ? 1.0 : -1.0; }
};

constexpr uint64_t kScheduleStream = 0xFFFFFFFFFFFFULL;

// pairwise (cascade) summation over a fixed index range
double pairwise_sum(const double* v, size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

} // namespace

ImpulseSchedule generate_schedule(const ScheduleSpec& spec, double horizon, uint64_t stream) {
    if (!(horizon > 0.0)) throw std::invalid_argument("generate_schedule: horizon must be positive");
    ImpulseSchedule sched;
    sched.spec = spec;
    sched.horizon = horizon;
    CounterRng rng(stream, kScheduleStream);
    double t = 0.0;
    while (true) {
        double gap = 0.0;
        switch (spec.kind) {
            case ScheduleSpec::Kind::Constant:
                if (!(spec.T > 0.0)) throw std::invalid_argument("generate_schedule: constant T must be positive");
                gap = spec.T;
                break;
            case ScheduleSpec::Kind::Uniform:
                if (!(spec.T_min > 0.0) || !(spec.T_min <= spec.T_max))
                    throw std::invalid_argument("generate_schedule: need 0 < T_min <= T_max");
                gap = spec.T_min + (spec.T_max - spec.T_min) * rng.uniform01();
                break;
            case ScheduleSpec::Kind::MinDwell: {
                if (!(spec.T > 0.0)) throw std::invalid_argument("generate_schedule: minimum T must be positive");
                const double scale = spec.excess_scale > 0.0 ? spec.excess_scale : spec.T;
                gap = spec.T - scale * std::log(1.0 - rng.uniform01());
                break;
            }
        }
        const double next = t + gap;
        if (next > horizon * (1.0 + 1e-12)) break;
        sched.times.push_back(next);
        t = next;
    }
    return sched;
}

namespace {

struct PathAccumulator {
    std::vector<double> samples; // ||x||^2 at grid times
    double terminal = 0.0;
    bool flagged = false;
};

// one path of Euler-Maruyama with jump updates; deterministic given
// (seed, path index)
PathAccumulator run_path(const SimSpec& spec, const std::vector<double>& grid, double h, uint64_t path_index) {
    const ImpulsiveSystem& sys = spec.system;
    const int n = sys.n();
    const bool with_uc = spec.gains && spec.gains->has_continuous() && sys.mc() > 0;
    const bool with_ud = spec.gains && spec.gains->has_discrete() && sys.md() > 0;

    CounterRng rng(spec.seed, path_index);
    std::vector<double> x = spec.x0;

    PathAccumulator acc;
    acc.samples.assign(grid.size(), 0.0);

    // merged event list: grid points and impulse times
    size_t gi = 0, ji = 0;
    double t = 0.0;
    double clock = 0.0; // time since the last impulse

    auto norm_sq = [&]() {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    };
    auto flag_check = [&]() {
        for (double v : x)
            if (!std::isfinite(v) || std::abs(v) > 1e140) acc.flagged = true;
        return acc.flagged;
    };

    if (!grid.empty() && grid[0] <= 0.0) acc.samples[gi++] = norm_sq();

    std::vector<double> xn(n), u;
    while (gi < grid.size() || ji < spec.schedule.times.size()) {
        const double next_grid = gi < grid.size() ? grid[gi] : std::numeric_limits<double>::infinity();
        const double next_jump =
            ji < spec.schedule.times.size() ? spec.schedule.times[ji] : std::numeric_limits<double>::infinity();
        const double target = std::min(next_grid, next_jump);

        // integrate the flow from t to target with substeps of size <= h
        const double span = target - t;
        if (span > 1e-15) {
            const int nsub = std::max(1, static_cast<int>(std::ceil(span / h)));
            const double hs = span / nsub;
            const double sq = std::sqrt(hs);
            for (int s = 0; s < nsub && !acc.flagged; ++s) {
                Mat kc;
                std::vector<double> uc;
                if (with_uc) {
                    kc = spec.gains->eval_Kc(clock, false);
                    uc.assign(sys.mc(), 0.0);
                    for (int r = 0; r < sys.mc(); ++r)
                        for (int c = 0; c < n; ++c) uc[r] += kc(r, c) * x[c];
                }
                for (int i = 0; i < n; ++i) {
                    double drift = 0.0;
                    for (int c = 0; c < n; ++c) drift += sys.A(i, c) * x[c];
                    if (with_uc)
                        for (int r = 0; r < sys.mc(); ++r) drift += sys.Bc1(i, r) * uc[r];
                    xn[i] = x[i] + drift * hs;
                }
                for (const Mat& e : sys.Ec) {
                    const double xi = rng.normal();
                    for (int i = 0; i < n; ++i) {
                        double d = 0.0;
                        for (int c = 0; c < n; ++c) d += e(i, c) * x[c];
                        xn[i] += d * sq * xi;
                    }
                }
                if (with_uc) {
                    const double xip = rng.normal();
                    for (int i = 0; i < n; ++i) {
                        double d = 0.0;
                        for (int r = 0; r < sys.mc(); ++r) d += sys.Bc2(i, r) * uc[r];
                        xn[i] += d * sq * xip;
                    }
                }
                x = xn;
                clock += hs;
                flag_check();
            }
            t = target;
        } else {
            t = target;
        }

        // grid sample first: x(t_k) is the pre-jump state by left-continuity
        if (gi < grid.size() && target == next_grid && next_grid <= next_jump) {
            acc.samples[gi++] = acc.flagged ? 0.0 : norm_sq();
        }
        if (ji < spec.schedule.times.size() && target == next_jump) {
            std::vector<double> ud;
            if (with_ud) {
                ud.assign(sys.md(), 0.0);
                for (int r = 0; r < sys.md(); ++r)
                    for (int c = 0; c < n; ++c) ud[r] += spec.gains->Kd(r, c) * x[c];
            }
            const double nu1 =
                spec.jump_noise == JumpNoise::Gaussian ? rng.normal() : rng.rademacher();
            const double nu2 =
                spec.jump_noise == JumpNoise::Gaussian ? rng.normal() : rng.rademacher();
            for (int i = 0; i < n; ++i) {
                double v = 0.0;
                for (int c = 0; c < n; ++c) v += sys.J(i, c) * x[c] + sys.Ed(i, c) * x[c] * nu1;
                if (with_ud)
                    for (int r = 0; r < sys.md(); ++r) v += sys.Bd1(i, r) * ud[r] + sys.Bd2(i, r) * ud[r] * nu2;
                xn[i] = v;
            }
            x = xn;
            clock = 0.0;
            ++ji;
            flag_check();
            // a grid point coinciding with the jump was sampled pre-jump above
        }
    }
    acc.terminal = acc.flagged ? 0.0 : norm_sq();
    return acc;
}

} // namespace

SimResult simulate(const SimSpec& spec) {
    require_valid(spec.system);
    const int n = spec.system.n();
    if (static_cast<int>(spec.x0.size()) != n) throw std::invalid_argument("simulate: x0 size mismatch");
    if (spec.paths < 1) throw std::invalid_argument("simulate: paths must be >= 1");
    if (!(spec.schedule.horizon > 0.0)) throw std::invalid_argument("simulate: schedule horizon missing");

    double min_gap = spec.schedule.horizon;
    double prev = 0.0;
    for (double tk : spec.schedule.times) {
        min_gap = std::min(min_gap, tk - prev);
        prev = tk;
    }
    double h = spec.step > 0.0 ? spec.step : min_gap / 100.0;
    if (h > min_gap / 20.0)
        throw std::invalid_argument("simulate: step must be at most one twentieth of the smallest gap");

    SimResult res;
    res.grid = spec.grid;
    if (res.grid.empty()) {
        res.grid.resize(50);
        for (int i = 0; i < 50; ++i) res.grid[i] = spec.schedule.horizon * (i + 1) / 50.0;
        res.grid.insert(res.grid.begin(), 0.0);
    }
    const size_t g = res.grid.size();

    std::vector<double> samples(static_cast<size_t>(spec.paths) * g);
    std::vector<uint8_t> flagged(spec.paths, 0);
    std::vector<double> terminal(spec.paths, 0.0);

    int threads = spec.threads > 0 ? spec.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int p = 0; p < spec.paths; ++p) {
        try {
            PathAccumulator acc = run_path(spec, res.grid, h, static_cast<uint64_t>(p));
            flagged[p] = acc.flagged ? 1 : 0;
            terminal[p] = acc.terminal;
            std::copy(acc.samples.begin(), acc.samples.end(), samples.begin() + static_cast<size_t>(p) * g);
        } catch (const std::exception&) {
            flagged[p] = 1;
        }
    }

    for (int p = 0; p < spec.paths; ++p) res.flagged_paths += flagged[p];
    if (res.flagged_paths > spec.paths / 100)
        throw NumericalError("simulate: " + std::to_string(res.flagged_paths) + " of " +
                             std::to_string(spec.paths) + " paths overflowed");

    const int used = spec.paths - res.flagged_paths;
    if (used < 1) throw NumericalError("simulate: no usable paths");

    // deterministic reduction: gather per grid index in path order, then
    // pairwise-sum
    res.mean_sq.resize(g);
    res.std_err.resize(g);
    std::vector<double> column(used), sq(used);
    for (size_t k = 0; k < g; ++k) {
        int idx = 0;
        for (int p = 0; p < spec.paths; ++p)
            if (!flagged[p]) column[idx++] = samples[static_cast<size_t>(p) * g + k];
        const double mean = pairwise_sum(column.data(), used) / used;
        for (int i = 0; i < used; ++i) sq[i] = (column[i] - mean) * (column[i] - mean);
        const double var = used > 1 ? pairwise_sum(sq.data(), used) / (used - 1) : 0.0;
        res.mean_sq[k] = mean;
        res.std_err[k] = std::sqrt(var / used);
    }
    if (spec.keep_terminal_norms) res.terminal_norms = terminal;
    return res;
}

std::vector<double> exact_mean_sq(const SimSpec& spec, const std::vector<double>& grid,
                                  std::vector<double>* post_jump) {
    const ImpulsiveSystem& sys = spec.system;
    const int n = sys.n();
    const ControllerGains gains = spec.gains.value_or(ControllerGains{});

    Mat x0(n, 1);
    for (int i = 0; i < n; ++i) x0(i, 0) = spec.x0[i];
    Mat X = vec(x0 * transpose(x0));
    const Mat jump_map = closed_loop_lifted_jump(sys, gains);

    auto trace_of = [&](const Mat& v) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += v(i * n + i, 0);
        return s;
    };
    // RK4 on the lifted covariance ODE with the clock-varying generator
    auto advance = [&](Mat& v, double clock0, double span) {
        if (span <= 0.0) return;
        const int steps = std::max(30, static_cast<int>(std::ceil(span / 0.002)));
        const double hs = span / steps;
        for (int s = 0; s < steps; ++s) {
            const double tau = clock0 + s * hs;
            const Mat g1 = closed_loop_lifted_gen(sys, gains, tau);
            const Mat g2 = closed_loop_lifted_gen(sys, gains, tau + 0.5 * hs);
            const Mat g3 = closed_loop_lifted_gen(sys, gains, tau + hs);
            const Mat k1 = g1 * v;
            const Mat k2 = g2 * (v + (0.5 * hs) * k1);
            const Mat k3 = g2 * (v + (0.5 * hs) * k2);
            const Mat k4 = g3 * (v + hs * k3);
            v += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    };

    std::vector<double> out;
    out.reserve(grid.size());
    size_t gi = 0, ji = 0;
    double t = 0.0, clock = 0.0;
    while (gi < grid.size() || ji < spec.schedule.times.size()) {
        const double next_grid = gi < grid.size() ? grid[gi] : std::numeric_limits<double>::infinity();
        const double next_jump =
            ji < spec.schedule.times.size() ? spec.schedule.times[ji] : std::numeric_limits<double>::infinity();
        const double target = std::min(next_grid, next_jump);
        advance(X, clock, target - t);
        clock += target - t;
        t = target;
        if (gi < grid.size() && target == next_grid && next_grid <= next_jump) {
            out.push_back(trace_of(X));
            ++gi;
        }
        if (ji < spec.schedule.times.size() && target == next_jump) {
            X = jump_map * X;
            clock = 0.0;
            ++ji;
            if (post_jump) post_jump->push_back(trace_of(X));
        }
    }
    return out;
}

MomentCheckReport moment_check(const SimSpec& spec, const SimResult& result) {
    MomentCheckReport rep;
    rep.exact = exact_mean_sq(spec, result.grid, &rep.post_jump_moments);
    rep.z_scores.resize(result.grid.size());
    for (size_t k = 0; k < result.grid.size(); ++k) {
        const double scale = std::max(result.std_err[k], 1e-12 * std::max(1.0, rep.exact[k]));
        rep.z_scores[k] = (result.mean_sq[k] - rep.exact[k]) / scale;
        rep.max_abs_z = std::max(rep.max_abs_z, std::abs(rep.z_scores[k]));
    }
    return rep;
}

} // namespace msstab
