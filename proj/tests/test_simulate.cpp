#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "msstab/benchmarks.hpp"
#include "msstab/dwell_search.hpp"
#include "msstab/simulate.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace msstab;

namespace {

SimSpec base_spec(ImpulsiveSystem sys, ScheduleSpec sched, double horizon, std::vector<double> x0) {
    SimSpec spec;
    spec.system = std::move(sys);
    spec.schedule = generate_schedule(sched, horizon, 7);
    spec.x0 = std::move(x0);
    return spec;
}

} // namespace

TEST_CASE("constant schedules land on exact multiples") {
    ScheduleSpec s;
    s.kind = ScheduleSpec::Kind::Constant;
    s.T = 0.5;
    auto sched = generate_schedule(s, 2.0, 1);
    REQUIRE(sched.times.size() == 4);
    CHECK(sched.times[0] == doctest::Approx(0.5));
    CHECK(sched.times[3] == doctest::Approx(2.0));
}

TEST_CASE("degenerate uniform range equals the constant schedule") {
    ScheduleSpec u;
    u.kind = ScheduleSpec::Kind::Uniform;
    u.T_min = u.T_max = 1.0;
    auto us = generate_schedule(u, 5.0, 3);
    ScheduleSpec c;
    c.kind = ScheduleSpec::Kind::Constant;
    c.T = 1.0;
    auto cs = generate_schedule(c, 5.0, 3);
    REQUIRE(us.times.size() == cs.times.size());
    for (size_t i = 0; i < us.times.size(); ++i) CHECK(us.times[i] == doctest::Approx(cs.times[i]));
}

TEST_CASE("minimum-dwell schedules respect the bound") {
    ScheduleSpec s;
    s.kind = ScheduleSpec::Kind::MinDwell;
    s.T = 0.4;
    s.excess_scale = 0.2;
    int gaps = 0;
    for (uint64_t stream = 0; stream < 200; ++stream) {
        auto sched = generate_schedule(s, 50.0, stream);
        double prev = 0.0;
        for (double t : sched.times) {
            CHECK(t - prev >= s.T);
            prev = t;
            ++gaps;
        }
    }
    CHECK(gaps > 10000);
}

TEST_CASE("uniform schedules respect both bounds") {
    ScheduleSpec s;
    s.kind = ScheduleSpec::Kind::Uniform;
    s.T_min = 0.3;
    s.T_max = 0.9;
    for (uint64_t stream = 0; stream < 50; ++stream) {
        auto sched = generate_schedule(s, 30.0, stream);
        double prev = 0.0;
        for (double t : sched.times) {
            CHECK(t - prev >= s.T_min);
            CHECK(t - prev <= s.T_max);
            prev = t;
        }
    }
}

TEST_CASE("horizon shorter than the first gap gives an empty schedule") {
    ScheduleSpec s;
    s.kind = ScheduleSpec::Kind::Constant;
    s.T = 3.0;
    auto sched = generate_schedule(s, 1.0, 1);
    CHECK(sched.times.empty());
}

TEST_CASE("frozen dynamics keep the state constant") {
    ImpulsiveSystem sys = ImpulsiveSystem::uncontrolled(Mat::zeros(2, 2), Mat::zeros(2, 2), Mat::identity(2),
                                                        Mat::zeros(2, 2));
    ScheduleSpec s;
    s.kind = ScheduleSpec::Kind::Constant;
    s.T = 1.0;
    SimSpec spec = base_spec(sys, s, 5.0, {1.0, -2.0});
    spec.paths = 16;
    auto res = simulate(spec);
    for (double m : res.mean_sq) CHECK(m == doctest::Approx(5.0));
    for (double se : res.std_err) CHECK(se == doctest::Approx(0.0));
}

TEST_CASE("identical seeds give bit-identical results across thread counts") {
    auto sys = bench::stable_flow_expanding_jump(0.6, 0.6);
    ScheduleSpec s;
    s.kind = ScheduleSpec::Kind::Constant;
    s.T = 1.5;
    SimSpec spec = base_spec(sys, s, 9.0, {2.0, -2.0});
    spec.paths = 500;
    spec.seed = 42;
    spec.threads = 1;
    auto a = simulate(spec);
    spec.threads = 8;
    auto b = simulate(spec);
    REQUIRE(a.mean_sq.size() == b.mean_sq.size());
    for (size_t i = 0; i < a.mean_sq.size(); ++i) {
        CHECK(a.mean_sq[i] == b.mean_sq[i]);
        CHECK(a.std_err[i] == b.std_err[i]);
    }
}

TEST_CASE("open-loop ensemble matches the exact moments (scalar)") {
    // moderate multiplicative noise so the mean estimator is CLT-friendly:
    // the relative variance of ||x||^2 grows like e^{4 ec^2 t}
    auto sys = ImpulsiveSystem::uncontrolled(Mat{{-1.0}}, Mat{{0.6}}, Mat{{0.9}}, Mat{{0.2}});
    ScheduleSpec s;
    s.kind = ScheduleSpec::Kind::Constant;
    s.T = 0.8;
    SimSpec spec = base_spec(sys, s, 4.0, {1.5});
    spec.paths = 10000;
    spec.seed = 11;
    auto res = simulate(spec);
    auto rep = moment_check(spec, res);
    CHECK(rep.max_abs_z <= 3.0);
}

TEST_CASE("stable benchmark decays below its initial moment") {
    auto sys = bench::stable_flow_expanding_jump(0.0, 0.0);
    ScheduleSpec s;
    s.kind = ScheduleSpec::Kind::Constant;
    s.T = 2.0; // above the 1.1406 threshold
    SimSpec spec = base_spec(sys, s, 20.0, {2.0, -2.0});
    spec.paths = 2000;
    spec.seed = 5;
    auto res = simulate(spec);
    CHECK(res.mean_sq.back() < res.mean_sq.front());
}

TEST_CASE("unstable schedule grows at the monodromy rate") {
    auto sys = bench::stable_flow_expanding_jump(0.0, 0.0);
    const double T = 0.5; // below the threshold: unstable
    ScheduleSpec s;
    s.kind = ScheduleSpec::Kind::Constant;
    s.T = T;
    SimSpec spec = base_spec(sys, s, 5.0, {2.0, -2.0});
    spec.paths = 64;
    auto res = simulate(spec);
    auto rep = moment_check(spec, res);

    const double rho = spectral_radius(monodromy(sys, T));
    REQUIRE(rep.post_jump_moments.size() >= 10);
    // log-linear growth rate of the exact post-jump sequence vs log(rho)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int k0 = 3, k1 = static_cast<int>(rep.post_jump_moments.size()) - 1;
    int cnt = 0;
    for (int k = k0; k <= k1; ++k) {
        sx += k;
        sy += std::log(rep.post_jump_moments[k]);
        sxx += static_cast<double>(k) * k;
        sxy += k * std::log(rep.post_jump_moments[k]);
        ++cnt;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    // post-jump second moments grow geometrically at the monodromy spectral
    // radius per period
    CHECK(std::abs(slope - std::log(rho)) / std::abs(std::log(rho)) < 0.10);
}

TEST_CASE("weak convergence: halving the step stays within one standard error") {
    auto sys = bench::stable_flow_expanding_jump(0.6, 0.6);
    ScheduleSpec s;
    s.kind = ScheduleSpec::Kind::Constant;
    s.T = 1.5;
    SimSpec spec = base_spec(sys, s, 4.5, {2.0, -2.0});
    spec.paths = 10000;
    spec.seed = 17;
    auto coarse = simulate(spec); // default step: gap / 100
    spec.step = 1.5 / 200.0;
    auto fine = simulate(spec);
    // the two runs use independent draws, so their difference carries both
    // standard errors; the discretization effect must hide inside that noise
    for (size_t i = 0; i < coarse.mean_sq.size(); ++i) {
        const double se = std::sqrt(coarse.std_err[i] * coarse.std_err[i] + fine.std_err[i] * fine.std_err[i]);
        CHECK(std::abs(coarse.mean_sq[i] - fine.mean_sq[i]) <= std::max(3.5 * se, 1e-9));
    }
}

TEST_CASE("jump-noise distribution does not move the second moments") {
    // second moments are distribution-free within zero-mean unit-variance
    // jump noise: Gaussian and Rademacher agree with the same exact oracle
    auto sys = ImpulsiveSystem::uncontrolled(Mat{{-0.5}}, Mat{{0.3}}, Mat{{0.7}}, Mat{{0.5}});
    ScheduleSpec s;
    s.kind = ScheduleSpec::Kind::Constant;
    s.T = 1.0;
    SimSpec spec = base_spec(sys, s, 8.0, {1.0});
    spec.paths = 10000;
    spec.seed = 23;
    spec.jump_noise = JumpNoise::Gaussian;
    auto rep_g = moment_check(spec, simulate(spec));
    spec.jump_noise = JumpNoise::Rademacher;
    auto rep_r = moment_check(spec, simulate(spec));
    CHECK(rep_g.max_abs_z <= 3.5);
    CHECK(rep_r.max_abs_z <= 3.5);
}

TEST_CASE("step-size guard") {
    auto sys = bench::stable_flow_expanding_jump(0.0, 0.0);
    ScheduleSpec s;
    s.kind = ScheduleSpec::Kind::Constant;
    s.T = 1.0;
    SimSpec spec = base_spec(sys, s, 4.0, {1.0, 1.0});
    spec.step = 0.2; // larger than gap/20
    CHECK_THROWS_AS(simulate(spec), std::invalid_argument);
}
