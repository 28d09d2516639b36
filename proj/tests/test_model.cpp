#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "msstab/benchmarks.hpp"
#include "msstab/system.hpp"
#include "test_util.hpp"

using namespace msstab;

TEST_CASE("validate accepts the uncontrolled benchmark") {
    auto sys = bench::stable_flow_expanding_jump(0.0, 0.0);
    CHECK(validate(sys).empty());
    CHECK(sys.mc() == 0);
    CHECK(sys.md() == 0);
}

TEST_CASE("validate names offending fields") {
    auto sys = bench::stable_flow_expanding_jump(0.1, 0.1);
    sys.J = Mat::zeros(2, 3);
    auto errs = validate(sys);
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].find("J") == 0);

    sys = bench::stable_flow_expanding_jump(0.1, 0.1);
    sys.Ec.clear();
    errs = validate(sys);
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].find("E_c") == 0);

    // validate is pure: same verdict twice
    CHECK(validate(sys) == errs);
}

TEST_CASE("switched embedding, smallest case") {
    SwitchedSystem sw;
    sw.modes = {{Mat{{-1.0}}, Mat{{0.3}}}, {Mat{{-2.0}}, Mat{{0.4}}}};
    auto mj = switched_to_impulsive(sw);
    CHECK(mj.A(0, 0) == -1.0);
    CHECK(mj.A(1, 1) == -2.0);
    CHECK(mj.A(0, 1) == 0.0);
    CHECK(mj.Ec[0](0, 0) == 0.3);
    CHECK(mj.Ec[0](1, 1) == 0.4);
    REQUIRE(mj.jumps.size() == 2);
    // J_12 = e1 e2^T and J_21 = e2 e1^T
    CHECK(mj.jumps[0].first(0, 1) == 1.0);
    CHECK(mj.jumps[0].first(1, 0) == 0.0);
    CHECK(mj.jumps[1].first(1, 0) == 1.0);
}

TEST_CASE("switched embedding jump count and mode recovery") {
    test_rng rng(8);
    SwitchedSystem sw;
    const int N = 3, n = 2;
    for (int i = 0; i < N; ++i) sw.modes.emplace_back(rng.random_mat(n, n), rng.random_mat(n, n));
    auto mj = switched_to_impulsive(sw);
    CHECK(mj.jumps.size() == static_cast<size_t>(N * (N - 1)));
    CHECK(mj.A.rows() == N * n);
    // per-block extraction recovers the original modes exactly
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                CHECK(mj.A(k * n + i, k * n + j) == sw.modes[k].first(i, j));
                CHECK(mj.Ec[0](k * n + i, k * n + j) == sw.modes[k].second(i, j));
            }

    // applying J_12 to a stacked vector moves block 2 into block 1 slot
    Mat x(N * n, 1);
    for (int i = 0; i < N * n; ++i) x(i, 0) = i + 1.0;
    Mat y = mj.jumps[0].first * x; // (i,j) = (1,2) in 1-based mode terms
    CHECK(y(0, 0) == x(n + 0, 0));
    CHECK(y(1, 0) == x(n + 1, 0));
    for (int i = n; i < N * n; ++i) CHECK(y(i, 0) == 0.0);
}

TEST_CASE("sampled-data embedding matches the block layout") {
    auto sd = bench::sampled_data_benchmark();
    auto sys = sampled_data_to_impulsive(sd);
    REQUIRE(sys.n() == 3);
    const Mat expected_A{{0.0, 1.0, 0.0}, {0.0, -1.0, 1.0}, {0.0, 0.0, 0.0}};
    CHECK(max_abs(sys.A - expected_A) == 0.0);

    // the diffusion channels compose to zero and the held-state rows of A are zero
    CHECK(max_abs(sys.Ec[1] * sys.Ec[0]) == 0.0);
    for (int j = 0; j < 3; ++j) CHECK(sys.A(2, j) == 0.0);

    // alpha scales the control-channel noise
    CHECK(sys.Ec[1](1, 2) == doctest::Approx(0.1));

    // zero gain: jump is the hold projector
    const Mat j0{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 0.0}};
    CHECK(max_abs(sys.J - j0) == 0.0);
    CHECK(max_abs(sys.Ed) == 0.0);
}

TEST_CASE("sampled-data embedding with a discrete gain") {
    auto sd = bench::sampled_data_benchmark();
    Mat kd{{-0.4069, -0.1734, -0.0045}};
    auto sys = sampled_data_to_impulsive(sd, kd);
    // held-state row of the jump equals the gain row
    for (int j = 0; j < 3; ++j) CHECK(sys.J(2, j) == doctest::Approx(kd(0, j)));
    // plant rows unchanged
    CHECK(sys.J(0, 0) == 1.0);
    CHECK(sys.J(1, 1) == 1.0);
    CHECK(sys.J(0, 1) == 0.0);

    Mat bad{{1.0, 2.0}};
    CHECK_THROWS_AS(sampled_data_to_impulsive(sd, bad), std::invalid_argument);
}

TEST_CASE("dwell-time specs validate") {
    CHECK_NOTHROW(validate(DwellTimeSpec{ConstantDwell{1.0}}));
    CHECK_THROWS_AS(validate(DwellTimeSpec{ConstantDwell{0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(DwellTimeSpec{RangedDwell{0.5, 0.2}}), std::invalid_argument);
    CHECK(dwell_kind(DwellTimeSpec{MinimumDwell{0.1}}) == "minimum");
}
