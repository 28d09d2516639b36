#include "msstab/benchmarks.hpp"

namespace msstab::bench {

ImpulsiveSystem stable_flow_expanding_jump(double kappa, double delta) {
    Mat a{{-1.0, 0.0}, {1.0, -2.0}};
    Mat j{{2.0, 1.0}, {1.0, 3.0}};
    return ImpulsiveSystem::uncontrolled(a, kappa * Mat::identity(2), j, delta * Mat::identity(2));
}

ImpulsiveSystem unstable_flow_contracting_jump(double kappa, double delta) {
    Mat a{{1.0, 3.0}, {-1.0, 2.0}};
    Mat j{{0.5, 0.0}, {0.0, 0.5}};
    return ImpulsiveSystem::uncontrolled(a, kappa * Mat::identity(2), j, delta * Mat::identity(2));
}

ImpulsiveSystem synthesis_benchmark() {
    ImpulsiveSystem s;
    s.A = Mat{{1.0, 1.0}, {1.0, -2.0}};
    s.Bc1 = Mat{{4.0}, {0.0}};
    s.Bc2 = Mat{{1.0}, {0.0}};
    s.J = Mat{{3.0, 1.0}, {1.0, 2.0}};
    s.Ec = {Mat{{1.0, 0.0}, {1.0, 2.0}}};
    s.Ed = Mat{{0.2, 0.0}, {0.2, -0.2}};
    s.Bd1 = Mat{{1.0}, {0.0}};
    s.Bd2 = Mat{{0.0}, {0.1}};
    return s;
}

SampledDataSystem sampled_data_benchmark() {
    SampledDataSystem sd;
    sd.A_sd = Mat{{0.0, 1.0}, {0.0, -1.0}};
    sd.B_sd = Mat{{0.0}, {1.0}};
    sd.E_sd = Mat{{0.0, 0.0}, {0.0, 0.1}};
    sd.alpha = 0.1;
    return sd;
}

const Table5x5& table_t1() {
    static const Table5x5 t = {{
        {{1.1406, 1.1568, 1.2031, 1.2734, 1.3595}},
        {{1.1918, 1.2089, 1.2578, 1.3319, 1.4225}},
        {{1.3787, 1.3992, 1.4577, 1.5458, 1.6531}},
        {{1.8774, 1.9073, 1.9920, 2.1184, 2.2702}},
        {{3.9306, 4.0011, 4.1938, 4.4765, 4.8305}},
    }};
    return t;
}

const Table5x5& table_t2() {
    static const Table5x5 t = {{
        {{1.1406, 1.1568, 1.2030, 1.2732, 1.3593}},
        {{1.1918, 1.2089, 1.2577, 1.3317, 1.4223}},
        {{1.3787, 1.3992, 1.4576, 1.5456, 1.6528}},
        {{1.8773, 1.9072, 1.9918, 2.1181, 2.2700}},
        {{3.9315, 4.0005, 4.1932, 4.4752, 4.8083}},
    }};
    return t;
}

const Table5x5& table_t3() {
    static const Table5x5 t = {{
        {{1.1406, 1.1568, 1.2031, 1.2734, 1.3595}},
        {{1.1918, 1.2089, 1.2578, 1.3319, 1.4225}},
        {{1.3787, 1.3992, 1.4577, 1.5458, 1.6531}},
        {{1.8774, 1.9073, 1.9920, 2.1184, 2.2703}},
        {{3.9307, 4.0012, 4.1941, 4.4776, 4.8565}},
    }};
    return t;
}

const Table5x5& table_t4() {
    static const Table5x5 t = {{
        {{0.4620, 0.4126, 0.2971, 0.1647, 0.0388}},
        {{0.3891, 0.3474, 0.2502, 0.1387, 0.0327}},
        {{0.2640, 0.2357, 0.1698, 0.0941, 0.0221}},
        {{0.1312, 0.1171, 0.0844, 0.0467, 0.0110}},
        {{0.1155, 0.1031, 0.0742, 0.0411, 0.0411}},
    }};
    return t;
}

const std::vector<RangedWindow>& table_t5_windows() {
    static const std::vector<RangedWindow> w = {
        {0.001, 0.1}, {0.001, 0.5}, {0.001, 1.0}, {1.0, 5.0}, {1.0, 10.0}, {1.0, 20.0},
    };
    return w;
}

} // namespace msstab::bench
