#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "msstab/lmi.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace msstab;

namespace {

// Scalar mean-square Lyapunov program: (2a + ec^2) p <= -t with p anchored
// to trace 1 and p >= t.
std::pair<std::vector<LmiBlock>, std::vector<LmiVar>> scalar_program(double a, double ec) {
    std::vector<LmiVar> vars = {LmiVar::symmetric(0, 1, "p")};
    LmiBlock flow;
    flow.name = "flow";
    flow.constant = Mat::zeros(1, 1);
    flow.terms.push_back({0, Mat{{2.0 * a + ec * ec}}, Mat::identity(1), false});
    LmiBlock pos;
    pos.name = "positivity";
    pos.constant = Mat::zeros(1, 1);
    pos.terms.push_back({0, -Mat::identity(1), Mat::identity(1), false});
    return {{flow, pos}, vars};
}

// Independent witness: solve A^T P + P A = -I through the vectorized
// Kronecker linear system.
Mat lyapunov_witness(const Mat& a) {
    const int n = a.rows();
    Mat lhs = transpose(kron_sum(a, a));
    Mat p = unvec(solve(lhs, -vec(Mat::identity(n))), n, n);
    return symmetrize(p);
}

Mat random_hurwitz(test_rng& rng, int n) {
    Mat g = rng.random_mat(n, n);
    const double shift = eig(g).max_real_part + 0.6;
    return g - shift * Mat::identity(n);
}

} // namespace

TEST_CASE("scalar program feasible with unit margin") {
    auto [blocks, vars] = scalar_program(-1.0, 1.0);
    auto v = lmi_solve(blocks, vars);
    CHECK(v.feasible);
    CHECK(v.margin == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(v.witness.at(0)(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scalar program infeasible when the drift wins") {
    auto [blocks, vars] = scalar_program(-0.4, 1.0);
    auto v = lmi_solve(blocks, vars);
    CHECK_FALSE(v.feasible);
    CHECK(v.margin < 0.0);
}

TEST_CASE("Lyapunov block on random Hurwitz matrices") {
    test_rng rng(101);
    for (int trial = 0; trial < 5; ++trial) {
        Mat a = random_hurwitz(rng, 3);
        // oracle witness exists, so the program must be feasible
        Mat pw = lyapunov_witness(a);
        CHECK(min_eig_sym(pw) > 0.0);

        std::vector<LmiVar> vars = {LmiVar::symmetric(0, 3, "P")};
        LmiBlock lyap;
        lyap.name = "lyapunov";
        lyap.constant = Mat::zeros(3, 3);
        lyap.terms.push_back({0, transpose(a), Mat::identity(3), true});
        LmiBlock pos;
        pos.constant = Mat::zeros(3, 3);
        pos.terms.push_back({0, -Mat::identity(3), Mat::identity(3), false});
        pos.name = "positivity";

        LmiOptions opts;
        opts.anchor_trace = 1.0;
        auto v = lmi_solve({lyap, pos}, vars, opts);
        CHECK(v.feasible);

        // trace normalization honored
        double tr = 0.0;
        for (int i = 0; i < 3; ++i) tr += v.witness.at(0)(i, i);
        CHECK(tr == doctest::Approx(1.0).epsilon(1e-9));

        // witness residual consistent with the reported margin
        for (size_t b = 0; b < v.residuals.size(); ++b)
            CHECK(v.residuals[b] / v.block_scales[b] >= v.margin - 1e-6);
    }
}

TEST_CASE("assemble basics") {
    LmiBlock blk;
    blk.constant = Mat{{2.0, 0.0}, {0.0, -1.0}};
    CHECK(max_abs(lmi_assemble(blk, {{0, Mat::zeros(2, 2)}}) - blk.constant) == 0.0);

    blk.terms.push_back({0, Mat::identity(2), Mat::identity(2), true});
    Mat x{{1.0, 2.0}, {3.0, 4.0}};
    Mat out = lmi_assemble(blk, {{0, x}});
    CHECK(max_abs(out - (blk.constant + x + transpose(x))) < 1e-15);

    CHECK_THROWS_AS(lmi_assemble(blk, {{7, x}}), std::invalid_argument);
}

TEST_CASE("verdicts are scale-invariant") {
    test_rng rng(103);
    Mat a = random_hurwitz(rng, 3);
    std::vector<LmiVar> vars = {LmiVar::symmetric(0, 3, "P")};
    auto make = [&](double c) {
        LmiBlock lyap;
        lyap.constant = Mat::zeros(3, 3);
        lyap.terms.push_back({0, c * transpose(a), Mat::identity(3), true});
        LmiBlock pos;
        pos.constant = Mat::zeros(3, 3);
        pos.terms.push_back({0, -c * Mat::identity(3), Mat::identity(3), false});
        return std::vector<LmiBlock>{lyap, pos};
    };
    auto v1 = lmi_solve(make(1.0), vars);
    auto v2 = lmi_solve(make(137.0), vars);
    CHECK(v1.feasible == v2.feasible);
    CHECK(v1.margin == doctest::Approx(v2.margin).epsilon(1e-5));
}

TEST_CASE("redundant blocks never flip a feasible verdict") {
    test_rng rng(107);
    Mat a = random_hurwitz(rng, 2);
    std::vector<LmiVar> vars = {LmiVar::symmetric(0, 2, "P")};
    LmiBlock lyap;
    lyap.constant = Mat::zeros(2, 2);
    lyap.terms.push_back({0, transpose(a), Mat::identity(2), true});
    LmiBlock pos;
    pos.constant = Mat::zeros(2, 2);
    pos.terms.push_back({0, -Mat::identity(2), Mat::identity(2), false});

    auto v1 = lmi_solve({lyap, pos}, vars);
    auto v2 = lmi_solve({lyap, pos, lyap}, vars);
    REQUIRE(v1.feasible);
    CHECK(v2.feasible);
}

TEST_CASE("post-hoc residuals back every feasible verdict") {
    test_rng rng(109);
    Mat a = random_hurwitz(rng, 3);
    std::vector<LmiVar> vars = {LmiVar::symmetric(0, 3, "P")};
    LmiBlock lyap;
    lyap.constant = Mat::zeros(3, 3);
    lyap.terms.push_back({0, transpose(a), Mat::identity(3), true});
    LmiBlock pos;
    pos.constant = Mat::zeros(3, 3);
    pos.terms.push_back({0, -Mat::identity(3), Mat::identity(3), false});
    LmiOptions opts;
    auto v = lmi_solve({lyap, pos}, vars, opts);
    REQUIRE(v.feasible);
    for (double r : v.residuals) CHECK(r >= 0.5 * opts.feas_tolerance);
}

TEST_CASE("block canvas assembles mirrored placements") {
    // [[ He[A X],  (B X)^T ], [ B X, -X ]] for X symmetric 2x2
    std::vector<LmiVar> vars = {LmiVar::symmetric(0, 2, "X")};
    Mat a{{0.5, -1.0}, {0.2, 0.3}};
    Mat b{{2.0, 0.0}, {0.0, 3.0}};
    BlockCanvas canvas({2, 2}, "demo");
    canvas.term(0, 0, 0, a, Mat::identity(2), true);
    canvas.term(1, 0, 0, b, Mat::identity(2), true);
    canvas.term(1, 1, 0, -Mat::identity(2), Mat::identity(2), false);
    LmiBlock blk = canvas.take();

    Mat x{{1.0, 0.25}, {0.25, 2.0}};
    Mat f = lmi_assemble(blk, {{0, x}});
    Mat ax = a * x;
    Mat bx = b * x;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(f(i, j) == doctest::Approx(ax(i, j) + ax(j, i)));
            CHECK(f(2 + i, j) == doctest::Approx(bx(i, j)));
            CHECK(f(i, 2 + j) == doctest::Approx(bx(j, i)));
            CHECK(f(2 + i, 2 + j) == doctest::Approx(-x(i, j)));
        }
}

TEST_CASE("lifted map terms reproduce a general linear map") {
    test_rng rng(113);
    const int n = 2;
    Mat k = rng.random_mat(n * n, n * n);
    // force the map to preserve symmetry: K = lifted map of a random sandwich pair
    Mat m1 = rng.random_mat(n, n), m2 = rng.random_mat(n, n);
    k = kron(m1, m1) + kron(m2, m2);

    std::vector<LmiVar> vars = {LmiVar::symmetric(0, n, "P")};
    BlockCanvas canvas({n}, "lifted");
    canvas.lifted_map(0, 0, transpose(k), 1.0);
    LmiBlock blk = canvas.take();

    Mat p = symmetrize(rng.random_mat(n, n));
    Mat got = lmi_assemble(blk, {{0, p}});
    Mat expected = unvec(transpose(k) * vec(p), n, n);
    CHECK(max_abs(got - symmetrize(expected)) < 1e-13);
}

TEST_CASE("program dump lists variables and blocks") {
    std::vector<LmiVar> vars = {LmiVar::symmetric(0, 2, "P")};
    LmiBlock blk;
    blk.name = "flow";
    blk.constant = Mat::identity(2);
    blk.terms.push_back({0, Mat::identity(2), Mat::identity(2), false});
    const std::string dump = lmi_dump({blk}, vars);
    CHECK(dump.find("var 0 (P): symmetric 2x2") != std::string::npos);
    CHECK(dump.find("block 0 (flow)") != std::string::npos);
    CHECK(dump.find("term var=0") != std::string::npos);
}

TEST_CASE("ill-posed programs are rejected") {
    std::vector<LmiVar> vars = {LmiVar::rectangular(0, 2, 3, "U")};
    LmiBlock blk;
    blk.constant = Mat::zeros(2, 2);
    CHECK_THROWS_AS(lmi_solve({blk}, vars), std::invalid_argument);
    CHECK_THROWS_AS(lmi_solve({}, vars), std::invalid_argument);
}
