#include "msstab/clock_conditions.hpp"

#include <algorithm>
#include <cmath>

namespace msstab {

double eps_scale(const ImpulsiveSystem& sys) {
    double s = frobenius_norm(sys.A) + frobenius_norm(sys.J) + frobenius_norm(sys.Ed);
    for (const Mat& e : sys.Ec) s += frobenius_norm(e);
    return std::max(1.0, s);
}

namespace {

int pick(int requested, int fallback) { return requested > 0 ? requested : fallback; }

// flow condition  sign*(S_{i+1}-S_i)/h + A^T S_at + S_at A + sum Ec^T S_at Ec
// evaluated with the node value S_at in {S_i, S_{i+1}}.
LmiBlock pwl_flow_block(const ImpulsiveSystem& sys, int var_lo, int var_hi, int var_at, double h, double sign,
                        const std::string& name) {
    const int n = sys.n();
    BlockCanvas canvas({n}, name);
    canvas.set_scale_hint(eps_scale(sys));
    canvas.term(0, 0, var_hi, (sign / h) * Mat::identity(n), Mat::identity(n), false);
    canvas.term(0, 0, var_lo, (-sign / h) * Mat::identity(n), Mat::identity(n), false);
    canvas.term(0, 0, var_at, transpose(sys.A), Mat::identity(n), true);
    for (const Mat& e : sys.Ec) canvas.term(0, 0, var_at, transpose(e), e, false);
    return canvas.take();
}

// jump condition  J^T S_pre J - S_post + Ed^T S_pre Ed + eps I
LmiBlock pwl_jump_block(const ImpulsiveSystem& sys, int var_pre, int var_post, double eps_abs,
                        const std::string& name) {
    const int n = sys.n();
    BlockCanvas canvas({n}, name);
    canvas.term(0, 0, var_pre, transpose(sys.J), sys.J, false);
    canvas.term(0, 0, var_pre, transpose(sys.Ed), sys.Ed, false);
    canvas.term(0, 0, var_post, -Mat::identity(n), Mat::identity(n), false);
    canvas.constant(0, 0, eps_abs * Mat::identity(n));
    return canvas.take();
}

LmiBlock positivity_block(int var, int n, const std::string& name) {
    BlockCanvas canvas({n}, name);
    canvas.term(0, 0, var, -Mat::identity(n), Mat::identity(n), false);
    return canvas.take();
}

StabilityCertificate finish(std::string kind, DwellTimeSpec dwell, const std::vector<LmiBlock>& blocks,
                            const std::vector<LmiVar>& vars, const LmiOptions& lmi_opts) {
    const LmiVerdict v = lmi_solve(blocks, vars, lmi_opts);
    StabilityCertificate cert;
    cert.kind = std::move(kind);
    cert.dwell = std::move(dwell);
    cert.verdict = v.feasible;
    cert.margin = v.margin;
    cert.residuals = v.residuals;
    cert.block_scales = v.block_scales;
    cert.P = std::nullopt;
    cert.S.clear();
    // stash the witness; the caller reshapes what it needs
    if (!v.witness.empty()) cert.P = v.witness.begin()->second;
    return cert;
}

PwlMatrixFunction witness_pwl(const LmiVerdict& v, const std::vector<double>& times, int first_var_id) {
    std::vector<Mat> nodes;
    for (size_t i = 0; i < times.size(); ++i) nodes.push_back(v.witness.at(first_var_id + static_cast<int>(i)));
    return PwlMatrixFunction(times, std::move(nodes));
}

} // namespace

std::pair<std::vector<double>, int> make_clock_grid(double horizon, int segments, double mark) {
    if (!(mark > 0.0) || !(mark <= horizon)) throw std::invalid_argument("make_clock_grid: mark outside (0, horizon]");
    const double h = horizon / segments;
    std::vector<double> times;
    const double k = std::round(mark / h);
    if (k >= 1.0 && std::abs(k * h - mark) <= 1e-12 * horizon) {
        // mark sits on the uniform grid
        for (int i = 0; i <= segments; ++i) times.push_back(i == static_cast<int>(k) ? mark : i * h);
        return {times, static_cast<int>(k)};
    }
    for (int i = 0; i <= segments; ++i) times.push_back(i * h);
    times.push_back(mark);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [&](double a, double b) { return std::abs(a - b) < 1e-12 * horizon; }),
                times.end());
    const int idx = static_cast<int>(std::lower_bound(times.begin(), times.end(), mark - 1e-12 * horizon) -
                                     times.begin());
    return {times, idx};
}

StabilityCertificate exact_constant_dt(const ImpulsiveSystem& sys, double T, const ClockOptions& opts) {
    if (!(T > 0.0)) throw std::invalid_argument("exact_constant_dt: T must be positive");
    require_valid(sys);
    const int n = sys.n();
    const LiftedPair lp = lift(sys);
    const Mat K = transpose(lp.jump) * expm(T * transpose(lp.gen));

    std::vector<LmiVar> vars = {LmiVar::symmetric(0, n, "P")};
    BlockCanvas jump({n}, "jump@T");
    jump.lifted_map(0, 0, K, 1.0);
    jump.term(0, 0, 0, -Mat::identity(n), Mat::identity(n), false);

    StabilityCertificate cert =
        finish("exact", ConstantDwell{T}, {jump.take(), positivity_block(0, n, "P>0")}, vars, opts.lmi);
    return cert;
}

StabilityCertificate pwl_constant_dt(const ImpulsiveSystem& sys, double T, int N, const ClockOptions& opts) {
    if (!(T > 0.0)) throw std::invalid_argument("pwl_constant_dt: T must be positive");
    require_valid(sys);
    N = pick(N, opts.pwl_segments);
    const int n = sys.n();
    const double h = T / N;
    const double eps_abs = opts.eps * eps_scale(sys);

    std::vector<LmiVar> vars;
    for (int i = 0; i <= N; ++i) vars.push_back(LmiVar::symmetric(i, n, "S" + std::to_string(i)));

    std::vector<LmiBlock> blocks;
    for (int i = 0; i < N; ++i) {
        blocks.push_back(pwl_flow_block(sys, i, i + 1, i, h, -1.0, "flow lo seg" + std::to_string(i)));
        blocks.push_back(pwl_flow_block(sys, i, i + 1, i + 1, h, -1.0, "flow hi seg" + std::to_string(i)));
    }
    blocks.push_back(pwl_jump_block(sys, N, 0, eps_abs, "jump"));
    blocks.push_back(positivity_block(0, n, "S0>0"));

    LmiOptions lo = opts.lmi;
    lo.anchor_var = 0;
    const LmiVerdict v = lmi_solve(blocks, vars, lo);

    StabilityCertificate cert;
    cert.kind = "pwl";
    cert.dwell = ConstantDwell{T};
    cert.verdict = v.feasible;
    cert.margin = v.margin;
    cert.residuals = v.residuals;
    cert.block_scales = v.block_scales;
    std::vector<double> times(N + 1);
    for (int i = 0; i <= N; ++i) times[i] = i * h;
    cert.S.push_back(witness_pwl(v, times, 0));
    return cert;
}

StabilityCertificate exact_ranged_dt(const ImpulsiveSystem& sys, double T_min, double T_max, int grid_n,
                                     const ClockOptions& opts) {
    if (!(0.0 < T_min && T_min <= T_max)) throw std::invalid_argument("exact_ranged_dt: need 0 < T_min <= T_max");
    require_valid(sys);
    grid_n = std::max(2, pick(grid_n, opts.grid_points));
    if (T_min == T_max) grid_n = 1;
    const int n = sys.n();
    const LiftedPair lp = lift(sys);

    std::vector<LmiVar> vars = {LmiVar::symmetric(0, n, "P")};
    std::vector<LmiBlock> blocks;

    const Mat genT = transpose(lp.gen);
    const Mat jumpT = transpose(lp.jump);
    const double dtheta = grid_n > 1 ? (T_max - T_min) / (grid_n - 1) : 0.0;
    const Mat inc = grid_n > 1 ? expm(dtheta * genT) : Mat::identity(n * n);
    Mat prop = expm(T_min * genT);
    for (int g = 0; g < grid_n; ++g) {
        BlockCanvas jump({n}, "jump@theta" + std::to_string(g));
        jump.lifted_map(0, 0, jumpT * prop, 1.0);
        jump.term(0, 0, 0, -Mat::identity(n), Mat::identity(n), false);
        blocks.push_back(jump.take());
        if (g + 1 < grid_n) prop = inc * prop;
    }
    blocks.push_back(positivity_block(0, n, "P>0"));

    StabilityCertificate cert = finish("exact", RangedDwell{T_min, T_max}, blocks, vars, opts.lmi);
    if (grid_n > 1) cert.caveats.push_back("gridded: inter-grid dwell times unchecked");
    return cert;
}

StabilityCertificate pwl_ranged_dt(const ImpulsiveSystem& sys, double T_min, double T_max, int N,
                                   const ClockOptions& opts) {
    if (!(0.0 < T_min && T_min <= T_max)) throw std::invalid_argument("pwl_ranged_dt: need 0 < T_min <= T_max");
    require_valid(sys);
    N = pick(N, opts.pwl_segments);
    const int n = sys.n();
    const double eps_abs = opts.eps * eps_scale(sys);

    auto [times, mark_idx] = make_clock_grid(T_max, N, T_min);
    const int segs = static_cast<int>(times.size()) - 1;

    std::vector<LmiVar> vars;
    for (int i = 0; i <= segs; ++i) vars.push_back(LmiVar::symmetric(i, n, "S" + std::to_string(i)));

    std::vector<LmiBlock> blocks;
    for (int i = 0; i < segs; ++i) {
        const double h = times[i + 1] - times[i];
        blocks.push_back(pwl_flow_block(sys, i, i + 1, i, h, -1.0, "flow lo seg" + std::to_string(i)));
        blocks.push_back(pwl_flow_block(sys, i, i + 1, i + 1, h, -1.0, "flow hi seg" + std::to_string(i)));
    }
    for (int i = mark_idx; i <= segs; ++i)
        blocks.push_back(pwl_jump_block(sys, i, 0, eps_abs, "jump@node" + std::to_string(i)));
    blocks.push_back(positivity_block(0, n, "S0>0"));

    LmiOptions lo = opts.lmi;
    lo.anchor_var = 0;
    const LmiVerdict v = lmi_solve(blocks, vars, lo);

    StabilityCertificate cert;
    cert.kind = "pwl";
    cert.dwell = RangedDwell{T_min, T_max};
    cert.verdict = v.feasible;
    cert.margin = v.margin;
    cert.residuals = v.residuals;
    cert.block_scales = v.block_scales;
    cert.S.push_back(witness_pwl(v, times, 0));
    return cert;
}

StabilityCertificate exact_minimum_dt(const ImpulsiveSystem& sys, double T, const ClockOptions& opts) {
    if (!(T > 0.0)) throw std::invalid_argument("exact_minimum_dt: T must be positive");
    require_valid(sys);
    const int n = sys.n();
    const LiftedPair lp = lift(sys);
    const Mat K = transpose(lp.jump) * expm(T * transpose(lp.gen));

    std::vector<LmiVar> vars = {LmiVar::symmetric(0, n, "P")};
    BlockCanvas jump({n}, "jump@T");
    jump.lifted_map(0, 0, K, 1.0);
    jump.term(0, 0, 0, -Mat::identity(n), Mat::identity(n), false);

    BlockCanvas lyap({n}, "ms-lyapunov");
    lyap.term(0, 0, 0, transpose(sys.A), Mat::identity(n), true);
    for (const Mat& e : sys.Ec) lyap.term(0, 0, 0, transpose(e), e, false);

    return finish("exact", MinimumDwell{T}, {jump.take(), lyap.take(), positivity_block(0, n, "P>0")}, vars,
                  opts.lmi);
}

StabilityCertificate pwl_minimum_dt(const ImpulsiveSystem& sys, double T, int N, const ClockOptions& opts) {
    if (!(T > 0.0)) throw std::invalid_argument("pwl_minimum_dt: T must be positive");
    require_valid(sys);
    N = pick(N, opts.pwl_segments);
    const int n = sys.n();
    const double h = T / N;
    const double eps_abs = opts.eps * eps_scale(sys);

    std::vector<LmiVar> vars;
    for (int i = 0; i <= N; ++i) vars.push_back(LmiVar::symmetric(i, n, "S" + std::to_string(i)));

    std::vector<LmiBlock> blocks;
    for (int i = 0; i < N; ++i) {
        blocks.push_back(pwl_flow_block(sys, i, i + 1, i, h, +1.0, "flow lo seg" + std::to_string(i)));
        blocks.push_back(pwl_flow_block(sys, i, i + 1, i + 1, h, +1.0, "flow hi seg" + std::to_string(i)));
    }
    {
        // stationarity at the horizon: the clock variable freezes beyond T
        BlockCanvas stat({n}, "stationarity@T");
        stat.term(0, 0, N, transpose(sys.A), Mat::identity(n), true);
        for (const Mat& e : sys.Ec) stat.term(0, 0, N, transpose(e), e, false);
        blocks.push_back(stat.take());
    }
    blocks.push_back(pwl_jump_block(sys, 0, N, eps_abs, "jump"));
    blocks.push_back(positivity_block(N, n, "S(T)>0"));

    LmiOptions lo = opts.lmi;
    lo.anchor_var = N;
    const LmiVerdict v = lmi_solve(blocks, vars, lo);

    StabilityCertificate cert;
    cert.kind = "pwl";
    cert.dwell = MinimumDwell{T};
    cert.verdict = v.feasible;
    cert.margin = v.margin;
    cert.residuals = v.residuals;
    cert.block_scales = v.block_scales;
    std::vector<double> times(N + 1);
    for (int i = 0; i <= N; ++i) times[i] = i * h;
    cert.S.push_back(witness_pwl(v, times, 0));
    return cert;
}

StabilityCertificate switched_min_dt(const SwitchedSystem& sw, double T, int N, const ClockOptions& opts) {
    if (!(T > 0.0)) throw std::invalid_argument("switched_min_dt: T must be positive");
    require_valid(sw);
    ClockOptions o = opts;
    N = pick(N, o.pwl_segments);
    const int n = sw.n();
    const int modes = static_cast<int>(sw.modes.size());
    const double h = T / N;

    double scale = 1.0;
    for (const auto& [g, hh] : sw.modes) scale = std::max(scale, frobenius_norm(g) + frobenius_norm(hh));
    const double eps_abs = o.eps * scale;

    // variable id of node i of mode m: m*(N+1)+i
    std::vector<LmiVar> vars;
    for (int m = 0; m < modes; ++m)
        for (int i = 0; i <= N; ++i)
            vars.push_back(LmiVar::symmetric(m * (N + 1) + i, n, "R" + std::to_string(m) + "_" + std::to_string(i)));

    std::vector<LmiBlock> blocks;
    for (int m = 0; m < modes; ++m) {
        const Mat& G = sw.modes[m].first;
        const Mat& H = sw.modes[m].second;
        const int base = m * (N + 1);
        for (int i = 0; i < N; ++i) {
            for (int at : {0, 1}) {
                BlockCanvas flow({n}, "mode" + std::to_string(m) + " flow seg" + std::to_string(i) +
                                          (at ? " hi" : " lo"));
                flow.set_scale_hint(scale);
                flow.term(0, 0, base + i + 1, (1.0 / h) * Mat::identity(n), Mat::identity(n), false);
                flow.term(0, 0, base + i, (-1.0 / h) * Mat::identity(n), Mat::identity(n), false);
                flow.term(0, 0, base + i + at, transpose(G), Mat::identity(n), true);
                flow.term(0, 0, base + i + at, transpose(H), H, false);
                blocks.push_back(flow.take());
            }
        }
        BlockCanvas stat({n}, "mode" + std::to_string(m) + " stationarity");
        stat.term(0, 0, base + N, transpose(G), Mat::identity(n), true);
        stat.term(0, 0, base + N, transpose(H), H, false);
        blocks.push_back(stat.take());
        blocks.push_back(positivity_block(base + N, n, "R" + std::to_string(m) + "(T)>0"));
    }
    // cross-mode reset conditions R_i(0) - R_j(T) + eps I <= 0, i != j
    for (int i = 0; i < modes; ++i)
        for (int j = 0; j < modes; ++j) {
            if (i == j) continue;
            BlockCanvas cross({n}, "reset " + std::to_string(i) + "->" + std::to_string(j));
            cross.term(0, 0, i * (N + 1), Mat::identity(n), Mat::identity(n), false);
            cross.term(0, 0, j * (N + 1) + N, -Mat::identity(n), Mat::identity(n), false);
            cross.constant(0, 0, eps_abs * Mat::identity(n));
            blocks.push_back(cross.take());
        }

    LmiOptions lo = o.lmi;
    lo.anchor_var = N; // mode 0, node N
    const LmiVerdict v = lmi_solve(blocks, vars, lo);

    StabilityCertificate cert;
    cert.kind = "pwl";
    cert.dwell = MinimumDwell{T};
    cert.verdict = v.feasible;
    cert.margin = v.margin;
    cert.residuals = v.residuals;
    cert.block_scales = v.block_scales;
    std::vector<double> times(N + 1);
    for (int i = 0; i <= N; ++i) times[i] = i * h;
    for (int m = 0; m < modes; ++m) cert.S.push_back(witness_pwl(v, times, m * (N + 1)));
    return cert;
}

StabilityCertificate lifted_quadratic_stability(const ImpulsiveSystem& sys, double T_min, double T_max,
                                                int grid_n, const ClockOptions& opts) {
    if (!(0.0 < T_min && T_min <= T_max))
        throw std::invalid_argument("lifted_quadratic_stability: need 0 < T_min <= T_max");
    require_valid(sys);
    grid_n = std::max(2, pick(grid_n, opts.grid_points));
    if (T_min == T_max) grid_n = 1;
    const int n2 = sys.n() * sys.n();
    const LiftedPair lp = lift(sys);

    std::vector<LmiVar> vars = {LmiVar::symmetric(0, n2, "P")};
    std::vector<LmiBlock> blocks;

    const double dtheta = grid_n > 1 ? (T_max - T_min) / (grid_n - 1) : 0.0;
    const Mat inc = grid_n > 1 ? expm(dtheta * lp.gen) : Mat::identity(n2);
    Mat prop = expm(T_min * lp.gen);
    for (int g = 0; g < grid_n; ++g) {
        const Mat m = prop * lp.jump;
        BlockCanvas stein({n2}, "stein@theta" + std::to_string(g));
        stein.term(0, 0, 0, transpose(m), m, false);
        stein.term(0, 0, 0, -Mat::identity(n2), Mat::identity(n2), false);
        blocks.push_back(stein.take());
        if (g + 1 < grid_n) prop = inc * prop;
    }
    blocks.push_back(positivity_block(0, n2, "P>0"));

    StabilityCertificate cert = finish("lifted-quadratic", RangedDwell{T_min, T_max}, blocks, vars, opts.lmi);
    if (grid_n > 1) cert.caveats.push_back("gridded: inter-grid dwell times unchecked");
    return cert;
}

} // namespace msstab
