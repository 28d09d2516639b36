#include "msstab/synthesis.hpp"

#include <algorithm>
#include <cmath>

namespace msstab {

namespace {

constexpr int kUcBase = 1000; // variable ids of the U_c nodes
constexpr int kUdId = 2000;

double synth_scale(const ImpulsiveSystem& sys) {
    double s = eps_scale(sys);
    s += frobenius_norm(sys.Bc1) + frobenius_norm(sys.Bc2) + frobenius_norm(sys.Bd1) + frobenius_norm(sys.Bd2);
    return std::max(1.0, s);
}

// slope_sign * d/dtau Stilde + He[A Stilde + Bc1 Uc] placed at block (0,0),
// one mirrored row per diffusion channel, one row for the gain noise.
// slope_sign +1 is the ranged (clock-zero anchored) form; -1 the minimum
// dwell-time form (the congruence flips the derivative sign); 0 drops the
// slope entirely (stationarity conditions).
LmiBlock synth_flow_block(const ImpulsiveSystem& sys, int s_lo, int s_hi, int s_at, int u_at, double h,
                          double slope_sign, const std::string& name) {
    const int n = sys.n();
    const bool with_u = sys.mc() > 0;
    const int channels = static_cast<int>(sys.Ec.size());
    std::vector<int> partition(1 + channels + (with_u ? 1 : 0), n);
    BlockCanvas canvas(partition, name);
    canvas.set_scale_hint(synth_scale(sys));

    if (slope_sign != 0.0) {
        canvas.term(0, 0, s_hi, (slope_sign / h) * Mat::identity(n), Mat::identity(n), false);
        canvas.term(0, 0, s_lo, (-slope_sign / h) * Mat::identity(n), Mat::identity(n), false);
    }
    canvas.term(0, 0, s_at, sys.A, Mat::identity(n), true);
    if (with_u) canvas.term(0, 0, u_at, sys.Bc1, Mat::identity(n), true);
    for (int c = 0; c < channels; ++c) {
        canvas.term(1 + c, 0, s_at, sys.Ec[c], Mat::identity(n), true);
        canvas.term(1 + c, 1 + c, s_at, -Mat::identity(n), Mat::identity(n), false);
    }
    if (with_u) {
        const int row = 1 + channels;
        canvas.term(row, 0, u_at, sys.Bc2, Mat::identity(n), true);
        canvas.term(row, row, s_at, -Mat::identity(n), Mat::identity(n), false);
    }
    return canvas.take();
}

// [[-Stilde(0)+eps I, *], [J Stilde(0)+Bd1 Ud, -Stilde(theta)], Ed row, Bd2 row]
LmiBlock ranged_jump_block(const ImpulsiveSystem& sys, int s_post, int s_theta, double eps_abs,
                           const std::string& name) {
    const int n = sys.n();
    const bool with_u = sys.md() > 0;
    std::vector<int> partition(3 + (with_u ? 1 : 0), n);
    BlockCanvas canvas(partition, name);
    canvas.set_scale_hint(synth_scale(sys));

    canvas.term(0, 0, s_post, -Mat::identity(n), Mat::identity(n), false);
    canvas.constant(0, 0, eps_abs * Mat::identity(n));
    canvas.term(1, 0, s_post, sys.J, Mat::identity(n), true);
    if (with_u) canvas.term(1, 0, kUdId, sys.Bd1, Mat::identity(n), true);
    canvas.term(1, 1, s_theta, -Mat::identity(n), Mat::identity(n), false);
    canvas.term(2, 0, s_post, sys.Ed, Mat::identity(n), true);
    canvas.term(2, 2, s_theta, -Mat::identity(n), Mat::identity(n), false);
    if (with_u) {
        canvas.term(3, 0, kUdId, sys.Bd2, Mat::identity(n), true);
        canvas.term(3, 3, s_theta, -Mat::identity(n), Mat::identity(n), false);
    }
    return canvas.take();
}

ControllerGains recover_gains(const ImpulsiveSystem& sys, const LmiVerdict& v, const std::vector<double>& times,
                              int s_count, double kd_at_node) {
    ControllerGains g;
    std::vector<Mat> snodes;
    for (int i = 0; i < s_count; ++i) snodes.push_back(symmetrize(v.witness.at(i)));
    g.Stilde = PwlMatrixFunction(times, snodes);
    if (sys.mc() > 0) {
        std::vector<Mat> unodes;
        for (int i = 0; i < s_count; ++i) unodes.push_back(v.witness.at(kUcBase + i));
        g.Uc = PwlMatrixFunction(times, std::move(unodes));
    }
    if (sys.md() > 0) {
        const Mat& ud = v.witness.at(kUdId);
        const Mat s0 = snodes.at(static_cast<size_t>(kd_at_node));
        g.Kd = transpose(solve(s0, transpose(ud)));
    } else {
        g.Kd = Mat(0, sys.n());
    }
    return g;
}

void verify_closed_loop(const ImpulsiveSystem& sys, SynthesisResult& res, const std::vector<double>& thetas,
                        int flow_steps) {
    res.checked_at = thetas;
    res.closed_loop_rho = 0.0;
    for (double th : thetas) {
        const double rho = spectral_radius(closed_loop_monodromy(sys, res.gains, th, flow_steps));
        res.closed_loop_rho = std::max(res.closed_loop_rho, rho);
    }
    res.verified = res.closed_loop_rho < 1.0 - 1e-6;
}

} // namespace

Mat eval_gain(const ControllerGains& gains, double tau) { return gains.eval_Kc(tau); }

SynthesisResult ranged_sf(const ImpulsiveSystem& sys, double T_min, double T_max, int N,
                          const SynthesisOptions& opts) {
    require_valid(sys);
    if (!(0.0 < T_min && T_min <= T_max)) throw std::invalid_argument("ranged_sf: need 0 < T_min <= T_max");
    if (sys.mc() == 0 && sys.md() == 0)
        throw std::invalid_argument("ranged_sf: system has no control inputs");
    if (N <= 0) N = opts.segments;

    const int n = sys.n();
    auto [times, mark_idx] = make_clock_grid(T_max, N, T_min);
    const int segs = static_cast<int>(times.size()) - 1;
    const double eps_abs = opts.eps * synth_scale(sys);

    std::vector<LmiVar> vars;
    for (int i = 0; i <= segs; ++i) vars.push_back(LmiVar::symmetric(i, n, "St" + std::to_string(i)));
    if (sys.mc() > 0)
        for (int i = 0; i <= segs; ++i)
            vars.push_back(LmiVar::rectangular(kUcBase + i, sys.mc(), n, "Uc" + std::to_string(i)));
    if (sys.md() > 0) vars.push_back(LmiVar::rectangular(kUdId, sys.md(), n, "Ud"));

    std::vector<LmiBlock> blocks;
    for (int i = 0; i < segs; ++i) {
        const double h = times[i + 1] - times[i];
        blocks.push_back(
            synth_flow_block(sys, i, i + 1, i, kUcBase + i, h, +1.0, "flow lo seg" + std::to_string(i)));
        blocks.push_back(
            synth_flow_block(sys, i, i + 1, i + 1, kUcBase + i + 1, h, +1.0, "flow hi seg" + std::to_string(i)));
    }
    for (int k = mark_idx; k <= segs; ++k)
        blocks.push_back(ranged_jump_block(sys, 0, k, eps_abs, "jump@node" + std::to_string(k)));
    {
        BlockCanvas pos({n}, "St0>0");
        pos.term(0, 0, 0, -Mat::identity(n), Mat::identity(n), false);
        blocks.push_back(pos.take());
    }

    LmiOptions lo = opts.lmi;
    lo.anchor_var = 0;
    const LmiVerdict v = lmi_solve(blocks, vars, lo);

    SynthesisResult res;
    res.feasible = v.feasible;
    res.program_margin = v.margin;
    if (!v.feasible) {
        res.notes = "synthesis program infeasible";
        return res;
    }
    res.gains = recover_gains(sys, v, times, segs + 1, 0);
    std::vector<double> thetas = opts.verify_at;
    if (thetas.empty()) thetas = {T_min, 0.5 * (T_min + T_max), T_max};
    verify_closed_loop(sys, res, thetas, opts.flow_steps);
    if (!res.verified) res.notes = "feasible program but closed-loop verification failed";
    return res;
}

SynthesisResult min_dt_sf(const ImpulsiveSystem& sys, double T, int N, const SynthesisOptions& opts) {
    require_valid(sys);
    if (!(T > 0.0)) throw std::invalid_argument("min_dt_sf: T must be positive");
    if (sys.mc() == 0 && sys.md() == 0) throw std::invalid_argument("min_dt_sf: system has no control inputs");
    if (N <= 0) N = opts.segments;

    // Linearization of the closed-loop minimum dwell-time conditions by the
    // congruence S = Stilde^{-1}: the derivative sign flips relative to the
    // ranged form, the stationarity condition pins the horizon node (both
    // the decision function and the control law freeze there), and the jump
    // block pairs Ud with the horizon node, so Kd = Ud * Stilde(T)^{-1}.
    const int n = sys.n();
    const double h = T / N;
    const double eps_abs = opts.eps * synth_scale(sys);
    const bool with_ud = sys.md() > 0;

    std::vector<LmiVar> vars;
    for (int i = 0; i <= N; ++i) vars.push_back(LmiVar::symmetric(i, n, "St" + std::to_string(i)));
    if (sys.mc() > 0)
        for (int i = 0; i <= N; ++i)
            vars.push_back(LmiVar::rectangular(kUcBase + i, sys.mc(), n, "Uc" + std::to_string(i)));
    if (with_ud) vars.push_back(LmiVar::rectangular(kUdId, sys.md(), n, "Ud"));

    std::vector<LmiBlock> blocks;
    for (int i = 0; i < N; ++i) {
        blocks.push_back(
            synth_flow_block(sys, i, i + 1, i, kUcBase + i, h, -1.0, "flow lo seg" + std::to_string(i)));
        blocks.push_back(
            synth_flow_block(sys, i, i + 1, i + 1, kUcBase + i + 1, h, -1.0, "flow hi seg" + std::to_string(i)));
    }
    blocks.push_back(synth_flow_block(sys, N, N, N, kUcBase + N, 1.0, 0.0, "stationarity@T"));
    {
        // [[-St(T)+eps I, *, *, *], [J St(T)+Bd1 Ud, -St(0), 0, 0],
        //  [Ed St(T), 0, -St(0), 0], [Bd2 Ud, 0, 0, -St(0)]]
        const bool bd2row = with_ud;
        std::vector<int> partition(3 + (bd2row ? 1 : 0), n);
        BlockCanvas jump(partition, "jump");
        jump.set_scale_hint(synth_scale(sys));
        jump.term(0, 0, N, -Mat::identity(n), Mat::identity(n), false);
        jump.constant(0, 0, eps_abs * Mat::identity(n));
        jump.term(1, 0, N, sys.J, Mat::identity(n), true);
        if (with_ud) jump.term(1, 0, kUdId, sys.Bd1, Mat::identity(n), true);
        jump.term(1, 1, 0, -Mat::identity(n), Mat::identity(n), false);
        jump.term(2, 0, N, sys.Ed, Mat::identity(n), true);
        jump.term(2, 2, 0, -Mat::identity(n), Mat::identity(n), false);
        if (bd2row) {
            jump.term(3, 0, kUdId, sys.Bd2, Mat::identity(n), true);
            jump.term(3, 3, 0, -Mat::identity(n), Mat::identity(n), false);
        }
        blocks.push_back(jump.take());
    }
    {
        BlockCanvas pos({n}, "St(T)>0");
        pos.term(0, 0, N, -Mat::identity(n), Mat::identity(n), false);
        blocks.push_back(pos.take());
    }

    LmiOptions lo = opts.lmi;
    lo.anchor_var = N;
    const LmiVerdict v = lmi_solve(blocks, vars, lo);

    SynthesisResult res;
    res.feasible = v.feasible;
    res.program_margin = v.margin;
    if (!v.feasible) {
        res.notes = "synthesis program infeasible";
        return res;
    }

    std::vector<double> times(N + 1);
    for (int i = 0; i <= N; ++i) times[i] = i * h;
    res.gains = recover_gains(sys, v, times, N + 1, N);
    std::vector<double> thetas = opts.verify_at;
    if (thetas.empty()) thetas = {T, 2.0 * T, 5.0 * T};
    verify_closed_loop(sys, res, thetas, opts.flow_steps);

    if (!res.verified) res.notes = "feasible program but closed-loop verification failed";
    return res;
}

SynthesisResult sampled_data_sf(const SampledDataSystem& sd, double T_min, double T_max, int N,
                                const SynthesisOptions& opts) {
    require_valid(sd);
    if (!(0.0 < T_min && T_min <= T_max))
        throw std::invalid_argument("sampled_data_sf: need 0 < T_min <= T_max");
    if (N <= 0) N = opts.segments;

    const ImpulsiveSystem sys = sampled_data_to_impulsive(sd);
    const int d = sys.n();
    const int m = sd.m();
    auto [times, mark_idx] = make_clock_grid(T_max, N, T_min);
    const int segs = static_cast<int>(times.size()) - 1;
    const double eps_abs = opts.eps * synth_scale(sys);

    std::vector<LmiVar> vars;
    for (int i = 0; i <= segs; ++i) vars.push_back(LmiVar::symmetric(i, d, "St" + std::to_string(i)));
    vars.push_back(LmiVar::rectangular(kUdId, m, d, "Ud"));

    std::vector<LmiBlock> blocks;
    auto flow_block = [&](int s_lo, int s_hi, int at, double h, const std::string& name) {
        BlockCanvas canvas({d, d, d}, name);
        canvas.set_scale_hint(synth_scale(sys));
        canvas.term(0, 0, s_hi, (1.0 / h) * Mat::identity(d), Mat::identity(d), false);
        canvas.term(0, 0, s_lo, (-1.0 / h) * Mat::identity(d), Mat::identity(d), false);
        canvas.term(0, 0, at, sys.A, Mat::identity(d), true);
        canvas.term(1, 0, at, sys.Ec[0], Mat::identity(d), true);
        canvas.term(1, 1, at, -Mat::identity(d), Mat::identity(d), false);
        canvas.term(2, 0, at, sys.Ec[1], Mat::identity(d), true);
        canvas.term(2, 2, at, -Mat::identity(d), Mat::identity(d), false);
        return canvas.take();
    };
    for (int i = 0; i < segs; ++i) {
        const double h = times[i + 1] - times[i];
        blocks.push_back(flow_block(i, i + 1, i, h, "flow lo seg" + std::to_string(i)));
        blocks.push_back(flow_block(i, i + 1, i + 1, h, "flow hi seg" + std::to_string(i)));
    }
    for (int k = mark_idx; k <= segs; ++k) {
        BlockCanvas jump({d, d}, "jump@node" + std::to_string(k));
        jump.set_scale_hint(synth_scale(sys));
        jump.term(0, 0, 0, -Mat::identity(d), Mat::identity(d), false);
        jump.constant(0, 0, eps_abs * Mat::identity(d));
        jump.term(1, 0, 0, sys.J, Mat::identity(d), true);       // J0 * St(0)
        jump.term(1, 0, kUdId, sys.Bd1, Mat::identity(d), true); // Bbar * Ud
        jump.term(1, 1, k, -Mat::identity(d), Mat::identity(d), false);
        blocks.push_back(jump.take());
    }
    {
        BlockCanvas pos({d}, "St0>0");
        pos.term(0, 0, 0, -Mat::identity(d), Mat::identity(d), false);
        blocks.push_back(pos.take());
    }

    LmiOptions lo = opts.lmi;
    lo.anchor_var = 0;
    const LmiVerdict v = lmi_solve(blocks, vars, lo);

    SynthesisResult res;
    res.feasible = v.feasible;
    res.program_margin = v.margin;
    if (!v.feasible) {
        res.notes = "synthesis program infeasible";
        return res;
    }

    const Mat s0 = symmetrize(v.witness.at(0));
    res.gains.Kd = transpose(solve(s0, transpose(v.witness.at(kUdId))));

    // exact verification: one-period maps of the closed-loop embedding on a
    // theta grid across the dwell window
    const ImpulsiveSystem closed = sampled_data_to_impulsive(sd, res.gains.Kd);
    const LiftedPair lp = lift(closed);
    const int grid = std::max(2, opts.verify_grid);
    res.closed_loop_rho = 0.0;
    res.checked_at.clear();
    for (int g = 0; g < grid; ++g) {
        const double th = T_min + (T_max - T_min) * g / (grid - 1);
        res.checked_at.push_back(th);
        res.closed_loop_rho = std::max(res.closed_loop_rho, spectral_radius(expm(th * lp.gen) * lp.jump));
    }
    res.verified = res.closed_loop_rho < 1.0 - 1e-6;
    if (!res.verified) res.notes = "feasible program but closed-loop verification failed";
    return res;
}

} // namespace msstab
