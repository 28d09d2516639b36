#include "msstab/moments.hpp"

#include <algorithm>
#include <cmath>

namespace msstab {

// --- piecewise-linear functions ---------------------------------------------

PwlMatrixFunction::PwlMatrixFunction(std::vector<double> times, std::vector<Mat> nodes)
    : times_(std::move(times)), nodes_(std::move(nodes)) {
    if (times_.size() < 2 || times_.size() != nodes_.size())
        throw std::invalid_argument("PwlMatrixFunction: need matching times/nodes with >= 2 entries");
    for (size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1])) throw std::invalid_argument("PwlMatrixFunction: times not increasing");
    for (const auto& m : nodes_)
        if (!same_shape(m, nodes_.front())) throw std::invalid_argument("PwlMatrixFunction: uneven node shapes");
}

PwlMatrixFunction PwlMatrixFunction::uniform(double horizon, int segments, std::vector<Mat> nodes) {
    if (segments < 1) throw std::invalid_argument("PwlMatrixFunction: segments must be >= 1");
    std::vector<double> times(segments + 1);
    for (int i = 0; i <= segments; ++i) times[i] = horizon * i / segments;
    return PwlMatrixFunction(std::move(times), std::move(nodes));
}

int PwlMatrixFunction::segment_of(double tau) const {
    if (tau <= times_.front()) return 0;
    if (tau >= times_.back()) return segments() - 1;
    int lo = 0, hi = segments() - 1;
    while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (times_[mid] <= tau)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

Mat PwlMatrixFunction::eval(double tau) const {
    tau = std::clamp(tau, times_.front(), times_.back());
    const int i = segment_of(tau);
    const double h = times_[i + 1] - times_[i];
    const double w = (tau - times_[i]) / h;
    Mat out = nodes_[i];
    out *= (1.0 - w);
    Mat hi = nodes_[i + 1];
    hi *= w;
    out += hi;
    return out;
}

Mat PwlMatrixFunction::slope(int segment) const {
    const double h = times_.at(segment + 1) - times_.at(segment);
    Mat s = nodes_.at(segment + 1);
    s -= nodes_.at(segment);
    s *= 1.0 / h;
    return s;
}

Mat PwlMatrixFunction::derivative(double tau) const {
    return slope(segment_of(std::clamp(tau, times_.front(), times_.back())));
}

Mat ControllerGains::eval_Kc(double tau, bool check_condition) const {
    if (!has_continuous()) throw std::invalid_argument("ControllerGains: no continuous gain");
    const Mat st = Stilde.eval(tau);
    if (check_condition && cond1(st) > 1e12)
        throw NumericalError("eval_Kc: Stilde(tau) near-singular at tau=" + std::to_string(tau));
    // K = U * St^{-1}  <=>  St K^T = U^T (St symmetric)
    return transpose(solve(st, transpose(Uc.eval(tau))));
}

// --- lifted moment dynamics --------------------------------------------------

LiftedPair lift(const ImpulsiveSystem& sys) {
    require_valid(sys);
    LiftedPair lp;
    lp.gen = kron_sum(sys.A, sys.A);
    for (const Mat& e : sys.Ec) lp.gen += kron(e, e);
    lp.jump = kron(sys.J, sys.J) + kron(sys.Ed, sys.Ed);
    return lp;
}

Mat monodromy(const ImpulsiveSystem& sys, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("monodromy: T must be positive");
    const LiftedPair lp = lift(sys);
    return expm(T * lp.gen) * lp.jump;
}

StabilityVerdict constant_dt_stable(const ImpulsiveSystem& sys, double T) {
    StabilityVerdict v;
    v.rho = spectral_radius(monodromy(sys, T));
    v.stable = v.rho < 1.0;
    return v;
}

Mat propagate_xi(const ImpulsiveSystem& sys, const Mat& Z, double t) {
    if (t < 0.0) throw std::invalid_argument("propagate_xi: t must be nonnegative");
    if (!Z.square() || Z.rows() != sys.n()) throw std::invalid_argument("propagate_xi: Z must be n x n");
    if (max_abs(Z - transpose(Z)) > 1e-12 * std::max(frobenius_norm(Z), 1e-300))
        throw std::invalid_argument("propagate_xi: Z asymmetric beyond tolerance");
    const LiftedPair lp = lift(sys);
    const Mat out = unvec(expm(t * transpose(lp.gen)) * vec(symmetrize(Z)), sys.n(), sys.n());
    return symmetrize(out);
}

int default_flow_steps(double theta) { return std::max(200, static_cast<int>(std::ceil(theta / 0.005))); }

// Lifted generator of the closed-loop flow at clock tau (covariance
// direction): Acl(tau) = A + Bc1 Kc(tau); channels Ec_i and Bc2 Kc(tau).
Mat closed_loop_lifted_gen(const ImpulsiveSystem& sys, const ControllerGains& gains, double tau) {
    Mat acl = sys.A;
    Mat gen;
    if (gains.has_continuous() && sys.mc() > 0) {
        const Mat kc = gains.eval_Kc(tau);
        acl += sys.Bc1 * kc;
        gen = kron_sum(acl, acl);
        const Mat bk = sys.Bc2 * kc;
        gen += kron(bk, bk);
    } else {
        gen = kron_sum(acl, acl);
    }
    for (const Mat& e : sys.Ec) gen += kron(e, e);
    return gen;
}

MomentFlow closed_loop_flow(const ImpulsiveSystem& sys, const ControllerGains& gains, double theta, int steps) {
    require_valid(sys);
    if (!(theta > 0.0)) throw std::invalid_argument("closed_loop_flow: theta must be positive");
    if (steps <= 0) steps = default_flow_steps(theta);

    // Integrate the time-ordered covariance flow forward; its transpose is
    // the map carrying Z to E[Phi_cl(theta)^T Z Phi_cl(theta)]. (For a
    // clock-varying generator the adjoint map is the transposed product in
    // reversed order, not the solution of the transposed ODE.)
    const int d = sys.n() * sys.n();
    Mat phi = Mat::identity(d);
    const double h = theta / steps;
    for (int k = 0; k < steps; ++k) {
        const double tau = k * h;
        const Mat g1 = closed_loop_lifted_gen(sys, gains, tau);
        const Mat g2 = closed_loop_lifted_gen(sys, gains, tau + 0.5 * h);
        const Mat g3 = closed_loop_lifted_gen(sys, gains, tau + h);
        const Mat k1 = g1 * phi;
        const Mat k2 = g2 * (phi + (0.5 * h) * k1);
        const Mat k3 = g2 * (phi + (0.5 * h) * k2);
        const Mat k4 = g3 * (phi + h * k3);
        phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!phi.all_finite()) throw NumericalError("closed_loop_flow: flow map diverged");
    return MomentFlow{transpose(phi)};
}

Mat closed_loop_lifted_jump(const ImpulsiveSystem& sys, const ControllerGains& gains) {
    Mat jcl = sys.J;
    Mat out;
    if (gains.has_discrete() && sys.md() > 0) {
        jcl += sys.Bd1 * gains.Kd;
        out = kron(jcl, jcl) + kron(sys.Ed, sys.Ed);
        const Mat bk = sys.Bd2 * gains.Kd;
        out += kron(bk, bk);
    } else {
        out = kron(jcl, jcl) + kron(sys.Ed, sys.Ed);
    }
    return out;
}

Mat closed_loop_monodromy(const ImpulsiveSystem& sys, const ControllerGains& gains, double theta, int steps) {
    const MomentFlow f = closed_loop_flow(sys, gains, theta, steps);
    return transpose(f.map) * closed_loop_lifted_jump(sys, gains);
}

} // namespace msstab
