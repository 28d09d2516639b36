#pragma once

// Exact second-moment machinery. The expectation of the quadratic form
// Xi_Z(t) = Phi(t)^T Z Phi(t) along the stochastic flow obeys the linear
// matrix ODE  Qdot = A^T Q + Q A + sum_i Ec_i^T Q Ec_i, so every moment
// computation here is deterministic: vectorize, multiply by the lifted
// generator, and exponentiate.

#include "msstab/pwl.hpp"
#include "msstab/system.hpp"

namespace msstab {

// gen  = A (+) A + sum_i Ec_i (x) Ec_i        (n^2 x n^2)
// jump = J (x) J + Ed (x) Ed
struct LiftedPair {
    Mat gen;
    Mat jump;
};

// Linear map on vectorized symmetric matrices carrying E[Phi^T Z Phi]
// across one dwell interval of a (possibly clock-varying) closed loop.
struct MomentFlow {
    Mat map; // n^2 x n^2
};

LiftedPair lift(const ImpulsiveSystem& sys);

// One-period second-moment map M(T) = expm(gen*T) * jump; mean-square
// stability under constant dwell-time T is equivalent to M(T) Schur stable.
Mat monodromy(const ImpulsiveSystem& sys, double T);

struct StabilityVerdict {
    bool stable = false;
    double rho = 0.0;
};

StabilityVerdict constant_dt_stable(const ImpulsiveSystem& sys, double T);

// E[Phi(t)^T Z Phi(t)] = unvec(expm(gen^T t) vec(Z)), symmetrized.
// Z must be symmetric (tolerance 1e-12 * ||Z||).
Mat propagate_xi(const ImpulsiveSystem& sys, const Mat& Z, double t);

// Default step count for the fixed-step RK4 on the lifted clock-varying ODE.
int default_flow_steps(double theta);

// Adjoint-direction flow map F(theta) for the closed loop: carries vec(Z)
// to vec(E[Phi_cl(theta)^T Z Phi_cl(theta)]), where Phi_cl has drift
// A + Bc1 Kc(tau) and diffusion channels Ec_i and Bc2 Kc(tau). Fixed-step
// RK4 with `steps` steps (steps <= 0 picks the default).
MomentFlow closed_loop_flow(const ImpulsiveSystem& sys, const ControllerGains& gains, double theta,
                            int steps = 0);

// Lifted jump of the closed loop:
// (J + Bd1 Kd) (x) (J + Bd1 Kd) + Ed (x) Ed + (Bd2 Kd) (x) (Bd2 Kd).
Mat closed_loop_lifted_jump(const ImpulsiveSystem& sys, const ControllerGains& gains);

// Lifted covariance generator of the closed-loop flow at clock tau:
// Acl (+) Acl + sum_i Ec_i (x) Ec_i + (Bc2 Kc(tau)) (x) (Bc2 Kc(tau))
// with Acl = A + Bc1 Kc(tau).
Mat closed_loop_lifted_gen(const ImpulsiveSystem& sys, const ControllerGains& gains, double tau);

// One-period closed-loop second-moment map F(theta)^T * jump_cl, equal to
// monodromy() when the gains are zero; spectral radius < 1 certifies
// mean-square stability at dwell time theta.
Mat closed_loop_monodromy(const ImpulsiveSystem& sys, const ControllerGains& gains, double theta,
                          int steps = 0);

} // namespace msstab
