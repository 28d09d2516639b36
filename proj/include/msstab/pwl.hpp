#pragma once

// Piecewise-linear matrix-valued functions of the clock variable, and the
// factored clock-dependent controller gains recovered from synthesis.

#include "msstab/matrix.hpp"

#include <vector>

namespace msstab {

// Node matrices on a sorted clock grid, interpolated linearly on each
// segment. Evaluation clamps to the grid range (the clock-dependent objects
// freeze at the horizon).
class PwlMatrixFunction {
public:
    PwlMatrixFunction() = default;
    PwlMatrixFunction(std::vector<double> times, std::vector<Mat> nodes);

    // Uniform grid 0, h, ..., horizon with N segments.
    static PwlMatrixFunction uniform(double horizon, int segments, std::vector<Mat> nodes);

    int segments() const { return static_cast<int>(times_.size()) - 1; }
    double horizon() const { return times_.back(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<Mat>& nodes() const { return nodes_; }
    const Mat& node(int i) const { return nodes_.at(i); }

    Mat eval(double tau) const;
    // Constant slope (nodes[i+1]-nodes[i]) / (times[i+1]-times[i]) on segment i.
    Mat slope(int segment) const;
    // Derivative at tau (taking the left segment at interior nodes).
    Mat derivative(double tau) const;

private:
    int segment_of(double tau) const;

    std::vector<double> times_;
    std::vector<Mat> nodes_;
};

// Clock-dependent continuous gain stored in factored form
// K_c(tau) = U_c(tau) * Stilde(tau)^{-1} (piecewise-rational; never sampled),
// frozen at the horizon value for tau beyond the grid, plus a constant
// discrete gain K_d. Either part may be absent (zero-width gain).
struct ControllerGains {
    PwlMatrixFunction Uc;      // m_c x n nodes; empty when m_c = 0
    PwlMatrixFunction Stilde;  // n x n symmetric nodes; required when Uc present
    Mat Kd;                    // m_d x n; zero-row matrix when m_d = 0

    bool has_continuous() const { return !Uc.nodes().empty(); }
    bool has_discrete() const { return Kd.rows() > 0; }

    // U_c(tau) * Stilde(tau)^{-1} via a linear solve; tau clamped to the
    // horizon. Throws NumericalError when Stilde(tau) is near-singular
    // (1-norm condition estimate above 1e12). The condition estimate can be
    // skipped in hot loops that evaluate the same certified factors
    // repeatedly.
    Mat eval_Kc(double tau, bool check_condition = true) const;
};

} // namespace msstab
