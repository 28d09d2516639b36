#include "msstab/dwell_search.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

namespace msstab {

std::vector<double> scan_spectral_radius(const ImpulsiveSystem& sys, double T_lo, double T_hi, int points,
                                         int threads) {
    if (points < 2) throw std::invalid_argument("scan_spectral_radius: need >= 2 points");
    if (!(0.0 < T_lo && T_lo < T_hi)) throw std::invalid_argument("scan_spectral_radius: bad range");
    const LiftedPair lp = lift(sys);
    std::vector<double> rho(points);
    const double dt = (T_hi - T_lo) / (points - 1);
    if (threads <= 0) threads = omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int i = 0; i < points; ++i) {
        const double T = T_lo + i * dt;
        rho[i] = spectral_radius(expm(T * lp.gen) * lp.jump);
    }
    return rho;
}

double bisect_smallest(const std::function<bool(double)>& pred, double lo, double hi, double tol,
                       int* evaluations) {
    int evals = 0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        ++evals;
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    if (evaluations) *evaluations += evals;
    return hi;
}

SearchResult smallest_constant_dt(const ImpulsiveSystem& sys, double T_lo, double T_hi,
                                  const SearchOptions& opts) {
    SearchResult res;
    res.method = "spectral-bisection";
    const int points = std::max(2, opts.scan_points);
    res.scan_value = scan_spectral_radius(sys, T_lo, T_hi, points, opts.threads);
    res.scan_T.resize(points);
    const double dt = (T_hi - T_lo) / (points - 1);
    for (int i = 0; i < points; ++i) res.scan_T[i] = T_lo + i * dt;
    res.evaluations = points;

    // stable intervals as seen by the scan
    const LiftedPair lp = lift(sys);
    auto rho_at = [&](double T) { return spectral_radius(expm(T * lp.gen) * lp.jump); };
    int first_cross = -1;
    for (int i = 0; i < points; ++i) {
        const bool stable = res.scan_value[i] < 1.0;
        if (stable && (i == 0 || res.scan_value[i - 1] >= 1.0)) {
            double left = res.scan_T[i];
            if (i > 0) {
                int ev = 0;
                left = bisect_smallest([&](double T) { return rho_at(T) < 1.0; }, res.scan_T[i - 1],
                                       res.scan_T[i], opts.tol, &ev);
                res.evaluations += ev;
                if (first_cross < 0) {
                    first_cross = i;
                    res.threshold = left;
                    res.bracket = {left - opts.tol, left};
                }
            }
            // close the interval at the next instability (or range end)
            int j = i;
            while (j + 1 < points && res.scan_value[j + 1] < 1.0) ++j;
            double right = res.scan_T[j];
            if (j + 1 < points) {
                int ev = 0;
                right = bisect_smallest([&](double T) { return rho_at(T) >= 1.0; }, res.scan_T[j],
                                        res.scan_T[j + 1], opts.tol, &ev) -
                        opts.tol;
                res.evaluations += ev;
            }
            res.stable_intervals.emplace_back(left, right);
        }
    }
    if (first_cross < 0) throw NumericalError("smallest_constant_dt: no threshold in range [" +
                                              std::to_string(T_lo) + ", " + std::to_string(T_hi) + "]");
    return res;
}

SearchResult smallest_constant_dt_pwl(const ImpulsiveSystem& sys, double T_lo, double T_hi, int N,
                                      const SearchOptions& opts) {
    // the certificate threshold sits above the spectral one; bracket from the
    // spectral search, then expand upward until the certificate holds
    SearchResult spectral = smallest_constant_dt(sys, T_lo, T_hi, opts);
    SearchResult res;
    res.method = "pwl-bisection(N=" + std::to_string(N) + ")";
    res.stable_intervals = spectral.stable_intervals;

    ClockOptions copts = opts.clock;
    auto feasible = [&](double T) {
        ++res.evaluations;
        return pwl_constant_dt(sys, T, N, copts).verdict;
    };
    double lo = std::max(T_lo, spectral.threshold - opts.tol);
    double hi = spectral.threshold;
    double step = std::max(0.05 * spectral.threshold, 4.0 * opts.tol);
    while (!feasible(hi)) {
        lo = hi;
        hi += step;
        step *= 2.0;
        if (hi > T_hi * 2.0)
            throw NumericalError("smallest_constant_dt_pwl: certificate infeasible up to " + std::to_string(hi));
    }
    res.threshold = bisect_smallest(feasible, lo, hi, opts.tol, &res.evaluations);
    res.bracket = {res.threshold - opts.tol, res.threshold};
    return res;
}

SearchResult smallest_minimum_dt(const ImpulsiveSystem& sys, double T_lo, double T_hi, CertMode mode,
                                 const SearchOptions& opts) {
    const LiftedPair lp = lift(sys);
    if (eig(lp.gen).max_real_part >= 0.0)
        throw NumericalError("smallest_minimum_dt: flow not mean-square stable (lifted generator not Hurwitz)");

    SearchResult res;
    ClockOptions copts = opts.clock;
    auto feasible = [&](double T) {
        ++res.evaluations;
        if (mode == CertMode::Pwl) return pwl_minimum_dt(sys, T, opts.pwl_segments, copts).verdict;
        return exact_minimum_dt(sys, T, copts).verdict;
    };
    res.method = mode == CertMode::Pwl ? "min-dt pwl-bisection(N=" + std::to_string(opts.pwl_segments) + ")"
                                       : "min-dt exact-bisection";
    if (!feasible(T_hi))
        throw NumericalError("smallest_minimum_dt: no certificate in range [" + std::to_string(T_lo) + ", " +
                             std::to_string(T_hi) + "]");
    if (feasible(T_lo)) {
        res.threshold = T_lo;
        res.bracket = {T_lo, T_lo};
        return res;
    }
    res.threshold = bisect_smallest(feasible, T_lo, T_hi, opts.tol, &res.evaluations);
    res.bracket = {res.threshold - opts.tol, res.threshold};
    return res;
}

SearchResult largest_ranged_tmax(const ImpulsiveSystem& sys, double T_min, double T_hi, CertMode mode,
                                 const SearchOptions& opts) {
    SearchResult res;
    ClockOptions copts = opts.clock;
    auto feasible = [&](double tmax) {
        ++res.evaluations;
        switch (mode) {
            case CertMode::Exact:
                return exact_ranged_dt(sys, T_min, tmax, opts.grid_points, copts).verdict;
            case CertMode::Pwl:
                return pwl_ranged_dt(sys, T_min, tmax, opts.pwl_segments, copts).verdict;
            case CertMode::Lifted:
                return lifted_quadratic_stability(sys, T_min, tmax, opts.grid_points, copts).verdict;
        }
        return false;
    };
    switch (mode) {
        case CertMode::Exact:
            res.method = "ranged exact-bisection(grid=" + std::to_string(opts.grid_points) + ")";
            break;
        case CertMode::Pwl:
            res.method = "ranged pwl-bisection(N=" + std::to_string(opts.pwl_segments) + ")";
            break;
        case CertMode::Lifted:
            res.method = "ranged lifted-bisection(grid=" + std::to_string(opts.grid_points) + ")";
            break;
    }
    if (!feasible(T_min)) {
        res.empty_interval = true;
        res.threshold = T_min;
        res.bracket = {T_min, T_min};
        return res;
    }
    if (feasible(T_hi)) {
        res.threshold = T_hi;
        res.bracket = {T_hi, T_hi};
        return res;
    }
    // feasibility shrinks as T_max grows: bisect the largest feasible point
    double lo = T_min, hi = T_hi;
    while (hi - lo > opts.tol) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    res.threshold = lo;
    res.bracket = {lo, hi};
    return res;
}

double decay_rate(const ImpulsiveSystem& sys, double T) {
    const double rho = spectral_radius(monodromy(sys, T));
    if (rho >= 1.0)
        throw NumericalError("decay_rate: system unstable at constant dwell-time " + std::to_string(T) +
                             " (rho = " + std::to_string(rho) + ")");
    return -std::log(rho) / (2.0 * T);
}

} // namespace msstab
