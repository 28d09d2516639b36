#include "msstab/system.hpp"

#include <sstream>

namespace msstab {

ImpulsiveSystem ImpulsiveSystem::uncontrolled(Mat a, Mat ec, Mat j, Mat ed) {
    return uncontrolled_multi(std::move(a), {std::move(ec)}, std::move(j), std::move(ed));
}

ImpulsiveSystem ImpulsiveSystem::uncontrolled_multi(Mat a, std::vector<Mat> ec, Mat j, Mat ed) {
    ImpulsiveSystem s;
    const int n = a.rows();
    s.A = std::move(a);
    s.Ec = std::move(ec);
    s.J = std::move(j);
    s.Ed = std::move(ed);
    s.Bc1 = Mat(n, 0);
    s.Bc2 = Mat(n, 0);
    s.Bd1 = Mat(n, 0);
    s.Bd2 = Mat(n, 0);
    return s;
}

ImpulsiveSystem MultiJumpImpulsiveSystem::with_jump(size_t k) const {
    return ImpulsiveSystem::uncontrolled_multi(A, Ec, jumps.at(k).first, jumps.at(k).second);
}

std::string dwell_kind(const DwellTimeSpec& spec) {
    if (std::holds_alternative<ConstantDwell>(spec)) return "constant";
    if (std::holds_alternative<RangedDwell>(spec)) return "ranged";
    return "minimum";
}

void validate(const DwellTimeSpec& spec) {
    if (const auto* c = std::get_if<ConstantDwell>(&spec)) {
        if (!(c->T > 0.0)) throw std::invalid_argument("dwell: constant T must be positive");
    } else if (const auto* r = std::get_if<RangedDwell>(&spec)) {
        if (!(r->T_min > 0.0)) throw std::invalid_argument("dwell: T_min must be positive");
        if (!(r->T_min <= r->T_max)) throw std::invalid_argument("dwell: requires T_min <= T_max");
    } else if (const auto* m = std::get_if<MinimumDwell>(&spec)) {
        if (!(m->T > 0.0)) throw std::invalid_argument("dwell: minimum T must be positive");
    }
}

namespace {

void check_dims(std::vector<std::string>& errs, const Mat& m, int rows, int cols, const std::string& name) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << name << ": expected " << rows << "x" << cols << ", got " << m.rows() << "x" << m.cols();
        errs.push_back(os.str());
    }
    if (!m.all_finite()) errs.push_back(name + ": contains non-finite entries");
}

} // namespace

std::vector<std::string> validate(const ImpulsiveSystem& sys) {
    std::vector<std::string> errs;
    const int n = sys.A.rows();
    if (n == 0) errs.push_back("A: empty");
    if (sys.A.cols() != n) errs.push_back("A: not square");
    if (!sys.A.all_finite()) errs.push_back("A: contains non-finite entries");
    if (sys.Ec.empty()) errs.push_back("E_c: at least one flow diffusion channel required (may be zero)");
    for (size_t i = 0; i < sys.Ec.size(); ++i)
        check_dims(errs, sys.Ec[i], n, n, "E_c[" + std::to_string(i) + "]");
    check_dims(errs, sys.J, n, n, "J");
    check_dims(errs, sys.Ed, n, n, "E_d");
    check_dims(errs, sys.Bc1, n, sys.Bc1.cols(), "B_c1");
    check_dims(errs, sys.Bc2, n, sys.Bc1.cols(), "B_c2");
    check_dims(errs, sys.Bd1, n, sys.Bd1.cols(), "B_d1");
    check_dims(errs, sys.Bd2, n, sys.Bd1.cols(), "B_d2");
    return errs;
}

std::vector<std::string> validate(const SwitchedSystem& sw) {
    std::vector<std::string> errs;
    if (sw.modes.size() < 2) errs.push_back("modes: at least two modes required");
    const int n = sw.n();
    for (size_t i = 0; i < sw.modes.size(); ++i) {
        check_dims(errs, sw.modes[i].first, n, n, "G[" + std::to_string(i) + "]");
        check_dims(errs, sw.modes[i].second, n, n, "H[" + std::to_string(i) + "]");
    }
    return errs;
}

std::vector<std::string> validate(const SampledDataSystem& sd) {
    std::vector<std::string> errs;
    const int n = sd.A_sd.rows();
    if (n == 0) errs.push_back("A_sd: empty");
    if (sd.A_sd.cols() != n) errs.push_back("A_sd: not square");
    check_dims(errs, sd.B_sd, n, sd.B_sd.cols(), "B_sd");
    if (sd.B_sd.cols() == 0) errs.push_back("B_sd: at least one input column required");
    check_dims(errs, sd.E_sd, n, n, "E_sd");
    if (!(sd.alpha >= 0.0)) errs.push_back("alpha: must be nonnegative");
    return errs;
}

namespace {

template <typename T>
void require_valid_impl(const T& obj, const char* what) {
    auto errs = validate(obj);
    if (errs.empty()) return;
    std::string msg = std::string(what) + " invalid:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
}

} // namespace

void require_valid(const ImpulsiveSystem& sys) { require_valid_impl(sys, "impulsive system"); }
void require_valid(const SwitchedSystem& sw) { require_valid_impl(sw, "switched system"); }
void require_valid(const SampledDataSystem& sd) { require_valid_impl(sd, "sampled-data system"); }

MultiJumpImpulsiveSystem switched_to_impulsive(const SwitchedSystem& sw) {
    require_valid(sw);
    const int n = sw.n();
    const int N = static_cast<int>(sw.modes.size());
    MultiJumpImpulsiveSystem out;
    out.A = Mat::zeros(N * n, N * n);
    Mat ec = Mat::zeros(N * n, N * n);
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                out.A(k * n + i, k * n + j) = sw.modes[k].first(i, j);
                ec(k * n + i, k * n + j) = sw.modes[k].second(i, j);
            }
    out.Ec = {ec};
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            Mat eij = Mat::zeros(N, N);
            eij(i, j) = 1.0;
            out.jumps.emplace_back(kron(eij, Mat::identity(n)), Mat::zeros(N * n, N * n));
        }
    return out;
}

ImpulsiveSystem sampled_data_to_impulsive(const SampledDataSystem& sd, const std::optional<Mat>& K_d) {
    require_valid(sd);
    const int n = sd.n(), m = sd.m(), d = n + m;

    ImpulsiveSystem s;
    s.A = Mat::zeros(d, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) s.A(i, j) = sd.A_sd(i, j);
        for (int j = 0; j < m; ++j) s.A(i, n + j) = sd.B_sd(i, j);
    }

    Mat e1 = Mat::zeros(d, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) e1(i, j) = sd.E_sd(i, j);
    Mat e2 = Mat::zeros(d, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) e2(i, n + j) = sd.alpha * sd.B_sd(i, j);
    s.Ec = {e1, e2};

    Mat j0 = Mat::zeros(d, d);
    for (int i = 0; i < n; ++i) j0(i, i) = 1.0;
    Mat bbar = Mat::zeros(d, m);
    for (int i = 0; i < m; ++i) bbar(n + i, i) = 1.0;

    s.J = j0;
    if (K_d) {
        if (K_d->rows() != m || K_d->cols() != d)
            throw std::invalid_argument("sampled_data_to_impulsive: K_d must be " + std::to_string(m) + "x" +
                                        std::to_string(d));
        s.J += bbar * (*K_d);
    }
    s.Ed = Mat::zeros(d, d);
    s.Bc1 = Mat(d, 0);
    s.Bc2 = Mat(d, 0);
    s.Bd1 = bbar;
    s.Bd2 = Mat::zeros(d, m);
    return s;
}

} // namespace msstab
