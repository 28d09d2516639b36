#include "msstab/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace msstab {

LmiVar LmiVar::symmetric(int id, int dim, std::string name) {
    LmiVar v;
    v.id = id;
    v.kind = Kind::Symmetric;
    v.rows = v.cols = dim;
    v.name = std::move(name);
    if (dim < 1) throw std::invalid_argument("LmiVar: dimension must be >= 1");
    return v;
}

LmiVar LmiVar::rectangular(int id, int rows, int cols, std::string name) {
    LmiVar v;
    v.id = id;
    v.kind = Kind::Rectangular;
    v.rows = rows;
    v.cols = cols;
    v.name = std::move(name);
    if (rows < 1 || cols < 1) throw std::invalid_argument("LmiVar: dimensions must be >= 1");
    return v;
}

namespace {

// basis matrix for scalar parameter p of a variable
Mat basis_matrix(const LmiVar& v, int p) {
    Mat m(v.rows, v.cols);
    if (v.kind == LmiVar::Kind::Symmetric) {
        int k = 0;
        for (int i = 0; i < v.rows; ++i)
            for (int j = i; j < v.cols; ++j) {
                if (k == p) {
                    m(i, j) = 1.0;
                    m(j, i) = 1.0;
                    return m;
                }
                ++k;
            }
    } else {
        m.data()[p] = 1.0;
        return m;
    }
    throw std::logic_error("basis_matrix: parameter index out of range");
}

Mat value_from_params(const LmiVar& v, const double* x) {
    Mat m(v.rows, v.cols);
    if (v.kind == LmiVar::Kind::Symmetric) {
        int k = 0;
        for (int i = 0; i < v.rows; ++i)
            for (int j = i; j < v.cols; ++j) {
                m(i, j) = x[k];
                m(j, i) = x[k];
                ++k;
            }
    } else {
        for (int p = 0; p < v.rows * v.cols; ++p) m.data()[p] = x[p];
    }
    return m;
}

// squared Frobenius norm as a function of the parameters, with multiplicities
double param_norm_sq(const LmiVar& v, const double* x, std::vector<double>* mult = nullptr) {
    double s = 0.0;
    if (v.kind == LmiVar::Kind::Symmetric) {
        int k = 0;
        for (int i = 0; i < v.rows; ++i)
            for (int j = i; j < v.cols; ++j) {
                const double m = (i == j) ? 1.0 : 2.0;
                s += m * x[k] * x[k];
                if (mult) (*mult)[k] = m;
                ++k;
            }
    } else {
        for (int p = 0; p < v.rows * v.cols; ++p) {
            s += x[p] * x[p];
            if (mult) (*mult)[p] = 1.0;
        }
    }
    return s;
}

struct BlockData {
    int dim = 0;
    double scale = 1.0;
    Mat constant;                                // scaled
    std::vector<std::pair<int, Mat>> grads;      // (global param index, dF/dx) scaled
};

double trace_of(const Mat& m) {
    double t = 0.0;
    for (int i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

} // namespace

Mat lmi_assemble(const LmiBlock& block, const std::map<int, Mat>& witness) {
    Mat f = symmetrize(block.constant);
    for (const auto& t : block.terms) {
        auto it = witness.find(t.var_id);
        if (it == witness.end())
            throw std::invalid_argument("lmi_assemble: witness missing variable " + std::to_string(t.var_id));
        Mat c = t.left * it->second * t.right;
        if (t.symmetrize)
            f += c + transpose(c);
        else
            f += symmetrize(c);
    }
    return f;
}

std::string lmi_dump(const std::vector<LmiBlock>& blocks, const std::vector<LmiVar>& vars) {
    std::ostringstream os;
    os << "lmi program: " << blocks.size() << " blocks, " << vars.size() << " variables\n";
    for (const auto& v : vars) {
        os << "var " << v.id << " (" << v.name << "): "
           << (v.kind == LmiVar::Kind::Symmetric ? "symmetric " : "rectangular ") << v.rows << "x" << v.cols
           << "\n";
    }
    auto put_mat = [&os](const Mat& m) {
        for (int i = 0; i < m.rows(); ++i) {
            os << "    ";
            for (int j = 0; j < m.cols(); ++j) os << m(i, j) << (j + 1 == m.cols() ? "" : " ");
            os << "\n";
        }
    };
    for (size_t b = 0; b < blocks.size(); ++b) {
        os << "block " << b << " (" << blocks[b].name << "), dim " << blocks[b].dim() << ", constant:\n";
        put_mat(blocks[b].constant);
        for (const auto& t : blocks[b].terms) {
            os << "  term var=" << t.var_id << (t.symmetrize ? " (symmetrized)" : "") << " left:\n";
            put_mat(t.left);
            os << "  right:\n";
            put_mat(t.right);
        }
    }
    return os.str();
}

LmiVerdict lmi_solve(const std::vector<LmiBlock>& blocks, const std::vector<LmiVar>& vars,
                     const LmiOptions& opts) {
    if (blocks.empty()) throw std::invalid_argument("lmi_solve: program has no blocks");
    if (vars.empty()) throw std::invalid_argument("lmi_solve: program has no variables");

    // --- indexing ---
    std::map<int, int> var_index; // id -> position in vars
    std::vector<int> offsets(vars.size() + 1, 0);
    for (size_t i = 0; i < vars.size(); ++i) {
        if (!var_index.emplace(vars[i].id, static_cast<int>(i)).second)
            throw std::invalid_argument("lmi_solve: duplicate variable id");
        offsets[i + 1] = offsets[i] + vars[i].param_count();
    }
    const int M = offsets.back();

    int anchor = opts.anchor_var;
    if (anchor < 0) {
        for (size_t i = 0; i < vars.size(); ++i)
            if (vars[i].kind == LmiVar::Kind::Symmetric) {
                anchor = vars[i].id;
                break;
            }
    }
    auto anchor_it = var_index.find(anchor);
    if (anchor_it == var_index.end() || vars[anchor_it->second].kind != LmiVar::Kind::Symmetric)
        throw std::invalid_argument("lmi_solve: program needs a symmetric anchor variable");
    const int av = anchor_it->second;
    const double anchor_trace = opts.anchor_trace > 0.0 ? opts.anchor_trace : vars[av].rows;

    // --- precompute per-block gradients, apply scaling ---
    std::vector<BlockData> data(blocks.size());
    double total_constraint_dim = 0.0;
    for (size_t b = 0; b < blocks.size(); ++b) {
        const LmiBlock& blk = blocks[b];
        if (!blk.constant.square()) throw std::invalid_argument("lmi_solve: block constant not square");
        BlockData& bd = data[b];
        bd.dim = blk.dim();
        total_constraint_dim += bd.dim;

        double scale = frobenius_norm(blk.constant);
        // accumulate dF/dx per global parameter
        std::map<int, Mat> grads;
        for (const auto& t : blk.terms) {
            auto it = var_index.find(t.var_id);
            if (it == var_index.end()) throw std::invalid_argument("lmi_solve: term references unknown variable");
            const LmiVar& v = vars[it->second];
            if (t.left.cols() != v.rows || t.right.rows() != v.cols || t.left.rows() != bd.dim ||
                t.right.cols() != bd.dim)
                throw std::invalid_argument("lmi_solve: term dimensions inconsistent in block '" + blk.name + "'");
            scale = std::max(scale, frobenius_norm(t.left) * frobenius_norm(t.right));
            for (int p = 0; p < v.param_count(); ++p) {
                Mat g = t.left * basis_matrix(v, p) * t.right;
                if (t.symmetrize)
                    g += transpose(g);
                else
                    g = symmetrize(g);
                const int gp = offsets[it->second] + p;
                auto [git, fresh] = grads.try_emplace(gp, g);
                if (!fresh) git->second += g;
            }
        }
        bd.scale = blk.scale_hint > 0.0 ? blk.scale_hint : std::max(scale, 1e-100);
        bd.constant = symmetrize(blk.constant);
        bd.constant *= 1.0 / bd.scale;
        for (auto& [gp, g] : grads) {
            g *= 1.0 / bd.scale;
            if (max_abs(g) > 0.0) bd.grads.emplace_back(gp, g);
        }
    }

    // --- initial strictly feasible point ---
    std::vector<double> x(M, 0.0);
    {
        // anchor = (trace/d) I
        const LmiVar& va = vars[av];
        int k = 0;
        for (int i = 0; i < va.rows; ++i)
            for (int j = i; j < va.cols; ++j) {
                if (i == j) x[offsets[av] + k] = anchor_trace / va.rows;
                ++k;
            }
    }
    auto block_value = [&](size_t b, const std::vector<double>& xx) {
        Mat f = data[b].constant;
        for (const auto& [gp, g] : data[b].grads) {
            if (xx[gp] == 0.0) continue;
            Mat add = g;
            add *= xx[gp];
            f += add;
        }
        return f;
    };

    double t0 = std::numeric_limits<double>::infinity();
    for (size_t b = 0; b < blocks.size(); ++b) t0 = std::min(t0, min_eig_sym(-block_value(b, x)));
    double tvar = t0 - 1.0;

    const double R2 = opts.box_radius * opts.box_radius;
    const int total_params = M + 1; // + t

    // barrier value; +inf when infeasible
    auto barrier = [&](const std::vector<double>& xx, double tt, double eta) {
        double val = -eta * tt;
        for (size_t b = 0; b < blocks.size(); ++b) {
            Mat z = -block_value(b, xx);
            for (int i = 0; i < z.rows(); ++i) z(i, i) -= tt;
            Mat l;
            if (!cholesky(z, l)) return std::numeric_limits<double>::infinity();
            double ld = 0.0;
            for (int i = 0; i < l.rows(); ++i) ld += std::log(l(i, i));
            val -= 2.0 * ld;
        }
        for (size_t vi = 0; vi < vars.size(); ++vi) {
            const double ns = param_norm_sq(vars[vi], xx.data() + offsets[vi]);
            if (ns >= R2) return std::numeric_limits<double>::infinity();
            val -= std::log(R2 - ns);
        }
        return val;
    };

    // equality constraint row: trace of anchor
    std::vector<double> acon(total_params, 0.0);
    {
        const LmiVar& va = vars[av];
        int k = 0;
        for (int i = 0; i < va.rows; ++i)
            for (int j = i; j < va.cols; ++j) {
                if (i == j) acon[offsets[av] + k] = 1.0;
                ++k;
            }
    }

    std::ostringstream tracelog;
    int newton_steps = 0;
    const double m_total = total_constraint_dim + static_cast<double>(vars.size());
    double eta = 1.0;
    const double eta_final = m_total / opts.gap_tolerance;

    std::vector<double> grad(total_params);
    Mat hess(total_params, total_params);

    while (true) {
        for (int inner = 0; inner < opts.max_inner; ++inner) {
            // gradient and Hessian of the barrier at (x, tvar)
            std::fill(grad.begin(), grad.end(), 0.0);
            hess = Mat::zeros(total_params, total_params);
            grad[M] = -eta;

            bool breakdown = false;
            for (size_t b = 0; b < blocks.size(); ++b) {
                Mat z = -block_value(b, x);
                for (int i = 0; i < z.rows(); ++i) z(i, i) -= tvar;
                Mat l;
                if (!cholesky(z, l)) {
                    // interior lost to roundoff; fall back to the last iterate
                    breakdown = true;
                    break;
                }
                Mat zinv = solve(z, Mat::identity(z.rows()));
                zinv = symmetrize(zinv);
                const auto& gs = data[b].grads;
                std::vector<Mat> w(gs.size());
                for (size_t p = 0; p < gs.size(); ++p) w[p] = zinv * gs[p].second;
                // d/dx_p
                for (size_t p = 0; p < gs.size(); ++p) grad[gs[p].first] += trace_of(w[p]);
                // d/dt
                grad[M] += trace_of(zinv);
                // d2/dx_p dx_q
                for (size_t p = 0; p < gs.size(); ++p)
                    for (size_t q = p; q < gs.size(); ++q) {
                        double h = 0.0;
                        const Mat& wp = w[p];
                        const Mat& wq = w[q];
                        for (int i = 0; i < wp.rows(); ++i)
                            for (int j = 0; j < wp.cols(); ++j) h += wp(i, j) * wq(j, i);
                        hess(gs[p].first, gs[q].first) += h;
                        if (p != q) hess(gs[q].first, gs[p].first) += h;
                    }
                // d2/dx_p dt and d2/dt2
                for (size_t p = 0; p < gs.size(); ++p) {
                    double h = 0.0;
                    const Mat& wp = w[p];
                    for (int i = 0; i < wp.rows(); ++i)
                        for (int j = 0; j < wp.cols(); ++j) h += wp(i, j) * zinv(j, i);
                    hess(gs[p].first, M) += h;
                    hess(M, gs[p].first) += h;
                }
                double htt = 0.0;
                for (int i = 0; i < zinv.rows(); ++i)
                    for (int j = 0; j < zinv.cols(); ++j) htt += zinv(i, j) * zinv(j, i);
                hess(M, M) += htt;
            }
            if (breakdown) break;

            // box barriers
            for (size_t vi = 0; vi < vars.size(); ++vi) {
                std::vector<double> mult(vars[vi].param_count());
                const double ns = param_norm_sq(vars[vi], x.data() + offsets[vi], &mult);
                const double u = R2 - ns;
                for (int p = 0; p < vars[vi].param_count(); ++p) {
                    const double gp = 2.0 * mult[p] * x[offsets[vi] + p];
                    grad[offsets[vi] + p] += gp / u;
                    for (int q = 0; q < vars[vi].param_count(); ++q) {
                        const double gq = 2.0 * mult[q] * x[offsets[vi] + q];
                        hess(offsets[vi] + p, offsets[vi] + q) += gp * gq / (u * u);
                    }
                    hess(offsets[vi] + p, offsets[vi] + p) += 2.0 * mult[p] / u;
                }
            }

            // KKT system [[H, a], [a^T, 0]] [dx; nu] = [-g; 0]
            Mat kkt(total_params + 1, total_params + 1);
            for (int i = 0; i < total_params; ++i) {
                for (int j = 0; j < total_params; ++j) kkt(i, j) = hess(i, j);
                kkt(i, total_params) = acon[i];
                kkt(total_params, i) = acon[i];
            }
            Mat rhs(total_params + 1, 1);
            for (int i = 0; i < total_params; ++i) rhs(i, 0) = -grad[i];
            double drift = anchor_trace;
            for (int i = 0; i < M; ++i) drift -= acon[i] * x[i];
            rhs(total_params, 0) = drift;
            Mat step;
            try {
                step = solve(kkt, rhs);
            } catch (const NumericalError&) {
                throw NumericalError("lmi_solve: singular KKT system\n" + tracelog.str());
            }

            double decrement_sq = 0.0;
            for (int i = 0; i < total_params; ++i) decrement_sq -= grad[i] * step(i, 0);
            ++newton_steps;

            if (!(decrement_sq > 2e-11)) break;

            // backtracking line search on the barrier merit
            const double f0 = barrier(x, tvar, eta);
            double s = 1.0;
            std::vector<double> xt(M);
            double tt = 0.0;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                for (int i = 0; i < M; ++i) xt[i] = x[i] + s * step(i, 0);
                tt = tvar + s * step(M, 0);
                const double f1 = barrier(xt, tt, eta);
                if (f1 < f0 - 0.25 * s * decrement_sq) {
                    accepted = true;
                    break;
                }
                s *= 0.5;
            }
            if (!accepted) break; // stalled at numerical precision
            x.swap(xt);
            tvar = tt;
        }
        if (opts.collect_trace)
            tracelog << "eta=" << eta << " t=" << tvar << " steps=" << newton_steps << "\n";
        if (eta >= eta_final) break;
        eta = std::min(eta * 10.0, eta_final);
    }

    // --- verdict with independent residual verification ---
    LmiVerdict verdict;
    verdict.margin = tvar;
    verdict.newton_steps = newton_steps;
    verdict.trace = tracelog.str();
    {
        // settle residual drift of the trace constraint exactly
        double ax = 0.0, aa = 0.0;
        for (int i = 0; i < M; ++i) {
            ax += acon[i] * x[i];
            aa += acon[i] * acon[i];
        }
        const double corr = (anchor_trace - ax) / aa;
        for (int i = 0; i < M; ++i) x[i] += acon[i] * corr;
    }
    for (size_t vi = 0; vi < vars.size(); ++vi)
        verdict.witness[vars[vi].id] = value_from_params(vars[vi], x.data() + offsets[vi]);

    bool residuals_ok = true;
    for (size_t b = 0; b < blocks.size(); ++b) {
        const Mat assembled = lmi_assemble(blocks[b], verdict.witness);
        const double raw = min_eig_sym(-assembled);
        verdict.residuals.push_back(raw);
        verdict.block_scales.push_back(data[b].scale);
        if (raw < 0.5 * opts.feas_tolerance * data[b].scale) residuals_ok = false;
    }
    verdict.feasible = (tvar > opts.feas_tolerance) && residuals_ok;
    return verdict;
}

// ---------------------------------------------------------------------------
// BlockCanvas
// ---------------------------------------------------------------------------

BlockCanvas::BlockCanvas(std::vector<int> partition, std::string name) {
    offsets_.push_back(0);
    for (int p : partition) {
        if (p < 1) throw std::invalid_argument("BlockCanvas: partition entries must be >= 1");
        offsets_.push_back(offsets_.back() + p);
    }
    total_ = offsets_.back();
    block_.constant = Mat::zeros(total_, total_);
    block_.name = std::move(name);
}

Mat BlockCanvas::selector(int i) const {
    const int lo = offsets_.at(i), hi = offsets_.at(i + 1);
    Mat s(total_, hi - lo);
    for (int r = lo; r < hi; ++r) s(r, r - lo) = 1.0;
    return s;
}

void BlockCanvas::constant(int i, int j, const Mat& m) {
    const int r0 = offsets_.at(i), c0 = offsets_.at(j);
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
            block_.constant(r0 + r, c0 + c) += m(r, c);
            if (i != j) block_.constant(c0 + c, r0 + r) += m(r, c);
        }
    if (i == j && max_abs(m - transpose(m)) > 1e-12 * std::max(1.0, max_abs(m)))
        throw std::invalid_argument("BlockCanvas: diagonal constant must be symmetric");
}

void BlockCanvas::term(int i, int j, int var_id, const Mat& left, const Mat& right, bool he) {
    LmiTerm t;
    t.var_id = var_id;
    if (i != j && !he) throw std::invalid_argument("BlockCanvas: off-diagonal terms are always mirrored");
    t.left = selector(i) * left;
    t.right = right * transpose(selector(j));
    t.symmetrize = he;
    block_.terms.push_back(std::move(t));
}

void BlockCanvas::lifted_map(int i, int var_id, const Mat& K, double scale) {
    const int n2 = K.rows();
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n2))));
    if (n * n != n2 || K.cols() != n2) throw std::invalid_argument("BlockCanvas: lifted map must be n^2 x n^2");
    // K = sum_{r,c} (e_r e_c^T) (x) K_block(r,c); then unvec(K vec(X)) =
    // sum K_block(r,c) X (e_c e_r^T). Emit symmetrized halves so each term
    // stays within the sandwich form (the full sum is symmetric).
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            Mat kb(n, n);
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) kb(p, q) = K(r * n + p, c * n + q);
            if (max_abs(kb) == 0.0) continue;
            kb *= 0.5 * scale;
            Mat ecr(n, n);
            ecr(c, r) = 1.0;
            term(i, i, var_id, kb, ecr, true);
        }
}

LmiBlock BlockCanvas::take() { return std::move(block_); }

} // namespace msstab
