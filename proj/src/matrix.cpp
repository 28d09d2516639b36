#include "msstab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace msstab {

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    a_.reserve(static_cast<size_t>(rows_) * cols_);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != cols_) throw std::invalid_argument("Mat: ragged initializer");
        a_.insert(a_.end(), r.begin(), r.end());
    }
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::diag(const std::vector<double>& d) {
    Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
}

bool Mat::all_finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

bool same_shape(const Mat& a, const Mat& b) { return a.rows() == b.rows() && a.cols() == b.cols(); }

Mat& Mat::operator+=(const Mat& b) {
    if (!same_shape(*this, b)) throw std::invalid_argument("Mat+: shape mismatch");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += b.a_[i];
    return *this;
}

Mat& Mat::operator-=(const Mat& b) {
    if (!same_shape(*this, b)) throw std::invalid_argument("Mat-: shape mismatch");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= b.a_[i];
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double s, Mat a) { return a *= s; }
Mat operator*(Mat a, double s) { return a *= s; }
Mat operator-(Mat a) { return a *= -1.0; }

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("Mat*: inner dimension mismatch");
    Mat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Mat transpose(const Mat& a) {
    Mat t(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Mat symmetrize(const Mat& a) {
    if (!a.square()) throw std::invalid_argument("symmetrize: matrix not square");
    Mat s(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
    return s;
}

double frobenius_norm(const Mat& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

double norm1(const Mat& a) {
    double best = 0.0;
    for (int j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

double norm_inf(const Mat& a) {
    double best = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

double max_abs(const Mat& a) {
    double best = 0.0;
    for (double v : a.data()) best = std::max(best, std::abs(v));
    return best;
}

namespace {

// LU with partial pivoting; returns factorization in-place plus pivot rows.
// Throws NumericalError on exact singularity.
void lu_factor(Mat& a, std::vector<int>& piv, int* sign) {
    const int n = a.rows();
    piv.resize(n);
    if (sign) *sign = 1;
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                p = i;
            }
        }
        piv[k] = p;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            if (sign) *sign = -*sign;
        }
        if (a(k, k) == 0.0) throw NumericalError("lu_factor: singular matrix");
        const double inv = 1.0 / a(k, k);
        for (int i = k + 1; i < n; ++i) {
            a(i, k) *= inv;
            const double lik = a(i, k);
            if (lik == 0.0) continue;
            for (int j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
        }
    }
}

} // namespace

Mat solve(const Mat& a, const Mat& b) {
    if (!a.square()) throw std::invalid_argument("solve: matrix not square");
    if (a.rows() != b.rows()) throw std::invalid_argument("solve: rhs row mismatch");
    Mat lu = a;
    std::vector<int> piv;
    lu_factor(lu, piv, nullptr);
    Mat x = b;
    const int n = a.rows();
    // apply the recorded row interchanges, then forward-substitute with unit L
    for (int k = 0; k < n; ++k)
        if (piv[k] != k)
            for (int j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(piv[k], j));
    for (int k = 0; k < n; ++k) {
        for (int i = k + 1; i < n; ++i) {
            const double l = lu(i, k);
            if (l == 0.0) continue;
            for (int j = 0; j < x.cols(); ++j) x(i, j) -= l * x(k, j);
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        const double inv = 1.0 / lu(k, k);
        for (int j = 0; j < x.cols(); ++j) {
            double s = x(k, j);
            for (int i = k + 1; i < n; ++i) s -= lu(k, i) * x(i, j);
            x(k, j) = s * inv;
        }
    }
    return x;
}

Mat inverse(const Mat& a) { return solve(a, Mat::identity(a.rows())); }

double determinant(const Mat& a) {
    if (!a.square()) throw std::invalid_argument("determinant: matrix not square");
    if (a.rows() == 0) return 1.0;
    Mat lu = a;
    std::vector<int> piv;
    int sign = 1;
    try {
        lu_factor(lu, piv, &sign);
    } catch (const NumericalError&) {
        return 0.0;
    }
    double d = sign;
    for (int i = 0; i < a.rows(); ++i) d *= lu(i, i);
    return d;
}

double cond1(const Mat& a) {
    try {
        return norm1(a) * norm1(inverse(a));
    } catch (const NumericalError&) {
        return std::numeric_limits<double>::infinity();
    }
}

bool cholesky(const Mat& a, Mat& l) {
    if (!a.square()) throw std::invalid_argument("cholesky: matrix not square");
    const int n = a.rows();
    l = Mat(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        l(j, j) = std::sqrt(d);
        const double inv = 1.0 / l(j, j);
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s * inv;
        }
    }
    return true;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat c(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const double aij = a(i, j);
            if (aij == 0.0) continue;
            for (int p = 0; p < b.rows(); ++p)
                for (int q = 0; q < b.cols(); ++q) c(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
        }
    return c;
}

Mat kron_sum(const Mat& a, const Mat& b) {
    if (!a.square() || !b.square()) throw std::invalid_argument("kron_sum: inputs must be square");
    return kron(a, Mat::identity(b.rows())) + kron(Mat::identity(a.rows()), b);
}

Mat vec(const Mat& a) {
    Mat v(a.rows() * a.cols(), 1);
    int k = 0;
    for (int j = 0; j < a.cols(); ++j)
        for (int i = 0; i < a.rows(); ++i) v(k++, 0) = a(i, j);
    return v;
}

Mat unvec(const Mat& v, int rows, int cols) {
    if (v.cols() != 1 || v.rows() != rows * cols) throw std::invalid_argument("unvec: length mismatch");
    Mat a(rows, cols);
    int k = 0;
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) a(i, j) = v(k++, 0);
    return a;
}

namespace {

void pade_uv(const Mat& a, int order, Mat& u, Mat& v) {
    const int n = a.rows();
    const Mat id = Mat::identity(n);
    if (order == 3) {
        static const double b[] = {120, 60, 12, 1};
        const Mat a2 = a * a;
        u = a * (b[3] * a2 + b[1] * id);
        v = b[2] * a2 + b[0] * id;
    } else if (order == 5) {
        static const double b[] = {30240, 15120, 3360, 420, 30, 1};
        const Mat a2 = a * a, a4 = a2 * a2;
        u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
        v = b[4] * a4 + b[2] * a2 + b[0] * id;
    } else if (order == 7) {
        static const double b[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
        const Mat a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
        u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
        v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    } else if (order == 9) {
        static const double b[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                   30270240.0,    2162160.0,    110880.0,     3960.0,
                                   90.0,          1.0};
        const Mat a2 = a * a, a4 = a2 * a2, a6 = a4 * a2, a8 = a6 * a2;
        u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
        v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    } else { // 13
        static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
        const Mat a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
        Mat w = b[13] * a6 + b[11] * a4 + b[9] * a2;
        u = a * (a6 * w + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
        w = b[12] * a6 + b[10] * a4 + b[8] * a2;
        v = a6 * w + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    }
}

} // namespace

Mat expm(const Mat& a) {
    if (!a.square()) throw std::invalid_argument("expm: matrix not square");
    if (!a.all_finite()) throw NumericalError("expm: non-finite input");
    const int n = a.rows();
    if (n == 0) return Mat(0, 0);
    const double nrm = norm1(a);
    if (nrm > 1e8) throw NumericalError("expm: input norm " + std::to_string(nrm) + " out of solver range");

    int squarings = 0;
    Mat u, v;
    if (nrm < 1.495585217958292e-2) {
        pade_uv(a, 3, u, v);
    } else if (nrm < 2.539398330063230e-1) {
        pade_uv(a, 5, u, v);
    } else if (nrm < 9.504178996162932e-1) {
        pade_uv(a, 7, u, v);
    } else if (nrm < 2.097847961257068) {
        pade_uv(a, 9, u, v);
    } else {
        const double theta13 = 5.371920351148152;
        std::frexp(nrm / theta13, &squarings);
        if (squarings < 0) squarings = 0;
        Mat scaled = a;
        scaled *= std::ldexp(1.0, -squarings);
        pade_uv(scaled, 13, u, v);
    }
    Mat r = solve(v - u, v + u);
    for (int i = 0; i < squarings; ++i) r = r * r;
    if (!r.all_finite()) throw NumericalError("expm: overflow during squaring");
    return r;
}

// ---------------------------------------------------------------------------
// General real eigenvalues: balance + Householder Hessenberg + Francis QR.
// ---------------------------------------------------------------------------

namespace {

void balance(Mat& a) {
    const int n = a.rows();
    const double radix = 2.0;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0, s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double ginv = 1.0 / f;
                for (int j = 0; j < n; ++j) a(i, j) *= ginv;
                for (int j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

void hessenberg(Mat& a) {
    const int n = a.rows();
    for (int k = 1; k < n - 1; ++k) {
        double scale = 0.0;
        for (int i = k; i < n; ++i) scale = std::max(scale, std::abs(a(i, k - 1)));
        if (scale == 0.0) continue;
        double h = 0.0;
        std::vector<double> w(n, 0.0);
        for (int i = k; i < n; ++i) {
            w[i] = a(i, k - 1) / scale;
            h += w[i] * w[i];
        }
        double g = std::sqrt(h);
        if (w[k] > 0.0) g = -g;
        h -= w[k] * g;
        w[k] -= g;
        // apply P = I - w w^T / h from both sides
        for (int j = 0; j < n; ++j) {
            double f = 0.0;
            for (int i = k; i < n; ++i) f += w[i] * a(i, j);
            f /= h;
            for (int i = k; i < n; ++i) a(i, j) -= f * w[i];
        }
        for (int i = 0; i < n; ++i) {
            double f = 0.0;
            for (int j = k; j < n; ++j) f += a(i, j) * w[j];
            f /= h;
            for (int j = k; j < n; ++j) a(i, j) -= f * w[j];
        }
        a(k, k - 1) = scale * g;
        for (int i = k + 1; i < n; ++i) a(i, k - 1) = 0.0;
    }
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
void hqr(Mat& a, std::vector<std::complex<double>>& out) {
    const int n = a.rows();
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    if (anorm == 0.0) {
        out.assign(n, {0.0, 0.0});
        return;
    }
    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        while (true) {
            int l;
            for (l = nn; l >= 1; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) + s == s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                out.push_back({x + t, 0.0});
                --nn;
                break;
            }
            double y = a(nn - 1, nn - 1);
            double w = a(nn, nn - 1) * a(nn - 1, nn);
            if (l == nn - 1) {
                double p = 0.5 * (y - x);
                double q = p * p + w;
                double z = std::sqrt(std::abs(q));
                x += t;
                if (q >= 0.0) {
                    z = p + (p >= 0.0 ? z : -z);
                    out.push_back({x + z, 0.0});
                    out.push_back({z != 0.0 ? x - w / z : x + z, 0.0});
                } else {
                    out.push_back({x + p, z});
                    out.push_back({x + p, -z});
                }
                nn -= 2;
                break;
            }
            if (its == 30 * std::max(n, 10))
                throw NumericalError("eig: QR iteration failed to converge after " + std::to_string(its) +
                                     " iterations on a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
            double p = 0, q = 0, z = 0, r = 0, s = 0;
            if (its == 10 || its == 20) {
                // exceptional shift
                t += x;
                for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                x = y = 0.75 * s;
                w = -0.4375 * s * s;
            }
            ++its;
            int m;
            for (m = nn - 2; m >= l; --m) {
                z = a(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                q = a(m + 1, m + 1) - z - r - s;
                r = a(m + 2, m + 1);
                s = std::abs(p) + std::abs(q) + std::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l) break;
                double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                if (u + v == v) break;
            }
            for (int i = m + 2; i <= nn; ++i) {
                a(i, i - 2) = 0.0;
                if (i != m + 2) a(i, i - 3) = 0.0;
            }
            for (int k = m; k <= nn - 1; ++k) {
                if (k != m) {
                    p = a(k, k - 1);
                    q = a(k + 1, k - 1);
                    r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x != 0.0) {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                s = std::sqrt(p * p + q * q + r * r);
                if (p < 0.0) s = -s;
                if (s == 0.0) continue;
                if (k == m) {
                    if (l != m) a(k, k - 1) = -a(k, k - 1);
                } else {
                    a(k, k - 1) = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;
                for (int j = k; j <= nn; ++j) {
                    p = a(k, j) + q * a(k + 1, j);
                    if (k != nn - 1) {
                        p += r * a(k + 2, j);
                        a(k + 2, j) -= p * z;
                    }
                    a(k + 1, j) -= p * y;
                    a(k, j) -= p * x;
                }
                const int mmin = nn < k + 3 ? nn : k + 3;
                for (int i = l; i <= mmin; ++i) {
                    p = x * a(i, k) + y * a(i, k + 1);
                    if (k != nn - 1) {
                        p += z * a(i, k + 2);
                        a(i, k + 2) -= p * r;
                    }
                    a(i, k + 1) -= p * q;
                    a(i, k) -= p;
                }
            }
        }
    }
}

} // namespace

SpectralReport eig(const Mat& a) {
    if (!a.square()) throw std::invalid_argument("eig: matrix not square");
    if (!a.all_finite()) throw NumericalError("eig: non-finite input");
    Mat h = a;
    balance(h);
    hessenberg(h);
    SpectralReport rep;
    hqr(h, rep.eigenvalues);
    if (!rep.eigenvalues.empty()) {
        rep.spectral_radius = std::abs(rep.eigenvalues[0]);
        rep.max_real_part = rep.eigenvalues[0].real();
        for (const auto& ev : rep.eigenvalues) {
            rep.spectral_radius = std::max(rep.spectral_radius, std::abs(ev));
            rep.max_real_part = std::max(rep.max_real_part, ev.real());
        }
    }
    return rep;
}

double spectral_radius(const Mat& a) { return eig(a).spectral_radius; }

std::vector<double> eig_sym(const Mat& a) {
    if (!a.square()) throw std::invalid_argument("eig_sym: matrix not square");
    const int n = a.rows();
    if (n == 0) return {};
    const double scale = frobenius_norm(a);
    double asym = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(a(i, j) - a(j, i)));
    if (asym > 1e-12 * std::max(scale, 1e-300) && asym > 1e-300)
        throw std::invalid_argument("eig_sym: matrix asymmetric beyond tolerance (" + std::to_string(asym) + ")");
    Mat s = symmetrize(a);

    // cyclic Jacobi
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
        if (std::sqrt(off) <= 1e-15 * std::max(scale, 1e-300)) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(s(p, q)) <= 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = s(k, p), akq = s(k, q);
                    s(k, p) = c * akp - sn * akq;
                    s(k, q) = sn * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = s(p, k), aqk = s(q, k);
                    s(p, k) = c * apk - sn * aqk;
                    s(q, k) = sn * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = s(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

double min_eig_sym(const Mat& a) {
    auto ev = eig_sym(a);
    if (ev.empty()) throw std::invalid_argument("min_eig_sym: empty matrix");
    return ev.front();
}

} // namespace msstab
