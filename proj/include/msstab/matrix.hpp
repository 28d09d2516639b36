#pragma once

// Dense real linear algebra used throughout the toolkit: matrix type,
// Kronecker products/sums, matrix exponential, eigenvalues and
// definiteness tests. Everything works on small dense matrices (the
// lifted second-moment objects are at most a few dozen rows).

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace msstab {

// Thrown when an iterative kernel fails to converge or a value leaves the
// representable range. Distinct from std::invalid_argument, which is used
// for caller mistakes (bad dimensions, asymmetric input, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Row-major dense matrix of doubles. Value type, freely copyable.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative dimension");
    }
    Mat(int rows, int cols, std::vector<double> entries) : rows_(rows), cols_(cols), a_(std::move(entries)) {
        if (a_.size() != static_cast<size_t>(rows) * cols)
            throw std::invalid_argument("Mat: entry count does not match rows*cols");
    }
    // Row-of-rows constructor for literals: Mat({{1,2},{3,4}}).
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    static Mat identity(int n);
    static Mat zeros(int rows, int cols) { return Mat(rows, cols); }
    static Mat diag(const std::vector<double>& d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }
    bool square() const { return rows_ == cols_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    Mat& operator+=(const Mat& b);
    Mat& operator-=(const Mat& b);
    Mat& operator*=(double s);

    bool all_finite() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double s, Mat a);
Mat operator*(Mat a, double s);
Mat operator-(Mat a);

bool same_shape(const Mat& a, const Mat& b);

Mat transpose(const Mat& a);
// (a + a^T)/2; input must be square.
Mat symmetrize(const Mat& a);

double frobenius_norm(const Mat& a);
double norm1(const Mat& a);      // max column sum
double norm_inf(const Mat& a);   // max row sum
double max_abs(const Mat& a);

// Solve a x = b (b may have several columns) by LU with partial pivoting.
Mat solve(const Mat& a, const Mat& b);
Mat inverse(const Mat& a);
double determinant(const Mat& a);

// Estimated 2-norm condition number via norm1(a)*norm1(inv(a)); cheap and
// adequate for the "refuse to invert" guards used by gain evaluation.
double cond1(const Mat& a);

// Cholesky factor L with a = L L^T. Returns false if a is not positive
// definite (leaves l unspecified in that case).
bool cholesky(const Mat& a, Mat& l);

// Kronecker product, dims (ra*rb) x (ca*cb).
Mat kron(const Mat& a, const Mat& b);
// Kronecker sum a (+) b = a (x) I + I (x) b; both inputs square.
Mat kron_sum(const Mat& a, const Mat& b);

// Column-stacking vectorization and its inverse: vec([[1,3],[2,4]]) = (1,2,3,4).
Mat vec(const Mat& a);
Mat unvec(const Mat& v, int rows, int cols);

// Matrix exponential by scaling-and-squaring with diagonal Pade approximants
// of order 3/5/7/9/13, switching on the 1-norm with the thresholds
// theta_3  = 1.495585217958292e-2,  theta_5 = 2.539398330063230e-1,
// theta_7  = 9.504178996162932e-1,  theta_9 = 2.097847961257068,
// theta_13 = 5.371920351148152 (2^s scaling above theta_13).
// Relative accuracy is ~1e-13 on well-conditioned inputs.
Mat expm(const Mat& a);

struct SpectralReport {
    std::vector<std::complex<double>> eigenvalues;
    double spectral_radius = 0.0;
    double max_real_part = 0.0;
};

// All eigenvalues of a real square matrix (balancing + Hessenberg reduction
// + Francis double-shift QR). Throws NumericalError on non-convergence.
SpectralReport eig(const Mat& a);

double spectral_radius(const Mat& a);

// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi). The input must
// be symmetric within 1e-12 * ||a||_F; it is symmetrized before solving.
double min_eig_sym(const Mat& a);
// Full ascending spectrum of a symmetric matrix.
std::vector<double> eig_sym(const Mat& a);

} // namespace msstab
