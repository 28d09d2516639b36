#pragma once

// Margin-maximizing feasibility solver for structured LMIs with symmetric
// and rectangular matrix decision variables.
//
// A program is a list of blocks F_b(X_1..X_V) = C_b + sum of term
// contributions, each required to satisfy F_b <= -t I. The solver maximizes
// the uniform margin t by a log-barrier Newton method, subject to a trace
// normalization on one designated symmetric "anchor" variable (the programs
// here are homogeneous, so the anchor pins the ray) and Frobenius-ball
// bounds on every variable. Verdicts are re-verified post hoc: the blocks
// are re-assembled at the witness and their eigenvalues recomputed
// independently of the solver's internal state.

#include "msstab/matrix.hpp"

#include <map>
#include <string>
#include <vector>

namespace msstab {

struct LmiVar {
    enum class Kind { Symmetric, Rectangular };
    int id = 0;
    Kind kind = Kind::Symmetric;
    int rows = 0, cols = 0; // rows == cols for symmetric
    std::string name;

    static LmiVar symmetric(int id, int dim, std::string name);
    static LmiVar rectangular(int id, int rows, int cols, std::string name);
    int param_count() const {
        return kind == Kind::Symmetric ? rows * (rows + 1) / 2 : rows * cols;
    }
};

// Contribution left * X * right to a block; with symmetrize also the
// transposed copy (so the assembled block stays symmetric). Without
// symmetrize the product must be symmetric by construction.
struct LmiTerm {
    int var_id = 0;
    Mat left, right;
    bool symmetrize = false;
};

struct LmiBlock {
    Mat constant;             // symmetric k x k
    std::vector<LmiTerm> terms;
    std::string name;
    // Scale used to normalize the block before margin maximization; 0 picks
    // the max Frobenius norm of the constituents. Blocks whose terms carry
    // grid-induced factors (the 1/h slopes of the piecewise-linear
    // conditions) must pass a grid-independent hint, otherwise the uniform
    // margin goes blind to violations of the other blocks.
    double scale_hint = 0.0;

    int dim() const { return constant.rows(); }
};

struct LmiOptions {
    double feas_tolerance = 1e-7; // on unit-scaled data
    double box_radius = 1e4;      // Frobenius bound per variable
    int anchor_var = -1;          // -1: first symmetric variable
    double anchor_trace = -1.0;   // <0: anchor dimension
    double gap_tolerance = 1e-10; // barrier duality-gap target for t
    int max_inner = 60;           // Newton steps per barrier stage
    bool collect_trace = false;   // keep an iterate log in the verdict
};

struct LmiVerdict {
    bool feasible = false;
    double margin = 0.0;                  // best uniform t on scaled data
    std::map<int, Mat> witness;           // var id -> value
    std::vector<double> residuals;        // per block: min eig of -F_b (unscaled)
    std::vector<double> block_scales;     // the applied scaling factors
    int newton_steps = 0;
    std::string trace;                    // iterate log (collect_trace)
};

// Solve the margin-maximization program. Throws std::invalid_argument for
// ill-posed programs (no blocks, no symmetric anchor, dimension mismatches)
// and NumericalError with the iterate trace on solver breakdown.
LmiVerdict lmi_solve(const std::vector<LmiBlock>& blocks, const std::vector<LmiVar>& vars,
                     const LmiOptions& opts = {});

// Numerically assemble one block at a witness (post-hoc verification path).
Mat lmi_assemble(const LmiBlock& block, const std::map<int, Mat>& witness);

// Plain-text dump of a program (constant + term list per block).
std::string lmi_dump(const std::vector<LmiBlock>& blocks, const std::vector<LmiVar>& vars);

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

// Assembles a symmetric block matrix from placements on a grid of row/column
// partitions. Off-diagonal placements contribute the mirrored transpose.
class BlockCanvas {
public:
    explicit BlockCanvas(std::vector<int> partition, std::string name = {});

    void set_scale_hint(double s) { block_.scale_hint = s; }

    // constant M added at block (i, j); for i != j the transpose lands at (j, i).
    void constant(int i, int j, const Mat& m);
    // contribution L * X * R at block (i, j), mirrored for i != j;
    // for i == j, he=true contributes He[L X R].
    void term(int i, int j, int var_id, const Mat& left, const Mat& right, bool he);
    // scale * unvec(K vec(X)) at diagonal block (i, i): a general linear map
    // of a symmetric variable, expanded into n^2 sandwich terms.
    void lifted_map(int i, int var_id, const Mat& K, double scale);

    LmiBlock take();

private:
    Mat selector(int i) const; // rows of block i within the full matrix
    std::vector<int> offsets_;
    int total_ = 0;
    LmiBlock block_;
};

} // namespace msstab
