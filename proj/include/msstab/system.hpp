#pragma once

// System data types: linear stochastic impulsive systems, switched systems,
// sampled-data systems, dwell-time specifications, dimension validation,
// and the embeddings of switched / sampled-data systems into impulsive form.

#include "msstab/matrix.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace msstab {

// Flow  dx = (A x + Bc1 u_c) dt + sum_i Ec[i] x dW_i + Bc2 u_c dW'
// Jump  x+ = J x + Bd1 u_d + Ed x nu1 + Bd2 u_d nu2
//
// Ec is a list so that multi-channel flows (e.g. the sampled-data embedding,
// which carries two independent Wiener channels) share one type. A
// deterministic flow is modeled with a single zero channel. Input widths
// m_c, m_d may be zero (uncontrolled system); the corresponding B matrices
// then have zero columns.
struct ImpulsiveSystem {
    Mat A;
    std::vector<Mat> Ec;
    Mat Bc1, Bc2;
    Mat J;
    Mat Ed;
    Mat Bd1, Bd2;

    int n() const { return A.rows(); }
    int mc() const { return Bc1.cols(); }
    int md() const { return Bd1.cols(); }

    // Uncontrolled system with one flow-diffusion channel.
    static ImpulsiveSystem uncontrolled(Mat a, Mat ec, Mat j, Mat ed);
    // Uncontrolled system with several flow-diffusion channels.
    static ImpulsiveSystem uncontrolled_multi(Mat a, std::vector<Mat> ec, Mat j, Mat ed);
};

// Impulsive system with several jump maps (reset maps), as produced by the
// switched-system embedding. The flow part has no control inputs.
struct MultiJumpImpulsiveSystem {
    Mat A;
    std::vector<Mat> Ec;
    std::vector<std::pair<Mat, Mat>> jumps; // (J_k, Ed_k)

    int n() const { return A.rows(); }
    // The impulsive system obtained by selecting a single jump map.
    ImpulsiveSystem with_jump(size_t k) const;
};

// dy = G_sigma y dt + H_sigma y dW
struct SwitchedSystem {
    std::vector<std::pair<Mat, Mat>> modes; // (G_i, H_i)
    int n() const { return modes.empty() ? 0 : modes.front().first.rows(); }
};

// dx = (A_sd x + B_sd u) dt + E_sd x dW1, u held between samples,
// with noise of relative amplitude alpha on the control channel.
struct SampledDataSystem {
    Mat A_sd;
    Mat B_sd;
    Mat E_sd;
    double alpha = 0.0;

    int n() const { return A_sd.rows(); }
    int m() const { return B_sd.cols(); }
};

struct ConstantDwell {
    double T;
};
struct RangedDwell {
    double T_min, T_max;
};
struct MinimumDwell {
    double T;
};

using DwellTimeSpec = std::variant<ConstantDwell, RangedDwell, MinimumDwell>;

std::string dwell_kind(const DwellTimeSpec& spec);
// Throws std::invalid_argument unless all times are positive and ordered.
void validate(const DwellTimeSpec& spec);

// Structured dimension check; returns one message per offending field,
// empty when the system is well-formed. Never throws.
std::vector<std::string> validate(const ImpulsiveSystem& sys);
std::vector<std::string> validate(const SwitchedSystem& sw);
std::vector<std::string> validate(const SampledDataSystem& sd);

// Throws std::invalid_argument listing all problems, if any.
void require_valid(const ImpulsiveSystem& sys);
void require_valid(const SwitchedSystem& sw);
void require_valid(const SampledDataSystem& sd);

// Block-diagonal embedding of a switched system: A = diag(G_1..G_N),
// Ec = diag(H_1..H_N), and one reset map J_ij = (e_i e_j^T) (x) I_n per
// ordered mode pair i != j (with zero jump diffusion). State dimension N*n.
MultiJumpImpulsiveSystem switched_to_impulsive(const SwitchedSystem& sw);

// Impulsive embedding of a sampled-data system on the extended state
// (plant state, held input):
//   Abar = [[A_sd, B_sd], [0, 0]], E1 = [[E_sd, 0], [0, 0]],
//   E2 = [[0, alpha*B_sd], [0, 0]], J0 = [[I, 0], [0, 0]], Bbar = [0; I].
// When a gain K_d (m x (n+m)) is supplied the jump becomes J0 + Bbar*K_d.
ImpulsiveSystem sampled_data_to_impulsive(const SampledDataSystem& sd,
                                          const std::optional<Mat>& K_d = std::nullopt);

} // namespace msstab
