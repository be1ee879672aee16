#pragma once

#include <string>

#include "gmi/core.hpp"
#include "gmi/factorize.hpp"
#include "gmi/increments.hpp"
#include "gmi/spectra.hpp"

namespace gmi {

/// Block matrix with T x T blocks, stored densely.
struct BlockOperator {
    int T = 1;
    CMatrix dense;
    std::string role;

    BlockOperator() = default;
    BlockOperator(int dim, int block_rows, int block_cols, std::string tag)
        : T(dim), dense(CMatrix::Zero(dim * block_rows, dim * block_cols)), role(std::move(tag)) {}

    int block_rows() const { return static_cast<int>(dense.rows()) / T; }
    int block_cols() const { return static_cast<int>(dense.cols()) / T; }
    int trunc() const { return block_rows() - 1; }
    auto block(int j, int k) { return dense.block(j * T, k * T, T, T); }
    auto block(int j, int k) const { return dense.block(j * T, k * T, T, T); }

    /// Zero-pads or truncates x to the column count.
    Weights apply(const Weights& x) const;
};

/// Blocks F(j - k) of a matrix function sampled on the grid.
BlockOperator toeplitz_operator(const MatrixSeq& symbol, int block_rows, int block_cols, std::string role);

struct OperatorSymbols {
    MatrixSeq P;  // |beta|^2/|chi|^2 [p^-1]^T
    MatrixSeq T;  // |beta|^2/|chi|^2 [g p^-1]^T
    MatrixSeq Q;  // [f p^-1 g]^T
};

OperatorSymbols operator_symbols(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec);

struct OperatorSet {
    BlockOperator P, T, Q;
};

/// P is (N+1)x(N+1); T has t_cols block columns and Q is q_size square (both default to N+1).
OperatorSet build_PTQ(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec, int N,
                      int t_cols = -1, int q_size = -1);

/// Upper-triangular blocks d_mu(k - j) I.
BlockOperator build_D(const IncrementSpec& spec, int T, int N);

/// a_mu(m) = sum_l e(m - l) a(l); output indexed 0 .. last(a) + n.
Weights a_mu_weights(const Weights& a, const Eigen::VectorXd& e);

struct BVWeights {
    Weights b;  // k = 0 .. last(a)
    Weights v;  // k = -n .. -1
};

BVWeights b_and_v_weights(const Weights& a, const IncrementSpec& spec);

struct CoefficientSolve {
    Weights c;
    double rcond = 0.0;
    double residual = 0.0;
};

/// c = P^{-1}(b - T a_mu) by pivoted LU with one refinement step.
CoefficientSolve solve_c(const BlockOperator& P, const Weights& b, const BlockOperator& T_op, const Weights& a_mu,
                         double rcond_floor = 1e-13);

/// (Psi^T Psi-bar)_{j,k} = sum_{l >= max(j,k)} psi(l-j)^T conj(psi(l-k)).
BlockOperator factorized_P(const Factorization& psi, int N);

/// (Theta-bar Theta^T)_{j,k} = sum_{l <= min(j,k)} conj(theta(j-l)) theta(k-l)^T.
BlockOperator factorized_P_inverse(const Factorization& theta, int N);

/// g(k) = sum_m phi(m) phi(m+k)^* for |k| <= K.
MatrixLags covariance_from_factor(const Factorization& phi);

/// Z_{k,j} = sum_{l >= j} conj(psi(l-j)) conj(g(l-k)), k = 0..N, j = 0..cols-1.
BlockOperator build_Z(const Factorization& psi, const MatrixLags& g_coeffs, int N, int cols = -1);

/// First out_rows block rows of Psi^T Z: sum_{l >= j} psi(l-j)^T Z_{l,m}, using the rows Z has.
BlockOperator psi_transpose_times(const Factorization& psi, const BlockOperator& Z, int out_rows);

}  // namespace gmi
