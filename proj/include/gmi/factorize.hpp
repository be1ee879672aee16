#pragma once

#include <string>

#include "gmi/core.hpp"
#include "gmi/spectra.hpp"

namespace gmi {

/// One-sided factor Theta(e^{-i lambda}) = sum_k coeffs[k] e^{-i lambda k}.
struct Factorization {
    MatrixSeq coeffs;
    double residual = 0.0;
    bool converged = true;
    int iterations = 0;
    std::string normalization = "coefficient 0 lower triangular with nonnegative real diagonal";

    int dim() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.front().rows()); }
    int length() const { return static_cast<int>(coeffs.size()); }
    /// Zero outside 0..length-1.
    CMatrix at(int k) const {
        if (k < 0 || k >= length()) return CMatrix::Zero(dim(), dim());
        return coeffs[k];
    }
};

struct FactorOptions {
    double eigen_floor = 1e-12;  // relative to the largest eigenvalue on the grid
    double tol = 1e-9;
    int max_iter = 100;
    int bauer_block_cap = 64;
    bool deflate_unit_zeros = false;
};

Factorization canonical_factorize(const DensityGrid& target, int K, const FactorOptions& opts = {});

/// Causal inverse Psi with Psi Theta = I; residual is the convolution defect within the window.
Factorization invert_factor(const Factorization& theta, int K);

/// (|chi|^2/|beta|^2)(f + |beta|^2 g) on the grid.
DensityGrid increment_weighted_target(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec);

Factorization factorize_increment_weighted(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec,
                                           int K, FactorOptions opts = {});

/// Theta(e^{-i lambda_m}) on an M-point grid.
MatrixSeq synthesize_factor(const Factorization& fac, int M);

/// sup over the grid of the largest entry of |Theta Theta^* - target|.
double reconstruction_residual(const Factorization& fac, const DensityGrid& target);

}  // namespace gmi
