#pragma once

#include <string>

#include "gmi/core.hpp"
#include "gmi/factorize.hpp"
#include "gmi/increments.hpp"
#include "gmi/operators.hpp"
#include "gmi/spectra.hpp"

namespace gmi {

enum class FunctionalKind { Infinite, Finite, SingleValue };

/// A xi = sum_k a(k)^T xi(k), k >= 0.
struct FunctionalSpec {
    Weights a;
    FunctionalKind kind = FunctionalKind::Finite;
    int N = 0;
    int component = 0;  // zero-based, single value only
    double tail_bound = 0.0;

    static FunctionalSpec finite(Weights a);
    /// xi_p(N), p zero-based.
    static FunctionalSpec single_value(int T, int N, int p);
    /// a(k) = rate^k a0, truncated where |rate|^k falls below tol.
    static FunctionalSpec geometric(const CVector& a0, double rate, double tol = 1e-12);
};

struct ForecastOptions {
    int trunc = 64;
    bool doubling_check = true;
    double rcond_floor = 1e-13;
    int filter_lags = -1;  // default: trunc + a.count()
    double minimality_cap = 1e8;
};

struct ForecastDiagnostics {
    double rcond = 0.0;
    double solve_residual = 0.0;
    double doubling_change = 0.0;
    bool truncation_stable = true;
    double subspace_residual = 0.0;
    double minimality_value = 0.0;
    double factor_residual = 0.0;
    std::string notes;
};

struct ForecastSolution {
    int T = 1;
    Weights a, a_mu, b, v, c;
    /// s(k), k = -k_max .. -1; empty when filter extraction is refused.
    Weights s;
    /// Total weight on each observed level zeta(k), k = -(k_max + n) .. -1.
    Weights level;
    bool filter_available = false;
    /// h(lambda_m) as columns of a T x M matrix.
    CMatrix h;
    double mse = 0.0;
    ForecastDiagnostics diag;
};

ForecastSolution spectral_characteristic(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec,
                                         const FunctionalSpec& fn, const ForecastOptions& opts = {});

ForecastSolution spectral_characteristic_finite(const DensityGrid& f, const DensityGrid& g,
                                                const IncrementSpec& spec, const FunctionalSpec& fn,
                                                const ForecastOptions& opts = {});

ForecastSolution single_value_forecast(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec, int N,
                                       int p, const ForecastOptions& opts = {});

/// Same estimate through the canonical factors of (|chi|^2/|beta|^2) p and g with K coefficients.
ForecastSolution factorized_forecast(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec,
                                     const FunctionalSpec& fn, int K, const ForecastOptions& opts = {});

/// s(k), k = -k_max..-1, from the Fourier coefficients of h beta/chi.
Weights extract_filter_weights(const ForecastSolution& sol, const IncrementSpec& spec, int k_max);

/// Largest coefficient of h beta/chi at lags k >= 0 relative to the largest coefficient overall.
double subspace_residual(const ForecastSolution& sol, const IncrementSpec& spec);

/// Rows of the output are the vector times m, columns the components.
Eigen::MatrixXd interleave(const Eigen::VectorXd& series, int T);
Eigen::VectorXd deinterleave(const Eigen::MatrixXd& blocks);

/// Scalar weights a(0..M) lifted to T-vector weights a_p(m) = a(mT + p).
FunctionalSpec lift_functional(const Eigen::VectorXd& a_scalar, int T);

/// Observations zeta(-L..-1) as rows (oldest first); returns the estimate of A xi.
Complex apply_forecast(const Eigen::MatrixXd& observations, const ForecastSolution& sol, const IncrementSpec& spec);

/// sum_k w(k) e^{sign i lambda_m k} per component, T x M.
CMatrix synthesize_weights(const Weights& w, int M, int sign);

/// Plain MSE of the bracket form for precomputed operators.
double bracket_mse(const BlockOperator& P, const Weights& r, const BlockOperator& Q, const Weights& a);

}  // namespace gmi
