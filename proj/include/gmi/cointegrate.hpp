#pragma once

#include "gmi/forecast.hpp"
#include "gmi/operators.hpp"

namespace gmi {

/// zeta - alpha xi stationary; p is the density of zeta, f that of xi.
struct CointegrationSpec {
    double alpha = 1.0;
    DensityGrid f;
    DensityGrid p;
};

/// Throws unless alpha != 0, grids match and p - alpha^2 f is PSD to 1e-8.
void validate(const CointegrationSpec& cs);

/// (p - alpha^2 f) / |beta|^2 with removable zeros of beta filled from neighbours.
DensityGrid remainder_density(const CointegrationSpec& cs, const IncrementSpec& spec);

OperatorSet coint_operators(const CointegrationSpec& cs, const IncrementSpec& spec, int N, int t_cols = -1,
                            int q_size = -1);

ForecastSolution coint_forecast(const CointegrationSpec& cs, const IncrementSpec& spec, const FunctionalSpec& fn,
                                const ForecastOptions& opts = {});

ForecastSolution coint_factorized_forecast(const CointegrationSpec& cs, const IncrementSpec& spec,
                                           const FunctionalSpec& fn, int K, const ForecastOptions& opts = {});

struct CointegrationReport {
    double variance_slope = 0.0;    // log-log slope of Var(u(t+w) - u(t)) in w
    double low_frequency_mass = 0.0;  // share of periodogram mass in the lowest 5% of frequencies
    bool stationary = false;
};

/// Advisory check of zeta - alpha xi.
CointegrationReport check_cointegration(const Eigen::VectorXd& zeta, const Eigen::VectorXd& xi, double alpha);

}  // namespace gmi
