#pragma once

#include <vector>

#include <Eigen/Core>

#include "gmi/core.hpp"

namespace gmi {

/// One factor (1 - B^{mu s})^{order + frac} of the increment operator.
struct Pattern {
    int mu = 1;
    int s = 1;
    int order = 0;
    double frac = 0.0;
};

struct IncrementSpec {
    std::vector<Pattern> patterns;
    int period = 1;

    /// n(gamma) = sum mu_i s_i R_i
    int degree() const;
    int total_order() const;
    bool has_fractional() const;
    bool max_step_exceeds_one() const;
};

/// Throws ConfigError on structural problems (empty, nonpositive steps, bad period).
void validate(const IncrementSpec& spec);

/// Builds a single-pattern integer spec.
IncrementSpec simple_spec(int mu, int s, int order, int period = 1);

struct SeriesCoeffs {
    Eigen::VectorXd coeffs;
    double tail_bound = 0.0;
};

Eigen::VectorXd increment_polynomial(const IncrementSpec& spec);

/// Rows are time points, columns are components; output has n(gamma) fewer rows.
Eigen::MatrixXd apply_increment(const Eigen::MatrixXd& series, const IncrementSpec& spec);

SeriesCoeffs dmu_coefficients(const IncrementSpec& spec, int n_max);

/// First n+1 terms of the product of two power series.
template <typename Derived1, typename Derived2>
Eigen::Matrix<typename Derived1::Scalar, Eigen::Dynamic, 1> truncated_convolution(
    const Eigen::MatrixBase<Derived1>& a, const Eigen::MatrixBase<Derived2>& b, int n) {
    using Scalar = typename Derived1::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n + 1);
    for (int i = 0; i < a.size() && i <= n; ++i) {
        if (a(i) == Scalar(0)) continue;
        for (int j = 0; j < b.size() && i + j <= n; ++j) out(i + j) += a(i) * b(j);
    }
    return out;
}

/// C_n^{(d)}(u), n = 0..n_max, by the three-term recursion.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gegenbauer_coeffs(Scalar d, Scalar u, int n_max) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c(n_max + 1);
    c(0) = Scalar(1);
    if (n_max >= 1) c(1) = Scalar(2) * d * u;
    for (int n = 2; n <= n_max; ++n)
        c(n) = (Scalar(2) * u * (n + d - 1) * c(n - 1) - (n + Scalar(2) * d - 2) * c(n - 2)) / Scalar(n);
    return c;
}

struct FrequencyOrder {
    double nu = 0.0;      // frequency in [0, pi]
    double order = 0.0;   // aggregated fractional order D_nu
    double exponent = 0.0;  // exponent of (1 - 2 cos(nu) B + B^2), halved at 0 and pi
};

/// Merged frequency set with aggregated fractional orders.
std::vector<FrequencyOrder> merged_orders(const IncrementSpec& spec);
bool passes_stationarity_gate(const IncrementSpec& spec);
bool long_memory(const IncrementSpec& spec);

enum class ExpansionSign { Plus, Minus };

/// Plus: coefficients of the inverse fractional operator; Minus: of the operator itself.
SeriesCoeffs fractional_expansion(const IncrementSpec& spec, ExpansionSign sign, int n_max = 512);

/// chi(e^{-i lambda}) with total orders R_j + D_j.
Complex chi_transfer(const IncrementSpec& spec, double lambda);
Complex beta_transfer(const IncrementSpec& spec, double lambda);
/// chi / beta with removable singularities filled by their limits.
Complex kernel_ratio(const IncrementSpec& spec, double lambda);

}  // namespace gmi
