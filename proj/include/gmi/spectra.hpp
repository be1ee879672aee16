#pragma once

#include <functional>
#include <string>

#include "gmi/core.hpp"
#include "gmi/increments.hpp"

namespace gmi {

/// Samples of a T x T Hermitian density on lambda_m = -pi + 2 pi m / M.
struct DensityGrid {
    int T = 1;
    MatrixSeq values;
    std::string label;

    int size() const { return static_cast<int>(values.size()); }
    double lambda(int m) const { return grid_lambda(m, size()); }
    const CMatrix& operator[](int m) const { return values[m]; }
    CMatrix& operator[](int m) { return values[m]; }

    static double grid_lambda(int m, int M) { return -kPi + 2.0 * kPi * m / M; }
    static DensityGrid zeros(int T, int M, std::string label = "");
    static DensityGrid constant(const CMatrix& value, int M, std::string label = "");
    static DensityGrid from_function(int T, int M, const std::function<CMatrix(double)>& fn,
                                     std::string label = "");
    /// Scalar density from a real function of lambda.
    static DensityGrid scalar(int M, const std::function<double(double)>& fn, std::string label = "");
};

DensityGrid operator+(const DensityGrid& a, const DensityGrid& b);
DensityGrid operator*(double k, const DensityGrid& a);

struct DensityModel {
    enum class Kind { Constant, Rational, Tabulated };
    Kind kind = Kind::Constant;
    int T = 1;
    CMatrix constant;
    /// f = A(z)^{-1} N(z) N(z)^* A(z)^{-*}, z = e^{-i lambda}
    MatrixSeq num;
    MatrixSeq den;
    DensityGrid table;

    static DensityModel make_constant(const CMatrix& c);
    static DensityModel make_rational(MatrixSeq num, MatrixSeq den = {});
    static DensityModel make_scalar_arma(const std::vector<double>& num, const std::vector<double>& den = {1.0});
    static DensityModel make_tabulated(DensityGrid grid);
};

DensityGrid eval_density(const DensityModel& model, int grid_size);

/// Value of the model at a single frequency.
CMatrix eval_density_at(const DensityModel& model, double lambda);

DensityGrid noisy_density(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec);

/// F(k) = (1/2pi) int fn(lambda) e^{-i lambda k} d lambda for k = k_min..k_max.
MatrixSeq fourier_coeffs(const MatrixSeq& fn, int k_min, int k_max);

/// sum_k c(first + k) e^{sign * i lambda_m (first + k)} on the M-point grid.
MatrixSeq synthesize(const MatrixSeq& coeffs, int first, int M, int sign);

/// All M coefficients F(k), stored at index k mod M, without the aliasing guard.
Eigen::VectorXcd dft_coeffs(const Eigen::VectorXcd& fn);

/// Scalar variants of the two transforms above.
Eigen::VectorXcd fourier_coeffs_scalar(const Eigen::VectorXcd& fn, int k_min, int k_max);
Eigen::VectorXcd synthesize_scalar(const Eigen::VectorXcd& coeffs, int first, int M, int sign);

/// (1/2pi) int e^{i lambda m} chi_{mu1} conj(chi_{mu2}) |beta|^{-2} f d lambda.
CMatrix structural_function(const DensityGrid& f, const IncrementSpec& spec, int m,
                            const std::vector<int>& mu1 = {}, const std::vector<int>& mu2 = {});

struct MinimalityReport {
    double value = 0.0;
    bool pass = false;
    double offending_lambda = 0.0;
    std::string message;
};

MinimalityReport minimality_check(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec,
                                  double cap = 1e8);

struct FractionalTransform {
    DensityGrid f;
    bool long_memory = false;
};

FractionalTransform fractional_density_transform(const DensityGrid& f_tilde, const IncrementSpec& spec,
                                                 double pole_cap = 1e8);

/// |beta|^2 / |chi|^2 on the grid; infinite where chi has uncancelled zeros.
Eigen::VectorXd increment_weight(const IncrementSpec& spec, int M);

void check_same_grid(const DensityGrid& a, const DensityGrid& b);

}  // namespace gmi
