#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gmi/forecast.hpp"

namespace gmi {

/// Constraint set for one density.
///   Fixed         {anchor}
///   Moment        mean(weight * f) = moment
///   Band          lower <= g <= upper, mean(weight * g) = moment
///   Contaminated  f >= (1 - eps) anchor, mean(weight * f) = moment
///   Neighborhood  mean(weight * |g - anchor|) <= delta
/// An empty weight means the role default: |chi|^2/|beta|^2 for the signal, 1 for the noise.
struct AdmissibleClass {
    enum class Kind { Fixed, Moment, Band, Contaminated, Neighborhood };

    Kind kind = Kind::Fixed;
    int variant = 1;  // 1: matrix order, 2: trace, 3: diagonal, 4: <B, .>
    double moment = 0.0;
    double eps = 0.0;
    double delta = 0.0;
    DensityGrid anchor;
    DensityGrid lower, upper;
    Eigen::VectorXd weight;
    CMatrix pairing;  // B for variant 4

    static AdmissibleClass fixed(DensityGrid d);
    static AdmissibleClass moment_class(double P, int variant = 1);
    static AdmissibleClass band(DensityGrid V, DensityGrid U, double Q, int variant = 1);
    static AdmissibleClass contaminated(DensityGrid f1, double eps, double P, int variant = 1);
    static AdmissibleClass neighborhood(DensityGrid g1, double delta, int variant = 1);

    std::string describe() const;
};

enum class DensityRole { Signal, Noise };

/// Weight used in the class integral, on an M-point grid.
Eigen::VectorXd class_weight(const AdmissibleClass& cls, DensityRole role, const IncrementSpec& spec, int M);

/// Throws ConfigError for inconsistent class data.
void validate(const AdmissibleClass& cls, DensityRole role, const IncrementSpec& spec, int M);

bool contains(const AdmissibleClass& cls, DensityRole role, const IncrementSpec& spec, const DensityGrid& d,
              double tol = 1e-8);

struct EquationResidual {
    std::string name;
    double residual = 0.0;        // relative deviation where the density is free
    double sign_violation = 0.0;  // relative breach of the slackness sign conditions
    int free_points = 0;
};

struct SaddleReport {
    std::vector<EquationResidual> equations;
    double alpha_f = 0.0;  // squared multipliers
    double beta = 0.0;
    Eigen::VectorXd gamma_lower;  // <= 0, nonzero only where g sits on its lower bound
    Eigen::VectorXd gamma_upper;  // >= 0, nonzero only on the upper bound
    double max_violation = 0.0;
    bool pass = false;
    int iterations = 0;
    bool converged = false;
    double last_change = 0.0;
    double value = 0.0;  // worst-case MSE
    std::string message;
};

struct MinimaxOptions {
    ForecastOptions forecast;
    int grid = 256;
    double damping = 0.5;
    int max_iter = 500;
    double tol = 1e-6;
    double residual_tol = 1e-4;
};

struct LeastFavorable {
    DensityGrid f0, g0;
    ForecastSolution solution;
    SaddleReport report;
};

/// Classical solution at the given pair.
ForecastSolution minimax_characteristic(const DensityGrid& f0, const DensityGrid& g0, const IncrementSpec& spec,
                                        const FunctionalSpec& fn, const ForecastOptions& opts = {});

/// MSE of the estimate with characteristic h when the true densities are (f, g); linear in (f, g).
double value_functional(const CMatrix& h, const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec,
                        const FunctionalSpec& fn);

/// Pointwise sensitivities K_f, K_g of value_functional (T = 1).
struct Sensitivity {
    Eigen::VectorXd Kf, Kg;
};
Sensitivity value_sensitivity(const CMatrix& h, const IncrementSpec& spec, const FunctionalSpec& fn, int M);

/// Scalar least favorable pair, signal class x noise band class.
LeastFavorable solve_lf_band(const AdmissibleClass& f_class, const AdmissibleClass& g_class, const IncrementSpec& spec,
                             const FunctionalSpec& fn, const MinimaxOptions& opts = {});

/// Scalar least favorable pair, contaminated signal x neighborhood noise.
LeastFavorable solve_lf_eps_delta(const AdmissibleClass& f_class, const AdmissibleClass& g_class,
                                  const IncrementSpec& spec, const FunctionalSpec& fn,
                                  const MinimaxOptions& opts = {});

/// Any scalar class pair.
LeastFavorable solve_least_favorable(const AdmissibleClass& f_class, const AdmissibleClass& g_class,
                                     const IncrementSpec& spec, const FunctionalSpec& fn,
                                     const MinimaxOptions& opts = {});

/// Random admissible density; `center`, when given, is mixed in with a random weight.
DensityGrid sample_admissible(const AdmissibleClass& cls, DensityRole role, const IncrementSpec& spec, int M,
                              std::mt19937_64& rng, const DensityGrid* center = nullptr);

struct SampleAudit {
    int samples = 0;
    int violations = 0;
    double value = 0.0;         // value at the candidate pair
    double worst_value = 0.0;   // largest sampled value
    double worst_excess = 0.0;  // largest (sampled - value) / max(1, value)
    double tol = 0.0;
    bool pass = false;
    std::vector<double> values;
};

SampleAudit verify_saddle(const DensityGrid& f0, const DensityGrid& g0, const AdmissibleClass& f_class,
                          const AdmissibleClass& g_class, const IncrementSpec& spec, const FunctionalSpec& fn,
                          int samples, std::uint64_t seed = 7, double tol = 1e-4,
                          const ForecastOptions& opts = {});

enum class EquationForm { Direct, Factorized };

/// Lagrange equations of the class pair at (f0, g0), multipliers fitted by least squares (any T); pass at 1e-4.
SaddleReport matrix_equation_residual(const DensityGrid& f0, const DensityGrid& g0, const AdmissibleClass& f_class,
                                      const AdmissibleClass& g_class, const IncrementSpec& spec,
                                      const FunctionalSpec& fn, EquationForm form = EquationForm::Direct,
                                      const ForecastOptions& opts = {}, int factor_length = 256);

/// Noise class equivalent to a class on the observed density p of a cointegrated pair with f fixed.
AdmissibleClass coint_noise_class(const AdmissibleClass& p_class, const DensityGrid& f, double alpha,
                                  const IncrementSpec& spec);

}  // namespace gmi
