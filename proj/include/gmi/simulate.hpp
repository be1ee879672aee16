#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "gmi/core.hpp"
#include "gmi/factorize.hpp"
#include "gmi/forecast.hpp"
#include "gmi/increments.hpp"
#include "gmi/spectra.hpp"

namespace gmi {

struct SimulationConfig {
    IncrementSpec spec;
    /// Spectral density of the increment sequence chi(xi).
    DensityModel increments;
    std::optional<DensityModel> noise;
    int length = 1000;
    int burn_in = -1;  // -1: ten times the effective filter length
    std::uint64_t seed = 1;
    int grid = 4096;
    int filter_length = 256;
    int fractional_window = 2048;
};

struct SimulatedPath {
    Eigen::MatrixXd xi;          // length x T
    Eigen::MatrixXd increments;  // length x T, increments(m) = chi(xi)(m)
    Eigen::MatrixXd zeta;        // xi + eta, equals xi without noise
};

/// Moving-average filter of a density, real coefficients; constant densities use chol directly.
std::vector<Eigen::MatrixXd> ma_filter(const DensityModel& model, int grid, int K);

/// Reusable generator: factors once, draws many paths.
class GmGenerator {
public:
    explicit GmGenerator(SimulationConfig cfg);

    SimulatedPath draw(std::mt19937_64& rng) const;
    SimulatedPath draw() const;
    const SimulationConfig& config() const { return cfg_; }

private:
    Eigen::MatrixXd filtered_noise(const std::vector<Eigen::MatrixXd>& filter, int count, std::mt19937_64& rng) const;

    SimulationConfig cfg_;
    std::vector<Eigen::MatrixXd> inc_filter_;
    std::vector<Eigen::MatrixXd> noise_filter_;
    Eigen::VectorXd e_;
    Eigen::VectorXd frac_;
    int T_ = 1;
};

SimulatedPath generate_gm_sequence(const SimulationConfig& cfg);

/// zeta = xi + eta with eta drawn from the noise density.
Eigen::MatrixXd add_noise(const Eigen::MatrixXd& xi, const DensityModel& g, std::uint64_t seed, int grid = 4096,
                          int K = 256);

/// f = |beta|^2/|chi|^2 S for an increment density S on the grid.
DensityGrid signal_density_from_increments(const DensityGrid& increment_density, const IncrementSpec& spec);

struct ProjectionResult {
    Weights weights;  // on observed increments chi(zeta)(k), k = -L..-1
    double mse = 0.0;
    double target_variance = 0.0;
    double min_eigenvalue = 0.0;
};

/// Normal equations over exact covariances of the last L observed increments.
ProjectionResult brute_force_projection(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec,
                                        const FunctionalSpec& fn, int L);

}  // namespace gmi
