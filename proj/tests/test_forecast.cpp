#include <gtest/gtest.h>

#include "gmi/forecast.hpp"
#include "gmi/simulate.hpp"
#include "oracles.hpp"

using namespace gmi;

namespace {

const IncrementSpec kWalk = simple_spec(1, 1, 1);

DensityGrid white_signal(int M, double s2) {
    return signal_density_from_increments(DensityGrid::scalar(M, [=](double) { return s2; }), kWalk);
}

DensityGrid ar1_signal(int M, double phi) {
    return signal_density_from_increments(
        DensityGrid::scalar(M, [=](double l) { return oracle::arma_density({1.0}, {1.0, -phi}, 1.0, l); }), kWalk);
}

DensityGrid noise(int M, double a, double b) {
    return DensityGrid::scalar(M, [=](double l) { return a + b * std::cos(l); });
}

ForecastOptions small(int trunc) {
    ForecastOptions o;
    o.trunc = trunc;
    return o;
}

}  // namespace

TEST(Forecast, RandomWalkClosedForm) {
    const int M = 512;
    const auto sol =
        single_value_forecast(white_signal(M, 2.0), noise(M, 0.0, 0.0), kWalk, 0, 0, small(16));
    EXPECT_NEAR(sol.mse, 2.0, 1e-8);
    ASSERT_TRUE(sol.filter_available);
    EXPECT_NEAR(sol.level.at(-1)(0).real(), 1.0, 1e-6);
    for (int k = sol.level.first; k <= -2; ++k) EXPECT_NEAR(std::abs(sol.level.at(k)(0)), 0.0, 1e-6);
}

TEST(Forecast, RandomWalkTwoStepsAhead) {
    const int M = 512;
    const auto sol = single_value_forecast(white_signal(M, 1.0), noise(M, 0.0, 0.0), kWalk, 1, 0, small(16));
    EXPECT_NEAR(sol.mse, 2.0, 1e-8);
}

TEST(Forecast, MatchesBruteForceProjection) {
    const int M = 2048;
    const auto f = ar1_signal(M, 0.5), g = noise(M, 0.6, 0.3);
    const auto fn = FunctionalSpec::single_value(1, 2, 0);
    const auto sol = spectral_characteristic(f, g, kWalk, fn, small(48));
    const auto bf = brute_force_projection(f, g, kWalk, fn, 150);
    EXPECT_NEAR(sol.mse / bf.mse, 1.0, 1e-4);
}

TEST(Forecast, HomogeneityInScale) {
    const int M = 512;
    const auto f = ar1_signal(M, 0.3), g = noise(M, 0.5, 0.2);
    const auto fn = FunctionalSpec::single_value(1, 1, 0);
    const auto a = spectral_characteristic(f, g, kWalk, fn, small(24));
    const auto b = spectral_characteristic(3.0 * f, 3.0 * g, kWalk, fn, small(24));
    EXPECT_NEAR(b.mse / a.mse, 3.0, 1e-8);
    EXPECT_LT((a.h - b.h).norm() / a.h.norm(), 1e-8);
}

TEST(Forecast, FactorizedAgreesWithOperatorPath) {
    const int M = 2048;
    const auto f = ar1_signal(M, 0.4), g = noise(M, 0.8, 0.3);
    const auto fn = FunctionalSpec::single_value(1, 1, 0);
    const auto a = spectral_characteristic(f, g, kWalk, fn, small(32));
    const auto b = factorized_forecast(f, g, kWalk, fn, 256, small(32));
    EXPECT_NEAR(b.mse / a.mse, 1.0, 1e-6);
}

TEST(Forecast, FiniteFunctionalIsSumOfParts) {
    const int M = 1024;
    const auto f = ar1_signal(M, 0.4), g = noise(M, 0.8, 0.3);
    Weights a(1, 0, 3);
    a.values << 1.0, 0.5, 0.25;
    const auto sol = spectral_characteristic(f, g, kWalk, FunctionalSpec::finite(a), small(32));
    const auto bf = brute_force_projection(f, g, kWalk, FunctionalSpec::finite(a), 100);
    EXPECT_NEAR(sol.mse / bf.mse, 1.0, 1e-3);
}

TEST(Forecast, SubspaceResidualSmall) {
    const int M = 1024;
    const auto sol = spectral_characteristic(ar1_signal(M, 0.4), noise(M, 0.8, 0.3), kWalk,
                                             FunctionalSpec::single_value(1, 0, 0), small(32));
    EXPECT_LT(sol.diag.subspace_residual, 1e-4);
    EXPECT_TRUE(sol.diag.truncation_stable);
}

TEST(Forecast, ApplyForecastUsesLevelWeights) {
    const int M = 512;
    const auto sol = single_value_forecast(white_signal(M, 1.0), noise(M, 0.0, 0.0), kWalk, 0, 0, small(16));
    Eigen::MatrixXd obs(60, 1);
    for (int t = 0; t < 60; ++t) obs(t, 0) = std::sin(0.3 * t) + 0.1 * t;
    EXPECT_NEAR(apply_forecast(obs, sol, kWalk).real(), obs(59, 0), 1e-6);
    EXPECT_THROW(apply_forecast(obs.topRows(3), sol, kWalk), DataError);
}

TEST(Forecast, InterleaveRoundTrip) {
    Eigen::VectorXd x(12);
    for (int i = 0; i < 12; ++i) x(i) = i;
    const auto blocks = interleave(x, 3);
    EXPECT_EQ(blocks.rows(), 4);
    EXPECT_EQ(blocks(1, 2), 5.0);
    EXPECT_EQ(deinterleave(blocks), x);
    Eigen::VectorXd a(5);
    a << 1, 2, 3, 4, 5;
    const auto fn = lift_functional(a, 2);
    EXPECT_EQ(fn.a.dim(), 2);
    EXPECT_EQ(fn.a.at(1)(1).real(), 4.0);
}

TEST(Forecast, GeometricFunctional) {
    CVector a0(1);
    a0 << 1.0;
    const auto fn = FunctionalSpec::geometric(a0, 0.5, 1e-6);
    EXPECT_EQ(fn.kind, FunctionalKind::Infinite);
    EXPECT_LT(fn.tail_bound, 1e-5);
    EXPECT_THROW(FunctionalSpec::geometric(a0, 1.0), ConfigError);
}

TEST(Forecast, MultivariateMatchesBruteForce) {
    const int M = 2048;
    MatrixSeq num(2, CMatrix::Zero(2, 2));
    num[0] << 1.0, 0.0, 0.3, 0.9;
    num[1] << 0.4, 0.1, 0.0, -0.3;
    const auto S = eval_density(DensityModel::make_rational(num), M);
    const auto f = signal_density_from_increments(S, kWalk);
    const auto g = eval_density(DensityModel::make_constant(CMatrix::Identity(2, 2) * 0.4), M);
    const auto fn = FunctionalSpec::single_value(2, 1, 1);
    const auto sol = spectral_characteristic(f, g, kWalk, fn, small(40));
    const auto bf = brute_force_projection(f, g, kWalk, fn, 150);
    EXPECT_NEAR(sol.mse / bf.mse, 1.0, 1e-3);
}

TEST(Forecast, MinimalityFailureIsNumericError) {
    const int M = 256;
    const auto f = DensityGrid::scalar(M, [](double l) { return std::abs(l) < 1.0 ? 0.0 : 1.0; });
    EXPECT_THROW(spectral_characteristic(f, noise(M, 0.0, 0.0), kWalk, FunctionalSpec::single_value(1, 0, 0),
                                         small(8)),
                 NumericError);
}

TEST(Forecast, CoarseGridRejected) {
    const int M = 64;
    EXPECT_THROW(spectral_characteristic(white_signal(M, 1.0), noise(M, 0.5, 0.0), kWalk,
                                         FunctionalSpec::single_value(1, 0, 0), small(32)),
                 ConfigError);
}

TEST(Forecast, StepAboveOneFailsMinimality) {
    // chi = 1 - B^2 vanishes at pi where beta does not
    const auto spec = simple_spec(2, 1, 1);
    const int M = 512;
    const auto f = DensityGrid::scalar(M, [](double) { return 1.0; });
    EXPECT_THROW(spectral_characteristic(f, noise(M, 0.5, 0.0), spec, FunctionalSpec::single_value(1, 0, 0), small(16)),
                 NumericError);
}
