#include <gtest/gtest.h>

#include <random>

#include "gmi/cointegrate.hpp"
#include "gmi/simulate.hpp"
#include "oracles.hpp"

using namespace gmi;

namespace {

const IncrementSpec kWalk = simple_spec(1, 1, 1);
constexpr int kM = 512;

DensityGrid signal() {
    return signal_density_from_increments(
        DensityGrid::scalar(kM, [](double l) { return oracle::arma_density({1.0}, {1.0, -0.4}, 1.0, l); }), kWalk);
}

DensityGrid remainder() { return DensityGrid::scalar(kM, [](double l) { return 0.6 + 0.2 * std::cos(l); }); }

CointegrationSpec make(double alpha) {
    CointegrationSpec cs;
    cs.alpha = alpha;
    cs.f = signal();
    cs.p = noisy_density((alpha * alpha) * cs.f, remainder(), kWalk);
    return cs;
}

ForecastOptions opts() {
    ForecastOptions o;
    o.trunc = 24;
    return o;
}

}  // namespace

TEST(Cointegrate, RemainderRecovered) {
    const auto cs = make(1.7);
    const auto g = remainder_density(cs, kWalk);
    const auto ref = remainder();
    for (int m = 0; m < kM; ++m) EXPECT_NEAR(std::abs(g.values[m](0, 0) - ref.values[m](0, 0)), 0.0, 1e-9);
}

TEST(Cointegrate, UnitCoefficientIsPlainForecast) {
    const auto cs = make(1.0);
    const auto fn = FunctionalSpec::single_value(1, 1, 0);
    const auto a = coint_forecast(cs, kWalk, fn, opts());
    const auto b = spectral_characteristic(cs.f, remainder(), kWalk, fn, opts());
    EXPECT_NEAR(a.mse, b.mse, 1e-10);
    EXPECT_LT((a.h - b.h).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Cointegrate, ScalingInvariance) {
    // (f / k^2, alpha k, k a) leaves the estimate of the same target unchanged
    const double k = 2.0;
    const auto cs = make(1.3);
    CointegrationSpec scaled = cs;
    scaled.alpha *= k;
    scaled.f = (1.0 / (k * k)) * cs.f;
    const auto fn = FunctionalSpec::single_value(1, 0, 0);
    auto fnk = fn;
    fnk.a.values *= k;
    const auto a = coint_forecast(cs, kWalk, fn, opts());
    const auto b = coint_forecast(scaled, kWalk, fnk, opts());
    EXPECT_NEAR(a.mse, b.mse, 1e-9 * a.mse);
}

TEST(Cointegrate, FactorizedPathAgrees) {
    const auto cs = make(0.8);
    const auto fn = FunctionalSpec::single_value(1, 0, 0);
    const auto a = coint_forecast(cs, kWalk, fn, opts());
    const auto b = coint_factorized_forecast(cs, kWalk, fn, 96, opts());
    EXPECT_NEAR(b.mse / a.mse, 1.0, 1e-5);
}

TEST(Cointegrate, OperatorsPrinted) {
    const auto cs = make(1.0);
    const auto ops = coint_operators(cs, kWalk, 6);
    const auto ref = build_PTQ(cs.f, remainder(), kWalk, 6);
    EXPECT_LT((ops.P.dense - ref.P.dense).norm(), 1e-9);
    EXPECT_LT((ops.T.dense - ref.T.dense).norm(), 1e-8);
    EXPECT_LT((ops.Q.dense - ref.Q.dense).norm(), 1e-8);
}

TEST(Cointegrate, RejectsInvalidPairs) {
    auto cs = make(1.0);
    cs.alpha = 0.0;
    EXPECT_THROW(validate(cs), ConfigError);
    cs = make(1.0);
    cs.alpha = 3.0;  // p - 9 f is negative near zero frequency
    EXPECT_THROW(validate(cs), DataError);
}

TEST(Cointegrate, AdvisoryCheck) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    const int n = 4000;
    Eigen::VectorXd xi(n), zeta(n), other(n);
    double w = 0.0, v = 0.0;
    for (int t = 0; t < n; ++t) {
        w += z(rng);
        v += z(rng);
        xi(t) = w;
        zeta(t) = 2.0 * w + z(rng);
        other(t) = v;
    }
    EXPECT_TRUE(check_cointegration(zeta, xi, 2.0).stationary);
    EXPECT_FALSE(check_cointegration(other, xi, 2.0).stationary);
    EXPECT_THROW(check_cointegration(zeta.head(10), xi.head(10), 2.0), DataError);
}
