#include <gtest/gtest.h>

#include "gmi/factorize.hpp"
#include "oracles.hpp"

using namespace gmi;

namespace {

DensityGrid ma_target(const std::vector<double>& c, int M) {
    return DensityGrid::scalar(M, [&](double l) { return oracle::arma_density(c, {1.0}, 1.0, l); });
}

}  // namespace

TEST(Factorize, ScalarMA1) {
    const auto fac = canonical_factorize(ma_target({1.0, 0.5}, 256), 16);
    EXPECT_NEAR(fac.coeffs[0](0, 0).real(), 1.0, 1e-10);
    EXPECT_NEAR(std::abs(fac.coeffs[1](0, 0) - 0.5), 0.0, 1e-10);
    for (int k = 2; k <= 16; ++k) EXPECT_NEAR(std::abs(fac.coeffs[k](0, 0)), 0.0, 1e-10);
    EXPECT_LT(fac.residual, 1e-10);
}

TEST(Factorize, NonMinimumPhaseInputGivesCanonicalFactor) {
    // |1 + 2z|^2 = 4 |1 + z/2|^2, canonical factor is 2 + z
    const auto fac = canonical_factorize(ma_target({1.0, 2.0}, 256), 16);
    EXPECT_NEAR(fac.coeffs[0](0, 0).real(), 2.0, 1e-9);
    EXPECT_NEAR(fac.coeffs[1](0, 0).real(), 1.0, 1e-9);
}

TEST(Factorize, InverseFactorOfMA1) {
    const auto fac = canonical_factorize(ma_target({1.0, 0.5}, 256), 40);
    const auto psi = invert_factor(fac, 40);
    for (int k = 0; k <= 10; ++k) EXPECT_NEAR(psi.coeffs[k](0, 0).real(), std::pow(-0.5, k), 1e-9);
    EXPECT_LT(psi.residual, 1e-9);
}

TEST(Factorize, MatrixFactorReconstructs) {
    MatrixSeq num(3, CMatrix::Zero(2, 2));
    num[0] << 1.0, 0.0, 0.4, 0.8;
    num[1] << 0.3, -0.2, 0.1, 0.25;
    num[2] << 0.05, 0.0, -0.1, 0.1;
    const auto target = eval_density(DensityModel::make_rational(num), 256);
    const auto fac = canonical_factorize(target, 24);
    EXPECT_LT(fac.residual, 1e-7);
    // leading coefficient is lower triangular with a positive diagonal
    EXPECT_NEAR(std::abs(fac.coeffs[0](0, 1)), 0.0, 1e-12);
    EXPECT_GT(fac.coeffs[0](0, 0).real(), 0.0);
    EXPECT_GT(fac.coeffs[0](1, 1).real(), 0.0);
    const auto psi = invert_factor(fac, 24);
    EXPECT_LT(psi.residual, 1e-8);
}

TEST(Factorize, DeflatesUnitZero) {
    const int M = 256;
    const auto target =
        DensityGrid::scalar(M, [](double l) { return (2.0 - 2.0 * std::cos(l)) * (1.25 + std::cos(l)); });
    EXPECT_THROW(canonical_factorize(target, 8), NumericError);
    FactorOptions opts;
    opts.deflate_unit_zeros = true;
    const auto fac = canonical_factorize(target, 8, opts);
    EXPECT_LT(fac.residual, 1e-6);
}

TEST(Factorize, RejectsCoarseGridAndIndefinite) {
    EXPECT_THROW(canonical_factorize(ma_target({1.0, 0.5}, 64), 32), ConfigError);
    const auto bad = DensityGrid::scalar(64, [](double l) { return std::cos(l); });
    EXPECT_THROW(canonical_factorize(bad, 4), NumericError);
}

TEST(Factorize, IncrementWeightedTarget) {
    const auto spec = simple_spec(1, 1, 1);
    const int M = 256;
    const auto w = increment_weight(spec, M);
    DensityGrid f = DensityGrid::scalar(M, [](double) { return 0.0; });
    for (int m = 0; m < M; ++m) f.values[m](0, 0) = w(m);  // white increments
    const auto g = DensityGrid::scalar(M, [](double) { return 0.0; });
    const auto fac = factorize_increment_weighted(f, g, spec, 8);
    EXPECT_NEAR(std::abs(fac.coeffs[0](0, 0)), 1.0, 1e-9);
    for (int k = 1; k <= 8; ++k) EXPECT_NEAR(std::abs(fac.coeffs[k](0, 0)), 0.0, 1e-9);
}
