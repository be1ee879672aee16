#include <gtest/gtest.h>

#include <random>

#include "gmi/increments.hpp"
#include "oracles.hpp"

using namespace gmi;

namespace {

IncrementSpec two_pattern() {
    IncrementSpec s;
    s.patterns = {{1, 1, 1, 0.0}, {1, 4, 1, 0.0}};
    return s;
}

std::vector<double> oracle_e(const IncrementSpec& spec) {
    std::vector<double> e{1.0};
    for (const auto& p : spec.patterns) {
        auto f = oracle::difference_power(p.mu * p.s, p.order);
        e = oracle::convolve(e, f, static_cast<int>(e.size() + f.size()) - 2);
    }
    return e;
}

}  // namespace

TEST(Increments, PolynomialMatchesBinomialProduct) {
    for (const auto& spec : {simple_spec(1, 1, 1), simple_spec(1, 1, 2), simple_spec(2, 3, 2), two_pattern()}) {
        const auto e = increment_polynomial(spec);
        const auto ref = oracle_e(spec);
        ASSERT_EQ(e.size(), static_cast<long>(ref.size()));
        EXPECT_EQ(e.size() - 1, spec.degree());
        for (int k = 0; k < e.size(); ++k) EXPECT_DOUBLE_EQ(e(k), ref[k]);
    }
}

TEST(Increments, SecondDifferenceExample) {
    const auto e = increment_polynomial(simple_spec(1, 1, 2));
    ASSERT_EQ(e.size(), 3);
    EXPECT_EQ(e(0), 1.0);
    EXPECT_EQ(e(1), -2.0);
    EXPECT_EQ(e(2), 1.0);
}

TEST(Increments, DmuInvertsE) {
    const auto spec = two_pattern();
    const auto e = increment_polynomial(spec);
    const auto d = dmu_coefficients(spec, 40).coeffs;
    const auto prod = truncated_convolution(e, d, 40);
    for (int k = 0; k <= 40; ++k) EXPECT_NEAR(prod(k), k == 0 ? 1.0 : 0.0, 1e-12);
    EXPECT_NEAR(e.sum(), 0.0, 1e-14);
}

TEST(Increments, FirstDifferenceDmuIsOnes) {
    const auto d = dmu_coefficients(simple_spec(1, 1, 1), 10).coeffs;
    for (int k = 0; k <= 10; ++k) EXPECT_EQ(d(k), 1.0);
}

TEST(Increments, DifferencingKillsTrendAndSeason) {
    Eigen::MatrixXd x(40, 1);
    for (int t = 0; t < 40; ++t) x(t, 0) = 3.0 + 0.5 * t + ((t % 4) == 1 ? 2.0 : -1.0 * (t % 4));
    // (1-B)(1-B^4) annihilates a linear trend plus period-4 pattern
    const auto y = apply_increment(x, two_pattern());
    EXPECT_EQ(y.rows(), 35);
    EXPECT_LT(y.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_THROW(apply_increment(x.topRows(3), two_pattern()), DataError);
}

TEST(Increments, ValidationRejectsBadSpecs) {
    IncrementSpec empty;
    EXPECT_THROW(validate(empty), ConfigError);
    EXPECT_THROW(validate(simple_spec(0, 1, 1)), ConfigError);
    EXPECT_THROW(validate(simple_spec(1, 1, 1, 0)), ConfigError);
    IncrementSpec frac;
    frac.patterns = {{1, 4, 0, 0.2}, {1, 2, 0, 0.1}};
    EXPECT_THROW(validate(frac), ConfigError);
}

TEST(Increments, StationarityGate) {
    IncrementSpec ok;
    ok.patterns = {{1, 1, 0, 0.2}, {1, 4, 0, 0.1}};
    EXPECT_TRUE(passes_stationarity_gate(ok));
    EXPECT_TRUE(long_memory(ok));
    IncrementSpec bad = ok;
    bad.patterns[1].frac = 0.35;  // merged order at frequency 0 is 0.55
    EXPECT_FALSE(passes_stationarity_gate(bad));
    EXPECT_THROW(fractional_expansion(bad, ExpansionSign::Plus, 16), ConfigError);
    IncrementSpec anti;
    anti.patterns = {{1, 1, 0, -0.3}};
    EXPECT_FALSE(long_memory(anti));
}

TEST(Increments, FractionalExpansionsAreInverse) {
    IncrementSpec spec;
    spec.patterns = {{1, 1, 0, 0.15}, {1, 3, 0, -0.2}, {1, 6, 0, 0.1}};
    const auto gp = fractional_expansion(spec, ExpansionSign::Plus, 200).coeffs;
    const auto gm = fractional_expansion(spec, ExpansionSign::Minus, 200).coeffs;
    const auto c = truncated_convolution(gp, gm, 200);
    for (int k = 0; k <= 200; ++k) EXPECT_NEAR(c(k), k == 0 ? 1.0 : 0.0, 1e-10);
}

TEST(Increments, GegenbauerRegrouping) {
    IncrementSpec spec;
    spec.patterns = {{1, 2, 0, 0.2}, {1, 4, 0, -0.15}};
    const int n = 120;
    const auto gp = fractional_expansion(spec, ExpansionSign::Plus, n).coeffs;
    auto ref = oracle::binomial_series(0.2, 2, n);
    ref = oracle::convolve(ref, oracle::binomial_series(-0.15, 4, n), n);
    for (int k = 0; k <= n; ++k) EXPECT_NEAR(gp(k), ref[k], 1e-10);
}

TEST(Increments, GegenbauerRecursionKnownValues) {
    // C_2^{(1)}(u) = 4u^2 - 1
    const auto c = gegenbauer_coeffs(1.0, 0.3, 3);
    EXPECT_NEAR(c(2), 4 * 0.09 - 1, 1e-14);
    EXPECT_NEAR(c(3), 8 * 0.027 - 4 * 0.3, 1e-14);
}

TEST(Increments, TransferFunctions) {
    const auto spec = two_pattern();
    for (double l : {-2.9, -1.0, 0.37, 2.2}) {
        const Complex z = std::polar(1.0, -l);
        const Complex chi = (1.0 - z) * (1.0 - std::pow(z, 4));
        EXPECT_NEAR(std::abs(chi_transfer(spec, l) - chi), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(kernel_ratio(spec, l) - chi / beta_transfer(spec, l)), 0.0, 1e-12);
    }
    // removable zero at lambda = 0: |chi/beta| -> 1 * |4 / (i pi/2 * -i pi/2 ... )| stays finite
    const Complex at0 = kernel_ratio(spec, 0.0);
    const Complex near0 = kernel_ratio(spec, 1e-4);
    EXPECT_TRUE(std::isfinite(std::abs(at0)));
    EXPECT_NEAR(std::abs(at0), std::abs(near0), 1e-3);
}

TEST(Increments, RandomIntegerSpecsInvert) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> ord(0, 3), step(1, 3);
    for (int trial = 0; trial < 30; ++trial) {
        IncrementSpec spec;
        for (int i = 0; i < 2; ++i) spec.patterns.push_back({step(rng), step(rng), ord(rng), 0.0});
        const auto e = increment_polynomial(spec);
        const int n = 3 * spec.degree() + 5;
        const auto c = truncated_convolution(e, dmu_coefficients(spec, n).coeffs, n);
        for (int k = 0; k <= n; ++k) ASSERT_NEAR(c(k), k == 0 ? 1.0 : 0.0, 1e-9);
    }
}
