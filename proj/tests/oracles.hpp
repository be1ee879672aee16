#pragma once

// Test-side reference computations, written without the library's own routines.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;

inline std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b, int n) {
    std::vector<double> out(n + 1, 0.0);
    for (int i = 0; i < static_cast<int>(a.size()) && i <= n; ++i)
        for (int j = 0; j < static_cast<int>(b.size()) && i + j <= n; ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// (1 - x^step)^R by the binomial theorem.
inline std::vector<double> difference_power(int step, int R) {
    std::vector<double> out(step * R + 1, 0.0);
    for (int j = 0; j <= R; ++j) out[step * j] = ((j % 2) ? -1.0 : 1.0) * binom(R, j);
    return out;
}

/// (1 - x^step)^(-d) up to x^n, real d.
inline std::vector<double> binomial_series(double d, int step, int n) {
    std::vector<double> out(n + 1, 0.0);
    double c = 1.0;
    for (int k = 0; step * k <= n; ++k) {
        out[step * k] = c;
        c *= (d + k) / (k + 1);
    }
    return out;
}

/// sigma^2 |num(e^{-i l})|^2 / |den(e^{-i l})|^2.
inline double arma_density(const std::vector<double>& num, const std::vector<double>& den, double sigma2, double l) {
    cd n = 0.0, d = 0.0;
    for (size_t k = 0; k < num.size(); ++k) n += num[k] * std::polar(1.0, -l * static_cast<double>(k));
    for (size_t k = 0; k < den.size(); ++k) d += den[k] * std::polar(1.0, -l * static_cast<double>(k));
    return sigma2 * std::norm(n) / std::norm(d);
}

/// Random walk xi(t) = xi(t-1) + eps(t) with N(0, sigma2) steps; `count` independent paths of length `len`.
inline Eigen::MatrixXd random_walks(int count, int len, double sigma2, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(sigma2));
    Eigen::MatrixXd out(count, len);
    for (int i = 0; i < count; ++i) {
        double x = 0.0;
        for (int t = 0; t < len; ++t) {
            x += normal(rng);
            out(i, t) = x;
        }
    }
    return out;
}

/// Compass search over pairwise mass transfers between bands.
/// x holds band masses; transfers keep sum(weights .* x) fixed and respect [lo, hi] per band.
struct CompassResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evaluations = 0;
};

inline CompassResult compass_maximize(const std::function<double(const Eigen::VectorXd&)>& objective,
                                      Eigen::VectorXd x, const Eigen::VectorXd& weights, const Eigen::VectorXd& lo,
                                      const Eigen::VectorXd& hi, double step, double min_step) {
    CompassResult r;
    r.value = objective(x);
    r.evaluations = 1;
    const int n = static_cast<int>(x.size());
    while (step > min_step) {
        bool improved = false;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                // move `step` of weighted mass from j to i
                const double di = step / weights(i);
                const double dj = step / weights(j);
                if (x(i) + di > hi(i) || x(j) - dj < lo(j)) continue;
                Eigen::VectorXd y = x;
                y(i) += di;
                y(j) -= dj;
                const double v = objective(y);
                ++r.evaluations;
                if (v > r.value) {
                    r.value = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    r.x = x;
    return r;
}

}  // namespace oracle
