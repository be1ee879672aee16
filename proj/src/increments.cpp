#include "gmi/increments.hpp"

#include <algorithm>
#include <cmath>

namespace gmi {

int IncrementSpec::degree() const {
    int n = 0;
    for (const auto& p : patterns) n += p.mu * p.s * p.order;
    return n;
}

int IncrementSpec::total_order() const {
    int d = 0;
    for (const auto& p : patterns) d += p.order;
    return d;
}

bool IncrementSpec::has_fractional() const {
    return std::any_of(patterns.begin(), patterns.end(), [](const Pattern& p) { return p.frac != 0.0; });
}

bool IncrementSpec::max_step_exceeds_one() const {
    return std::any_of(patterns.begin(), patterns.end(),
                       [](const Pattern& p) { return p.mu > 1 && (p.order > 0 || p.frac != 0.0); });
}

void validate(const IncrementSpec& spec) {
    if (spec.patterns.empty()) throw ConfigError("increment spec has no patterns");
    if (spec.period < 1) throw ConfigError("period must be positive");
    for (const auto& p : spec.patterns) {
        if (p.mu < 1) throw ConfigError("increment step mu must be a positive integer");
        if (p.s < 1) throw ConfigError("season length s must be a positive integer");
        if (p.order < 0) throw ConfigError("integer order must be nonnegative");
    }
    if (spec.has_fractional()) {
        int prev = 1;
        bool first = true;
        for (const auto& p : spec.patterns) {
            if (first && p.s == 1) {
                first = false;
                continue;
            }
            first = false;
            if (p.s <= prev) throw ConfigError("fractional seasons must be strictly increasing and > 1");
            prev = p.s;
        }
    }
}

IncrementSpec simple_spec(int mu, int s, int order, int period) {
    IncrementSpec spec;
    spec.patterns.push_back({mu, s, order, 0.0});
    spec.period = period;
    return spec;
}

Eigen::VectorXd increment_polynomial(const IncrementSpec& spec) {
    validate(spec);
    if (spec.has_fractional()) throw ConfigError("increment polynomial requires integer orders");
    Eigen::VectorXd e = Eigen::VectorXd::Ones(1);
    for (const auto& p : spec.patterns) {
        const int step = p.mu * p.s;
        for (int r = 0; r < p.order; ++r) {
            Eigen::VectorXd next = Eigen::VectorXd::Zero(e.size() + step);
            for (int i = 0; i < e.size(); ++i) {
                next(i) += e(i);
                next(i + step) -= e(i);
            }
            e = next;
        }
    }
    return e;
}

Eigen::MatrixXd apply_increment(const Eigen::MatrixXd& series, const IncrementSpec& spec) {
    const Eigen::VectorXd e = increment_polynomial(spec);
    const int n = static_cast<int>(e.size()) - 1;
    if (series.rows() < n + 1) throw DataError("series shorter than increment degree + 1");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(series.rows() - n, series.cols());
    for (int m = 0; m < out.rows(); ++m)
        for (int k = 0; k <= n; ++k)
            if (e(k) != 0.0) out.row(m) += e(k) * series.row(m + n - k);
    return out;
}

SeriesCoeffs dmu_coefficients(const IncrementSpec& spec, int n_max) {
    validate(spec);
    if (spec.has_fractional()) throw ConfigError("d_mu coefficients require integer orders");
    if (n_max < 0) throw ConfigError("n_max must be nonnegative");
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n_max + 1);
    d(0) = 1.0;
    for (const auto& p : spec.patterns) {
        const int step = p.mu * p.s;
        // multiply by 1/(1 - x^step) via a running sum, order times
        for (int r = 0; r < p.order; ++r)
            for (int k = step; k <= n_max; ++k) d(k) += d(k - step);
    }
    return {d, std::abs(d(n_max))};
}

std::vector<FrequencyOrder> merged_orders(const IncrementSpec& spec) {
    std::vector<FrequencyOrder> out;
    auto add = [&](double nu, double D) {
        for (auto& fo : out)
            if (std::abs(fo.nu - nu) < 1e-12) {
                fo.order += D;
                return;
            }
        out.push_back({nu, D, 0.0});
    };
    for (const auto& p : spec.patterns) {
        if (p.frac == 0.0) continue;
        for (int k = 0; k <= p.s / 2; ++k) add(2.0 * kPi * k / p.s, p.frac);
    }
    for (auto& fo : out) {
        const bool edge = std::abs(fo.nu) < 1e-12 || std::abs(fo.nu - kPi) < 1e-12;
        fo.exponent = edge ? fo.order / 2.0 : fo.order;
    }
    std::sort(out.begin(), out.end(), [](const FrequencyOrder& a, const FrequencyOrder& b) { return a.nu < b.nu; });
    return out;
}

bool passes_stationarity_gate(const IncrementSpec& spec) {
    for (const auto& fo : merged_orders(spec))
        if (!(fo.order > -0.5 && fo.order < 0.5)) return false;
    return true;
}

bool long_memory(const IncrementSpec& spec) {
    for (const auto& fo : merged_orders(spec))
        if (fo.order > 0.0 && fo.order < 0.5) return true;
    return false;
}

SeriesCoeffs fractional_expansion(const IncrementSpec& spec, ExpansionSign sign, int n_max) {
    validate(spec);
    if (n_max < 0) throw ConfigError("n_max must be nonnegative");
    if (!passes_stationarity_gate(spec)) throw ConfigError("fractional orders violate the stationarity gate");
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n_max + 1);
    g(0) = 1.0;
    double dmax = 0.0;
    for (const auto& fo : merged_orders(spec)) {
        const double d = sign == ExpansionSign::Plus ? fo.exponent : -fo.exponent;
        dmax = std::max(dmax, sign == ExpansionSign::Plus ? fo.order : -fo.order);
        const Eigen::VectorXd c = gegenbauer_coeffs(d, std::cos(fo.nu), n_max);
        g = truncated_convolution(g, c, n_max);
    }
    const double decay = std::max(1e-12, 1.0 - dmax);
    return {g, std::abs(g(n_max)) * (n_max + 1) / decay};
}

namespace {

// 1 - e^{-i theta} without cancellation near theta = 0
Complex one_minus_expi(double theta) {
    return Complex(0.0, 2.0 * std::sin(theta / 2.0)) * std::exp(Complex(0.0, -theta / 2.0));
}

Complex raise(Complex z, double d) {
    if (d == std::round(d)) {
        Complex r = 1.0;
        for (int i = 0; i < static_cast<int>(std::abs(d)); ++i) r *= z;
        return d >= 0 ? r : 1.0 / r;
    }
    return std::pow(z, d);
}

Complex beta_factor(const Pattern& p, double lambda) {
    Complex b = 1.0;
    for (int k = -p.s / 2; k <= p.s / 2; ++k) b *= Complex(0.0, lambda - 2.0 * kPi * k / p.s);
    return b;
}

bool near_beta_zero(const IncrementSpec& spec, double lambda) {
    for (const auto& p : spec.patterns) {
        if (p.order == 0 && p.frac == 0.0) continue;
        for (int k = -p.s / 2; k <= p.s / 2; ++k)
            if (std::abs(lambda - 2.0 * kPi * k / p.s) < 1e-9) return true;
    }
    return false;
}

Complex raw_ratio(const IncrementSpec& spec, double lambda) {
    Complex r = 1.0;
    for (const auto& p : spec.patterns) {
        const double d = p.order + p.frac;
        if (d == 0.0) continue;
        r *= raise(one_minus_expi(lambda * p.mu * p.s) / beta_factor(p, lambda), d);
    }
    return r;
}

}  // namespace

Complex chi_transfer(const IncrementSpec& spec, double lambda) {
    Complex c = 1.0;
    for (const auto& p : spec.patterns) {
        const double d = p.order + p.frac;
        if (d == 0.0) continue;
        c *= raise(one_minus_expi(lambda * p.mu * p.s), d);
    }
    return c;
}

Complex beta_transfer(const IncrementSpec& spec, double lambda) {
    Complex b = 1.0;
    for (const auto& p : spec.patterns) {
        const double d = p.order + p.frac;
        if (d == 0.0) continue;
        b *= raise(beta_factor(p, lambda), d);
    }
    return b;
}

Complex kernel_ratio(const IncrementSpec& spec, double lambda) {
    if (near_beta_zero(spec, lambda))
        return 0.5 * (raw_ratio(spec, lambda + 1e-7) + raw_ratio(spec, lambda - 1e-7));
    return raw_ratio(spec, lambda);
}

}  // namespace gmi
