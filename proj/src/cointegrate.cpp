#include "gmi/cointegrate.hpp"

#include <cmath>
#include <numeric>

#include <unsupported/Eigen/FFT>

namespace gmi {

void validate(const CointegrationSpec& cs) {
    if (cs.alpha == 0.0 || !std::isfinite(cs.alpha)) throw ConfigError("cointegration coefficient must be nonzero");
    check_same_grid(cs.f, cs.p);
    for (int m = 0; m < cs.p.size(); ++m) {
        const CMatrix r = cs.p.values[m] - cs.alpha * cs.alpha * cs.f.values[m];
        Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
        const double scale = std::max(1.0, cs.p.values[m].cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() < -1e-8 * scale)
            throw DataError("p - alpha^2 f is not positive semidefinite at lambda = " +
                            std::to_string(cs.p.lambda(m)));
    }
}

DensityGrid remainder_density(const CointegrationSpec& cs, const IncrementSpec& spec) {
    validate(cs);
    const int M = cs.p.size();
    DensityGrid g = DensityGrid::zeros(cs.p.T, M, "g");
    std::vector<int> holes;
    for (int m = 0; m < M; ++m) {
        const double b2 = std::norm(beta_transfer(spec, cs.p.lambda(m)));
        if (b2 <= 1e-12) {
            holes.push_back(m);
            continue;
        }
        g.values[m] = (cs.p.values[m] - cs.alpha * cs.alpha * cs.f.values[m]) / b2;
    }
    for (int m : holes) {
        auto at = [&](int off) { return g.values[(m + off + M) % M]; };
        g.values[m] = (4.0 * (at(1) + at(-1)) - (at(2) + at(-2))) / 6.0;
    }
    return g;
}

OperatorSet coint_operators(const CointegrationSpec& cs, const IncrementSpec& spec, int N, int t_cols, int q_size) {
    if (t_cols < 0) t_cols = N + 1;
    if (q_size < 0) q_size = N + 1;
    const DensityGrid rem = remainder_density(cs, spec);
    const Eigen::VectorXd w = increment_weight(spec, cs.p.size());
    const int M = cs.p.size();
    const double a2 = cs.alpha * cs.alpha;
    MatrixSeq P(M), T(M), Q(M);
    for (int m = 0; m < M; ++m) {
        const double l = cs.p.lambda(m);
        if (!std::isfinite(w(m))) throw NumericError("increment weight unbounded at lambda = " + std::to_string(l));
        const CMatrix pinv = cs.p.values[m].inverse();
        const double b2 = std::norm(beta_transfer(spec, l));
        const double c2 = std::norm(chi_transfer(spec, l));
        P[m] = w(m) * pinv.transpose();
        if (b2 > 1e-12 && c2 > 1e-12) {
            const CMatrix r = cs.p.values[m] - a2 * cs.f.values[m];
            T[m] = (r * pinv).transpose() / c2;
            Q[m] = (cs.f.values[m] * pinv * r).transpose() / b2;
        } else {
            T[m] = w(m) * (rem.values[m] * pinv).transpose();
            Q[m] = (cs.f.values[m] * pinv * rem.values[m]).transpose();
        }
    }
    return {toeplitz_operator(P, N + 1, N + 1, "P alpha"), toeplitz_operator(T, N + 1, t_cols, "T alpha"),
            toeplitz_operator(Q, q_size, q_size, "Q alpha")};
}

namespace {

FunctionalSpec rescaled(const FunctionalSpec& fn, double alpha) {
    FunctionalSpec out = fn;
    out.a.values /= alpha;
    return out;
}

}  // namespace

ForecastSolution coint_forecast(const CointegrationSpec& cs, const IncrementSpec& spec, const FunctionalSpec& fn,
                                const ForecastOptions& opts) {
    const DensityGrid g = remainder_density(cs, spec);
    return spectral_characteristic((cs.alpha * cs.alpha) * cs.f, g, spec, rescaled(fn, cs.alpha), opts);
}

ForecastSolution coint_factorized_forecast(const CointegrationSpec& cs, const IncrementSpec& spec,
                                           const FunctionalSpec& fn, int K, const ForecastOptions& opts) {
    const DensityGrid g = remainder_density(cs, spec);
    return factorized_forecast((cs.alpha * cs.alpha) * cs.f, g, spec, rescaled(fn, cs.alpha), K, opts);
}

CointegrationReport check_cointegration(const Eigen::VectorXd& zeta, const Eigen::VectorXd& xi, double alpha) {
    if (alpha == 0.0) throw ConfigError("cointegration coefficient must be nonzero");
    if (zeta.size() != xi.size()) throw DataError("series lengths differ");
    const Eigen::VectorXd u = zeta - alpha * xi;
    const int n = static_cast<int>(u.size());
    if (n < 64) throw DataError("series too short for the cointegration check");
    std::vector<double> lw, lv;
    for (int w = 1; w <= n / 8; w *= 2) {
        const Eigen::VectorXd d = u.tail(n - w) - u.head(n - w);
        const double var = (d.array() - d.mean()).square().mean();
        lw.push_back(std::log(static_cast<double>(w)));
        lv.push_back(std::log(std::max(var, 1e-300)));
    }
    const double mw = std::accumulate(lw.begin(), lw.end(), 0.0) / lw.size();
    const double mv = std::accumulate(lv.begin(), lv.end(), 0.0) / lv.size();
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < lw.size(); ++i) {
        sxy += (lw[i] - mw) * (lv[i] - mv);
        sxx += (lw[i] - mw) * (lw[i] - mw);
    }
    CointegrationReport rep;
    rep.variance_slope = sxx > 0.0 ? sxy / sxx : 0.0;

    std::vector<double> centred(n);
    for (int i = 0; i < n; ++i) centred[i] = u(i) - u.mean();
    std::vector<std::complex<double>> spec;
    Eigen::FFT<double> fft;
    fft.fwd(spec, centred);
    double total = 0.0, low = 0.0;
    const int cut = std::max(1, n / 40);
    for (int k = 1; k <= n / 2; ++k) {
        const double v = std::norm(spec[k]);
        total += v;
        if (k <= cut) low += v;
    }
    rep.low_frequency_mass = total > 0.0 ? low / total : 0.0;
    rep.stationary = rep.variance_slope < 0.5 && rep.low_frequency_mass < 0.5;
    return rep;
}

}  // namespace gmi
