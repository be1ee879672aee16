#include "gmi/factorize.hpp"

#include <cmath>
#include <vector>

namespace gmi {

namespace {

double grid_scale(const DensityGrid& target) {
    double s = 0.0;
    for (const auto& v : target.values) s = std::max(s, v.cwiseAbs().maxCoeff());
    return s;
}

void check_definiteness(const DensityGrid& target, double floor, bool allow_zeros) {
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (const auto& v : target.values) {
        if (!v.allFinite()) throw NumericError("factorization target is not finite");
        Eigen::SelfAdjointEigenSolver<CMatrix> es(v);
        hi = std::max(hi, es.eigenvalues().maxCoeff());
        lo = std::min(lo, es.eigenvalues().minCoeff());
    }
    if (hi <= 0.0) throw NumericError("factorization target is zero");
    if (lo < -1e-10 * hi) throw NumericError("factorization target is not positive semidefinite");
    if (!allow_zeros && lo < floor * hi) throw NumericError("factorization target is rank deficient");
}

/// theta(0) -> lower triangular with positive diagonal by a right unitary factor.
void normalize(MatrixSeq& theta) {
    const CMatrix& t0 = theta.front();
    Eigen::LLT<CMatrix> llt(t0 * t0.adjoint());
    if (llt.info() != Eigen::Success) throw NumericError("leading factor coefficient is singular");
    const CMatrix L = llt.matrixL();
    const CMatrix U = L.triangularView<Eigen::Lower>().solve(t0);
    for (auto& c : theta) c = c * U.adjoint();
    theta.front() = L;
}

// Coefficients of e^{-i lambda k}, k = 0..count-1, of a grid function.
MatrixSeq causal_coeffs(const MatrixSeq& grid, int count) {
    const int M = static_cast<int>(grid.size());
    const int T = static_cast<int>(grid.front().rows());
    MatrixSeq out(count, CMatrix::Zero(T, T));
    Eigen::VectorXcd col(M);
    for (int i = 0; i < T; ++i)
        for (int j = 0; j < T; ++j) {
            for (int m = 0; m < M; ++m) col(m) = grid[m](i, j);
            const Eigen::VectorXcd F = dft_coeffs(col);
            for (int k = 0; k < count; ++k) out[k](i, j) = F((M - k) % M);
        }
    return out;
}

Factorization cepstral(const DensityGrid& target, int K) {
    const int M = target.size();
    Eigen::VectorXcd logs(M);
    for (int m = 0; m < M; ++m) logs(m) = std::log(target.values[m](0, 0).real());
    const Eigen::VectorXcd F = dft_coeffs(logs);
    // log Theta = c(0)/2 + sum_{k>=1} c(k) z^k, with c(k) the coefficient of e^{-i lambda k}
    Eigen::VectorXcd half(M / 2);
    half(0) = 0.5 * F(0).real();
    for (int k = 1; k < M / 2; ++k) half(k) = F(M - k);
    Eigen::VectorXcd theta_grid = synthesize_scalar(half, 0, M, -1);
    for (int m = 0; m < M; ++m) theta_grid(m) = std::exp(theta_grid(m));
    const Eigen::VectorXcd G = dft_coeffs(theta_grid);
    Factorization out;
    for (int k = 0; k <= K; ++k) out.coeffs.push_back(CMatrix::Constant(1, 1, G((M - k) % M)));
    out.coeffs.front()(0, 0) = std::abs(out.coeffs.front()(0, 0));
    return out;
}

MatrixSeq bauer_initial(const DensityGrid& target, int blocks) {
    const int T = target.T;
    const MatrixSeq R = fourier_coeffs(target.values, -(blocks - 1), blocks - 1);
    // R(k) = coefficient at -k, i.e. the autocovariance at lag k
    auto cov = [&](int k) { return R[(blocks - 1) - k]; };
    CMatrix gamma(blocks * T, blocks * T);
    for (int i = 0; i < blocks; ++i)
        for (int j = 0; j < blocks; ++j) gamma.block(i * T, j * T, T, T) = cov(i - j);
    Eigen::LLT<CMatrix> llt(gamma);
    if (llt.info() != Eigen::Success) throw NumericError("block Toeplitz Cholesky failed");
    const CMatrix L = llt.matrixL();
    MatrixSeq theta(blocks);
    const int last = blocks - 1;
    for (int k = 0; k < blocks; ++k) theta[k] = L.block(last * T, (last - k) * T, T, T);
    return theta;
}

struct WilsonResult {
    MatrixSeq theta;
    bool converged = false;
    int iterations = 0;
};

WilsonResult wilson(const DensityGrid& target, MatrixSeq theta, const FactorOptions& opts) {
    const int M = target.size();
    const int T = target.T;
    const int half = M / 2;
    theta.resize(half, CMatrix::Zero(T, T));
    WilsonResult res;
    for (int it = 1; it <= opts.max_iter; ++it) {
        const MatrixSeq tg = synthesize(theta, 0, M, -1);
        MatrixSeq xg(M);
        for (int m = 0; m < M; ++m) {
            Eigen::PartialPivLU<CMatrix> lu(tg[m]);
            const CMatrix ti = lu.inverse();
            xg[m] = ti * target.values[m] * ti.adjoint() + CMatrix::Identity(T, T);
        }
        MatrixSeq plus = causal_coeffs(xg, half);
        CMatrix x0 = plus[0];
        plus[0] = x0.triangularView<Eigen::StrictlyLower>();
        plus[0].diagonal() = 0.5 * x0.diagonal();
        const MatrixSeq pg = synthesize(plus, 0, M, -1);
        MatrixSeq ng(M);
        for (int m = 0; m < M; ++m) ng[m] = tg[m] * pg[m];
        MatrixSeq next = causal_coeffs(ng, half);
        double diff = 0.0, scale = 1.0;
        for (int k = 0; k < half; ++k) {
            diff = std::max(diff, (next[k] - theta[k]).cwiseAbs().maxCoeff());
            scale = std::max(scale, next[k].cwiseAbs().maxCoeff());
        }
        theta = std::move(next);
        res.iterations = it;
        if (!std::isfinite(diff)) break;
        if (diff < opts.tol * scale) {
            res.converged = true;
            break;
        }
    }
    res.theta = std::move(theta);
    return res;
}

Factorization matrix_factor(const DensityGrid& target, int K, const FactorOptions& opts) {
    const int blocks = std::max(2, std::min(4 * K, opts.bauer_block_cap));
    WilsonResult w;
    try {
        w = wilson(target, bauer_initial(target, blocks), opts);
    } catch (const NumericError&) {
        w.converged = false;
    }
    if (!w.converged) {
        const MatrixSeq R0 = fourier_coeffs(target.values, 0, 0);
        Eigen::LLT<CMatrix> llt(R0.front());
        w = wilson(target, MatrixSeq{CMatrix(llt.matrixL())}, opts);
    }
    normalize(w.theta);
    Factorization out;
    out.coeffs.assign(w.theta.begin(), w.theta.begin() + std::min<int>(K + 1, w.theta.size()));
    out.coeffs.resize(K + 1, CMatrix::Zero(target.T, target.T));
    out.converged = w.converged;
    out.iterations = w.iterations;
    return out;
}

}  // namespace

MatrixSeq synthesize_factor(const Factorization& fac, int M) { return synthesize(fac.coeffs, 0, M, -1); }

double reconstruction_residual(const Factorization& fac, const DensityGrid& target) {
    const MatrixSeq tg = synthesize_factor(fac, target.size());
    double r = 0.0;
    for (int m = 0; m < target.size(); ++m)
        r = std::max(r, (tg[m] * tg[m].adjoint() - target.values[m]).cwiseAbs().maxCoeff());
    return r;
}

Factorization canonical_factorize(const DensityGrid& target, int K, const FactorOptions& opts) {
    if (K < 0) throw ConfigError("factor length must be nonnegative");
    if (target.size() < 4 * (K + 1)) throw ConfigError("grid too coarse for the requested factor length");
    check_definiteness(target, opts.eigen_floor, opts.deflate_unit_zeros && target.T == 1);
    Factorization out;
    if (target.T == 1) {
        const int M = target.size();
        const double floor = opts.eigen_floor * grid_scale(target);
        DensityGrid work = target;
        std::vector<double> zeros;
        for (int pass = 0; pass < 8; ++pass) {
            int zero_at = -1;
            for (int m = 0; m < M; ++m)
                if (work.values[m](0, 0).real() <= floor) {
                    zero_at = m;
                    break;
                }
            if (zero_at < 0) break;
            if (!opts.deflate_unit_zeros) throw NumericError("factorization target is rank deficient");
            const double l0 = work.lambda(zero_at);
            for (int m = 0; m < M; ++m) {
                if (m == zero_at) continue;
                const double s = 2.0 * std::sin((work.lambda(m) - l0) / 2.0);
                work.values[m] /= s * s;
            }
            auto at = [&](int off) { return work.values[(zero_at + off + M) % M](0, 0).real(); };
            const double fill = (4.0 * (at(1) + at(-1)) - (at(2) + at(-2))) / 6.0;
            work.values[zero_at](0, 0) = fill;
            zeros.push_back(l0);
        }
        for (int m = 0; m < M; ++m)
            if (work.values[m](0, 0).real() <= floor) throw NumericError("factorization target has unsupported zeros");
        out = cepstral(work, K);
        for (double l0 : zeros) {
            const Complex root = std::exp(Complex(0.0, l0));
            for (int k = K; k >= 1; --k) out.coeffs[k] -= root * out.coeffs[k - 1];
        }
    } else {
        out = matrix_factor(target, K, opts);
    }
    out.residual = reconstruction_residual(out, target);
    return out;
}

Factorization invert_factor(const Factorization& theta, int K) {
    if (theta.coeffs.empty()) throw ConfigError("empty factor");
    const int T = theta.dim();
    Eigen::PartialPivLU<CMatrix> lu(theta.coeffs.front());
    if (std::abs(lu.determinant()) < 1e-14) throw NumericError("leading factor coefficient is singular");
    const CMatrix t0inv = lu.inverse();
    Factorization psi;
    psi.coeffs.resize(K + 1, CMatrix::Zero(T, T));
    psi.coeffs[0] = t0inv;
    for (int n = 1; n <= K; ++n) {
        CMatrix acc = CMatrix::Zero(T, T);
        for (int k = 1; k <= n && k < theta.length(); ++k) acc += theta.coeffs[k] * psi.coeffs[n - k];
        psi.coeffs[n] = -t0inv * acc;
    }
    double defect = 0.0;
    for (int n = 0; n <= K; ++n) {
        CMatrix acc = CMatrix::Zero(T, T);
        for (int k = 0; k <= n; ++k) acc += psi.coeffs[k] * theta.at(n - k);
        if (n == 0) acc -= CMatrix::Identity(T, T);
        defect = std::max(defect, acc.cwiseAbs().maxCoeff());
    }
    psi.residual = defect;
    psi.normalization = "causal inverse";
    return psi;
}

DensityGrid increment_weighted_target(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec) {
    const DensityGrid p = noisy_density(f, g, spec);
    DensityGrid t = p;
    t.label = "theta target";
    for (int m = 0; m < p.size(); ++m) t.values[m] *= std::norm(kernel_ratio(spec, p.lambda(m)));
    return t;
}

Factorization factorize_increment_weighted(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec,
                                           int K, FactorOptions opts) {
    opts.deflate_unit_zeros = true;
    return canonical_factorize(increment_weighted_target(f, g, spec), K, opts);
}

}  // namespace gmi
