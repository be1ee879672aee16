#include "gmi/forecast.hpp"

#include <cmath>

namespace gmi {

FunctionalSpec FunctionalSpec::finite(Weights a) {
    if (a.first != 0 || a.count() == 0) throw ConfigError("functional weights must be indexed from 0");
    FunctionalSpec fn;
    fn.N = a.last();
    fn.a = std::move(a);
    fn.kind = FunctionalKind::Finite;
    return fn;
}

FunctionalSpec FunctionalSpec::single_value(int T, int N, int p) {
    if (N < 0) throw ConfigError("forecast horizon must be nonnegative");
    if (p < 0 || p >= T) throw ConfigError("component index out of range");
    FunctionalSpec fn;
    fn.a = Weights(T, 0, N + 1);
    fn.a.col(N)(p) = 1.0;
    fn.kind = FunctionalKind::SingleValue;
    fn.N = N;
    fn.component = p;
    return fn;
}

FunctionalSpec FunctionalSpec::geometric(const CVector& a0, double rate, double tol) {
    if (!(std::abs(rate) < 1.0)) throw ConfigError("geometric weights need |rate| < 1");
    int count = 1;
    if (rate != 0.0) count = static_cast<int>(std::ceil(std::log(tol) / std::log(std::abs(rate)))) + 1;
    FunctionalSpec fn;
    fn.a = Weights(static_cast<int>(a0.size()), 0, count);
    double r = 1.0;
    for (int k = 0; k < count; ++k, r *= rate) fn.a.col(k) = r * a0;
    fn.kind = FunctionalKind::Infinite;
    fn.N = count - 1;
    fn.tail_bound = std::abs(r) * a0.norm() / (1.0 - std::abs(rate));
    return fn;
}

CMatrix synthesize_weights(const Weights& w, int M, int sign) {
    CMatrix out = CMatrix::Zero(w.dim(), M);
    if (w.count() == 0) return out;
    for (int i = 0; i < w.dim(); ++i) out.row(i) = synthesize_scalar(w.values.row(i).transpose(), w.first, M, sign).transpose();
    return out;
}

namespace {

/// Coefficient of e^{i lambda k} (k mod M) of each row.
CMatrix grid_coeffs(const CMatrix& grid) {
    CMatrix out(grid.rows(), grid.cols());
    for (int i = 0; i < grid.rows(); ++i) out.row(i) = dft_coeffs(grid.row(i).transpose()).transpose();
    return out;
}

Weights pick_lags(const CMatrix& coeffs, int first, int count) {
    const int M = static_cast<int>(coeffs.cols());
    Weights w(static_cast<int>(coeffs.rows()), first, count);
    for (int k = first; k < first + count; ++k) w.col(k) = coeffs.col(((k % M) + M) % M);
    return w;
}

Weights level_weights(const Weights& s, const Weights& v, const Eigen::VectorXd& e) {
    const int n = static_cast<int>(e.size()) - 1;
    const int k_max = s.count();
    Weights level(s.dim(), -(k_max + n), k_max + n);
    for (int m = level.first; m <= -1; ++m) {
        CVector acc = -v.at(m);
        for (int j = 0; j <= n; ++j) acc += e(j) * s.at(m + j);
        level.col(m) = acc;
    }
    return level;
}

void check_inputs(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec, const FunctionalSpec& fn) {
    validate(spec);
    check_same_grid(f, g);
    if (spec.has_fractional()) throw ConfigError("forecasting requires integer increment orders");
    if (fn.a.dim() != f.T) throw ConfigError("functional dimension does not match the densities");
    if (fn.a.first != 0 || fn.a.count() == 0) throw ConfigError("functional weights must be indexed from 0");
}

MinimalityReport require_minimality(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec,
                                    double cap) {
    const MinimalityReport rep = minimality_check(f, g, spec, cap);
    if (!rep.pass)
        throw NumericError("minimality condition fails: " + rep.message + " (lambda = " +
                           std::to_string(rep.offending_lambda) + ")");
    return rep;
}

std::vector<Complex> ratio_grid(const IncrementSpec& spec, int M) {
    std::vector<Complex> r(M);
    for (int m = 0; m < M; ++m) r[m] = kernel_ratio(spec, DensityGrid::grid_lambda(m, M));
    return r;
}

void finish_filter(ForecastSolution& sol, const IncrementSpec& spec, int k_max) {
    if (spec.max_step_exceeds_one()) {
        sol.diag.notes += "filter weights refused: increment steps above one leave zeros of chi uncancelled; ";
        return;
    }
    sol.diag.subspace_residual = subspace_residual(sol, spec);
    if (sol.s.count() == 0) sol.s = extract_filter_weights(sol, spec, k_max);
    sol.level = level_weights(sol.s, sol.v, increment_polynomial(spec));
    sol.filter_available = true;
}

struct OperatorSolve {
    Weights c, r;
    double rcond = 0.0, residual = 0.0;
    BlockOperator P, Q;
};

OperatorSolve operator_solve(const OperatorSymbols& sym, const Weights& b, const Weights& a_mu, int Na, int N,
                             double rcond_floor) {
    OperatorSolve out;
    out.P = toeplitz_operator(sym.P, N + 1, N + 1, "P");
    const BlockOperator T_op = toeplitz_operator(sym.T, N + 1, a_mu.count(), "T");
    out.Q = toeplitz_operator(sym.Q, Na, Na, "Q");
    const CoefficientSolve cs = solve_c(out.P, b, T_op, a_mu, rcond_floor);
    out.c = cs.c;
    out.rcond = cs.rcond;
    out.residual = cs.residual;
    CVector r = CVector::Zero((N + 1) * b.dim());
    const CVector bs = b.stacked();
    r.head(std::min<int>(r.size(), bs.size())) = bs.head(std::min<int>(r.size(), bs.size()));
    r -= T_op.apply(a_mu).stacked();
    out.r = Weights::from_stacked(r, b.dim(), 0);
    return out;
}

}  // namespace

double bracket_mse(const BlockOperator& P, const Weights& r, const BlockOperator& Q, const Weights& a) {
    Eigen::PartialPivLU<CMatrix> lu(P.dense);
    CVector rs = CVector::Zero(P.dense.rows());
    const CVector r0 = r.stacked();
    rs.head(std::min<int>(rs.size(), r0.size())) = r0.head(std::min<int>(rs.size(), r0.size()));
    const Weights c = Weights::from_stacked(lu.solve(rs), P.T, 0);
    return (bracket(Weights::from_stacked(rs, P.T, 0), c) + bracket(Q.apply(a), a)).real();
}

ForecastSolution spectral_characteristic(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec,
                                         const FunctionalSpec& fn, const ForecastOptions& opts) {
    check_inputs(f, g, spec, fn);
    ForecastSolution sol;
    sol.T = f.T;
    sol.diag.minimality_value = require_minimality(f, g, spec, opts.minimality_cap).value;
    const Eigen::VectorXd e = increment_polynomial(spec);
    sol.a = fn.a;
    sol.a_mu = a_mu_weights(sol.a, e);
    const BVWeights bv = b_and_v_weights(sol.a, spec);
    sol.b = bv.b;
    sol.v = bv.v;
    const int Na = sol.a.count();
    const int N = std::max(opts.trunc, Na - 1);
    const int M = f.size();
    if (M < 4 * std::max(2 * N, N + static_cast<int>(sol.a_mu.count()))) throw ConfigError("grid too coarse for the truncation");

    const OperatorSymbols sym = operator_symbols(f, g, spec);
    const OperatorSolve os = operator_solve(sym, sol.b, sol.a_mu, Na, N, opts.rcond_floor);
    sol.c = os.c;
    sol.diag.rcond = os.rcond;
    sol.diag.solve_residual = os.residual;
    sol.mse = (bracket(os.r, os.c) + bracket(os.Q.apply(sol.a), sol.a)).real();

    if (opts.doubling_check && M >= 4 * std::max(4 * N + 2, 2 * N + 1 + static_cast<int>(sol.a_mu.count()))) {
        const OperatorSolve os2 = operator_solve(sym, sol.b, sol.a_mu, Na, 2 * N + 1, opts.rcond_floor);
        double diff = 0.0, scale = 0.0;
        for (int k = 0; k <= N / 2; ++k) {
            diff = std::max(diff, (os2.c.at(k) - os.c.at(k)).cwiseAbs().maxCoeff());
            scale = std::max(scale, os.c.at(k).cwiseAbs().maxCoeff());
        }
        sol.diag.doubling_change = diff / std::max(scale, 1e-300);
        sol.diag.truncation_stable = sol.diag.doubling_change < 1e-6;
    } else if (opts.doubling_check) {
        sol.diag.notes += "doubling check skipped, grid too coarse; ";
    }

    const DensityGrid p = noisy_density(f, g, spec);
    const std::vector<Complex> rho = ratio_grid(spec, M);
    const CMatrix Bg = synthesize_weights(sol.b, M, 1);
    const CMatrix Ag = synthesize_weights(sol.a_mu, M, 1);
    const CMatrix Cg = synthesize_weights(sol.c, M, 1);
    sol.h = CMatrix::Zero(sol.T, M);
    for (int m = 0; m < M; ++m) {
        const CMatrix pinvT = p.values[m].inverse().transpose();
        const CVector inner = g.values[m].transpose() * Ag.col(m) + Cg.col(m);
        sol.h.col(m) = rho[m] * Bg.col(m) - (1.0 / std::conj(rho[m])) * (pinvT * inner);
    }
    const int k_max = opts.filter_lags > 0 ? opts.filter_lags : N + Na;
    if (k_max >= M / 2) throw ConfigError("too many filter lags for the grid");
    finish_filter(sol, spec, k_max);
    return sol;
}

ForecastSolution spectral_characteristic_finite(const DensityGrid& f, const DensityGrid& g,
                                                const IncrementSpec& spec, const FunctionalSpec& fn,
                                                const ForecastOptions& opts) {
    if (fn.kind == FunctionalKind::Infinite) throw ConfigError("finite forecast expects a finite functional");
    return spectral_characteristic(f, g, spec, fn, opts);
}

ForecastSolution single_value_forecast(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec, int N,
                                       int p, const ForecastOptions& opts) {
    return spectral_characteristic(f, g, spec, FunctionalSpec::single_value(f.T, N, p), opts);
}

ForecastSolution factorized_forecast(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec,
                                     const FunctionalSpec& fn, int K, const ForecastOptions& opts) {
    check_inputs(f, g, spec, fn);
    ForecastSolution sol;
    sol.T = f.T;
    const int T = f.T;
    const int M = f.size();
    sol.diag.minimality_value = require_minimality(f, g, spec, opts.minimality_cap).value;
    const Eigen::VectorXd e_poly = increment_polynomial(spec);
    sol.a = fn.a;
    sol.a_mu = a_mu_weights(sol.a, e_poly);
    const BVWeights bv = b_and_v_weights(sol.a, spec);
    sol.b = bv.b;
    sol.v = bv.v;
    const int Nb = sol.b.last();
    if (M < 4 * (K + 1 + sol.a_mu.count())) throw ConfigError("grid too coarse for the factor length");

    const Factorization theta = factorize_increment_weighted(f, g, spec, K);
    const Factorization psi = invert_factor(theta, K);
    sol.diag.factor_residual = theta.residual;

    double g_scale = 0.0;
    for (const auto& v : g.values) g_scale = std::max(g_scale, v.cwiseAbs().maxCoeff());
    const bool has_noise = g_scale > 0.0;

    // e(m): coefficients of conj(Psi) g^T A_mu over all m (mod M)
    CMatrix e_coeffs = CMatrix::Zero(T, M);
    Complex g_term = 0.0;
    if (has_noise) {
        const Factorization phi = canonical_factorize(g, K);
        sol.diag.factor_residual = std::max(sol.diag.factor_residual, phi.residual);
        const MatrixSeq psi_grid = synthesize_factor(psi, M);
        const MatrixSeq phi_grid = synthesize_factor(phi, M);
        const CMatrix Ag = synthesize_weights(sol.a_mu, M, 1);
        CMatrix Eg(T, M);
        for (int m = 0; m < M; ++m)
            Eg.col(m) = psi_grid[m].conjugate() * (phi_grid[m].conjugate() * (phi_grid[m].transpose() * Ag.col(m)));
        e_coeffs = grid_coeffs(Eg);
        const MatrixLags gl = covariance_from_factor(phi);
        for (int j = 0; j < sol.a.count(); ++j)
            for (int k = 0; k < sol.a.count(); ++k)
                g_term += sol.a.at(j).dot(gl.at(j - k).transpose() * sol.a.at(k));
    }
    auto e_at = [&](int m) -> CVector { return e_coeffs.col(((m % M) + M) % M); };
    auto theta_b = [&](int n) -> CVector {
        CVector acc = CVector::Zero(T);
        for (int q = std::max(0, -n); q <= std::min(K, Nb - n); ++q) acc += theta.at(q).transpose() * sol.b.at(q + n);
        return acc;
    };

    const int half = M / 2;
    Weights x(T, 0, half);
    double mse1 = 0.0;
    for (int n = 0; n < half; ++n) {
        x.col(n) = theta_b(n) - e_at(n);
        mse1 += x.values.col(n).squaredNorm();
    }
    const double e_energy = e_coeffs.squaredNorm();
    sol.mse = mse1 + g_term.real() - e_energy;

    const int N = std::max(opts.trunc, Nb);
    sol.c = Weights(T, 0, N + 1);
    for (int k = 0; k <= N; ++k)
        for (int l = 0; l <= k; ++l) sol.c.col(k) += theta.at(k - l).conjugate() * x.at(l);

    Weights r(T, 1, half - 1);
    for (int m = 1; m < half; ++m) r.col(m) = theta_b(-m) - e_at(-m);

    const MatrixSeq psi_grid = synthesize_factor(psi, M);
    const CMatrix Rg = synthesize_weights(r, M, -1);
    const std::vector<Complex> rho = ratio_grid(spec, M);
    sol.h = CMatrix::Zero(T, M);
    for (int m = 0; m < M; ++m) sol.h.col(m) = rho[m] * (psi_grid[m].transpose() * Rg.col(m));

    const int k_max = opts.filter_lags > 0 ? opts.filter_lags : N + sol.a.count();
    if (k_max >= half) throw ConfigError("too many filter lags for the grid");
    if (!spec.max_step_exceeds_one()) {
        sol.s = Weights(T, -k_max, k_max);
        for (int k = 1; k <= k_max; ++k)
            for (int m = std::max(1, k - K); m <= k; ++m) sol.s.col(-k) += psi.at(k - m).transpose() * r.at(m);
    }
    sol.diag.rcond = std::numeric_limits<double>::quiet_NaN();
    finish_filter(sol, spec, k_max);
    return sol;
}

Weights extract_filter_weights(const ForecastSolution& sol, const IncrementSpec& spec, int k_max) {
    if (spec.max_step_exceeds_one())
        throw ConfigError("filter weights unavailable: increment steps above one leave zeros of chi uncancelled");
    const int M = static_cast<int>(sol.h.cols());
    if (k_max >= M / 2) throw ConfigError("too many filter lags for the grid");
    const std::vector<Complex> rho = ratio_grid(spec, M);
    CMatrix u(sol.T, M);
    for (int m = 0; m < M; ++m) u.col(m) = sol.h.col(m) / rho[m];
    return pick_lags(grid_coeffs(u), -k_max, k_max);
}

double subspace_residual(const ForecastSolution& sol, const IncrementSpec& spec) {
    const int M = static_cast<int>(sol.h.cols());
    const std::vector<Complex> rho = ratio_grid(spec, M);
    CMatrix u(sol.T, M);
    for (int m = 0; m < M; ++m) u.col(m) = sol.h.col(m) / rho[m];
    const CMatrix F = grid_coeffs(u);
    double inside = 0.0, outside = 0.0;
    for (int k = -M / 2; k < M / 2; ++k) {
        const double v = F.col(((k % M) + M) % M).cwiseAbs().maxCoeff();
        (k >= 0 ? outside : inside) = std::max(k >= 0 ? outside : inside, v);
    }
    double scale = std::max(inside, sol.b.values.cwiseAbs().maxCoeff());
    return outside / std::max(scale, 1e-300);
}

Eigen::MatrixXd interleave(const Eigen::VectorXd& series, int T) {
    if (T <= 0) throw ConfigError("period must be positive");
    const int rows = static_cast<int>((series.size() + T - 1) / T);
    Eigen::MatrixXd out = Eigen::MatrixXd::Constant(rows, T, std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < series.size(); ++i) out(i / T, i % T) = series(i);
    return out;
}

Eigen::VectorXd deinterleave(const Eigen::MatrixXd& blocks) {
    Eigen::VectorXd out(blocks.size());
    int n = 0;
    for (int m = 0; m < blocks.rows(); ++m)
        for (int p = 0; p < blocks.cols(); ++p) {
            if (std::isnan(blocks(m, p))) return out.head(n);
            out(n++) = blocks(m, p);
        }
    return out.head(n);
}

FunctionalSpec lift_functional(const Eigen::VectorXd& a_scalar, int T) {
    if (T <= 0) throw ConfigError("period must be positive");
    const int count = static_cast<int>((a_scalar.size() + T - 1) / T);
    Weights a(T, 0, std::max(count, 1));
    for (int i = 0; i < a_scalar.size(); ++i) a.col(i / T)(i % T) = a_scalar(i);
    return FunctionalSpec::finite(std::move(a));
}

Complex apply_forecast(const Eigen::MatrixXd& observations, const ForecastSolution& sol, const IncrementSpec& spec) {
    if (!sol.filter_available) throw ConfigError("solution has no time-domain filter weights");
    const int L = static_cast<int>(observations.rows());
    if (observations.cols() != sol.T) throw DataError("observation width does not match the dimension");
    const int n = increment_polynomial(spec).size() - 1;
    if (L < sol.s.count() + n) throw DataError("insufficient history for the filter weights");
    Complex est = 0.0;
    for (int m = sol.level.first; m <= -1; ++m)
        est += (sol.level.at(m).transpose() * observations.row(L + m).transpose().cast<Complex>())(0);
    return est;
}

}  // namespace gmi
