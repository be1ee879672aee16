#include "gmi/simulate.hpp"

#include <cmath>

namespace gmi {

std::vector<Eigen::MatrixXd> ma_filter(const DensityModel& model, int grid, int K) {
    std::vector<Eigen::MatrixXd> out;
    if (model.kind == DensityModel::Kind::Constant) {
        const Eigen::MatrixXd c = model.constant.real();
        double scale = c.cwiseAbs().maxCoeff();
        if (scale == 0.0) {
            out.push_back(Eigen::MatrixXd::Zero(c.rows(), c.cols()));
            return out;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(c);
        if (llt.info() != Eigen::Success) throw NumericError("constant density is not positive definite");
        out.push_back(llt.matrixL());
        return out;
    }
    const Factorization fac = canonical_factorize(eval_density(model, grid), K);
    if (fac.residual > 1e-6 * std::max(1.0, fac.coeffs.front().cwiseAbs().maxCoeff()))
        throw NumericError("moving-average factor does not reproduce the density");
    double scale = 0.0;
    for (const auto& c : fac.coeffs) scale = std::max(scale, c.cwiseAbs().maxCoeff());
    int keep = static_cast<int>(fac.coeffs.size());
    while (keep > 1 && fac.coeffs[keep - 1].cwiseAbs().maxCoeff() < 1e-14 * scale) --keep;
    for (int k = 0; k < keep; ++k) out.push_back(fac.coeffs[k].real());
    return out;
}

GmGenerator::GmGenerator(SimulationConfig cfg) : cfg_(std::move(cfg)) {
    validate(cfg_.spec);
    if (cfg_.length <= 0) throw ConfigError("simulation length must be positive");
    T_ = cfg_.increments.T;
    inc_filter_ = ma_filter(cfg_.increments, cfg_.grid, cfg_.filter_length);
    if (cfg_.noise) {
        if (cfg_.noise->T != T_) throw ConfigError("noise dimension does not match the signal");
        noise_filter_ = ma_filter(*cfg_.noise, cfg_.grid, cfg_.filter_length);
    }
    IncrementSpec integer = cfg_.spec;
    for (auto& p : integer.patterns) p.frac = 0.0;
    e_ = increment_polynomial(integer);
    if (cfg_.spec.has_fractional())
        frac_ = fractional_expansion(cfg_.spec, ExpansionSign::Plus, cfg_.fractional_window - 1).coeffs;
    const int window = static_cast<int>(std::max(inc_filter_.size(), noise_filter_.size())) +
                       static_cast<int>(frac_.size());
    const int required = 10 * window;
    if (cfg_.burn_in < 0) cfg_.burn_in = required;
    if (cfg_.burn_in < required)
        throw ConfigError("burn-in must be at least ten times the filter window (" + std::to_string(required) + ")");
}

Eigen::MatrixXd GmGenerator::filtered_noise(const std::vector<Eigen::MatrixXd>& filter, int count,
                                            std::mt19937_64& rng) const {
    const int K = static_cast<int>(filter.size());
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd eps(count + K - 1, T_);
    for (int t = 0; t < eps.rows(); ++t)
        for (int j = 0; j < T_; ++j) eps(t, j) = normal(rng);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(count, T_);
    for (int t = 0; t < count; ++t)
        for (int k = 0; k < K; ++k) out.row(t) += (filter[k] * eps.row(t + K - 1 - k).transpose()).transpose();
    return out;
}

SimulatedPath GmGenerator::draw(std::mt19937_64& rng) const {
    const int count = cfg_.burn_in + cfg_.length;
    const int W = static_cast<int>(frac_.size());
    Eigen::MatrixXd x = filtered_noise(inc_filter_, count + std::max(W - 1, 0), rng);
    if (W > 0) {
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(count, T_);
        for (int t = 0; t < count; ++t)
            for (int k = 0; k < W; ++k) y.row(t) += frac_(k) * x.row(t + W - 1 - k);
        x = y;
    }
    const int n = static_cast<int>(e_.size()) - 1;
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(count, T_);
    for (int t = 0; t < count; ++t) {
        xi.row(t) = x.row(t);
        for (int k = 1; k <= n && t - k >= 0; ++k) xi.row(t) -= e_(k) * xi.row(t - k);
    }
    SimulatedPath path;
    path.xi = xi.bottomRows(cfg_.length);
    path.increments = x.bottomRows(cfg_.length);
    path.zeta = path.xi;
    if (!noise_filter_.empty()) path.zeta += filtered_noise(noise_filter_, cfg_.length, rng);
    return path;
}

SimulatedPath GmGenerator::draw() const {
    std::mt19937_64 rng(cfg_.seed);
    return draw(rng);
}

SimulatedPath generate_gm_sequence(const SimulationConfig& cfg) { return GmGenerator(cfg).draw(); }

Eigen::MatrixXd add_noise(const Eigen::MatrixXd& xi, const DensityModel& g, std::uint64_t seed, int grid, int K) {
    if (g.T != xi.cols()) throw ConfigError("noise dimension does not match the series");
    const std::vector<Eigen::MatrixXd> filter = ma_filter(g, grid, K);
    const int T = static_cast<int>(xi.cols());
    const int L = static_cast<int>(filter.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd eps(xi.rows() + L - 1, T);
    for (int t = 0; t < eps.rows(); ++t)
        for (int j = 0; j < T; ++j) eps(t, j) = normal(rng);
    Eigen::MatrixXd out = xi;
    for (int t = 0; t < xi.rows(); ++t)
        for (int k = 0; k < L; ++k) out.row(t) += (filter[k] * eps.row(t + L - 1 - k).transpose()).transpose();
    return out;
}

DensityGrid signal_density_from_increments(const DensityGrid& increment_density, const IncrementSpec& spec) {
    DensityGrid f = increment_density;
    f.label = "f";
    const Eigen::VectorXd w = increment_weight(spec, f.size());
    for (int m = 0; m < f.size(); ++m) {
        if (!std::isfinite(w(m))) throw NumericError("increment weight unbounded on the grid");
        f.values[m] *= w(m);
    }
    return f;
}

ProjectionResult brute_force_projection(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec,
                                        const FunctionalSpec& fn, int L) {
    check_same_grid(f, g);
    const int T = f.T;
    if (L <= 0) throw ConfigError("history length must be positive");
    if (L * T > 4000) throw ConfigError("history too long for the dense projection");
    const BVWeights bv = b_and_v_weights(fn.a, spec);
    const Weights& a = fn.a;
    const Weights& b = bv.b;
    const int Nb = b.last();
    const int M = f.size();

    // spectral densities of the observed increments and of the cross terms with eta
    MatrixSeq Sy(M), Cg(M), Gg(M);
    for (int m = 0; m < M; ++m) {
        const double l = f.lambda(m);
        const Complex chi = chi_transfer(spec, l);
        Sy[m] = std::norm(kernel_ratio(spec, l)) * f.values[m] + std::norm(chi) * g.values[m];
        Cg[m] = g.values[m] * std::conj(chi);
        Gg[m] = g.values[m];
    }
    const int span = L + Nb + 1;
    if (M < 8 * span) throw ConfigError("grid too coarse for the projection history");
    // F(k) for k in [-span, span]
    const MatrixSeq Fy = fourier_coeffs(Sy, -span, span);
    const MatrixSeq Fc = fourier_coeffs(Cg, -span, span);
    const MatrixSeq Fg = fourier_coeffs(Gg, -span, span);
    auto R_y = [&](int m) -> const CMatrix& { return Fy[-m + span]; };      // E y(k+m) y(k)^*
    auto eta_y = [&](int l, int k) -> const CMatrix& { return Fc[k - l + span]; };  // E eta(l) y(k)^*
    auto R_eta = [&](int m) -> const CMatrix& { return Fg[-m + span]; };

    // Gram matrix of y(-L..-1)
    CMatrix gram(L * T, L * T);
    for (int i = 0; i < L; ++i)
        for (int k = 0; k < L; ++k) gram.block(i * T, k * T, T, T) = R_y(i - k);
    // q(k) = E[H conj(y(k))], row vectors stacked
    CVector q(L * T);
    for (int i = 0; i < L; ++i) {
        const int k = i - L;
        Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Zero(T);
        for (int l = 0; l <= Nb; ++l) acc += b.at(l).transpose() * R_y(l - k);
        for (int l = 0; l <= a.last(); ++l) acc -= a.at(l).transpose() * eta_y(l, k);
        q.segment(i * T, T) = acc.transpose();
    }
    Complex var = 0.0;
    for (int l = 0; l <= Nb; ++l)
        for (int j = 0; j <= Nb; ++j) var += (b.at(l).transpose() * R_y(l - j) * b.at(j).conjugate())(0);
    for (int l = 0; l <= a.last(); ++l)
        for (int j = 0; j <= a.last(); ++j) {
            var += (a.at(l).transpose() * R_eta(l - j) * a.at(j).conjugate())(0);
            // E[y(l) eta(j)^*] = E[eta(j) y(l)^*]^*
            var -= 2.0 * (b.at(l).transpose() * eta_y(j, l).adjoint() * a.at(j).conjugate())(0).real();
        }

    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
    ProjectionResult out;
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    if (out.min_eigenvalue <= 1e-12 * es.eigenvalues().maxCoeff())
        throw NumericError("projection Gram matrix is singular (min eigenvalue " + std::to_string(out.min_eigenvalue) + ")");
    // gamma^T Gram = q^T  =>  Gram^T gamma = q
    Eigen::LDLT<CMatrix> ldlt(gram.conjugate());
    const CVector gamma = ldlt.solve(q);
    out.weights = Weights::from_stacked(gamma, T, -L);
    out.target_variance = var.real();
    out.mse = var.real() - (gamma.transpose() * gram * gamma.conjugate())(0).real();
    return out;
}

}  // namespace gmi
