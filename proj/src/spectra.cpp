#include "gmi/spectra.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/FFT>

namespace gmi {

namespace {

bool power_of_two(int M) { return M > 0 && (M & (M - 1)) == 0; }

Eigen::FFT<double>& fft_engine() {
    thread_local Eigen::FFT<double> fft;
    return fft;
}

CMatrix hermitian_part(const CMatrix& x) { return 0.5 * (x + x.adjoint()); }

CMatrix poly_at(const MatrixSeq& coeffs, Complex z, int T) {
    CMatrix acc = CMatrix::Zero(T, T);
    Complex zk = 1.0;
    for (const auto& c : coeffs) {
        acc += zk * c;
        zk *= z;
    }
    return acc;
}

}  // namespace

DensityGrid DensityGrid::zeros(int T, int M, std::string label) {
    DensityGrid g;
    g.T = T;
    g.values.assign(M, CMatrix::Zero(T, T));
    g.label = std::move(label);
    return g;
}

DensityGrid DensityGrid::constant(const CMatrix& value, int M, std::string label) {
    DensityGrid g;
    g.T = static_cast<int>(value.rows());
    g.values.assign(M, value);
    g.label = std::move(label);
    return g;
}

DensityGrid DensityGrid::from_function(int T, int M, const std::function<CMatrix(double)>& fn,
                                       std::string label) {
    DensityGrid g = zeros(T, M, std::move(label));
    for (int m = 0; m < M; ++m) g.values[m] = fn(grid_lambda(m, M));
    return g;
}

DensityGrid DensityGrid::scalar(int M, const std::function<double(double)>& fn, std::string label) {
    return from_function(1, M, [&](double l) { return CMatrix::Constant(1, 1, fn(l)); }, std::move(label));
}

void check_same_grid(const DensityGrid& a, const DensityGrid& b) {
    if (a.size() != b.size() || a.T != b.T) throw DataError("density grids do not match in size or dimension");
}

DensityGrid operator+(const DensityGrid& a, const DensityGrid& b) {
    check_same_grid(a, b);
    DensityGrid out = a;
    for (int m = 0; m < a.size(); ++m) out.values[m] += b.values[m];
    return out;
}

DensityGrid operator*(double k, const DensityGrid& a) {
    DensityGrid out = a;
    for (auto& v : out.values) v *= k;
    return out;
}

DensityModel DensityModel::make_constant(const CMatrix& c) {
    DensityModel m;
    m.kind = Kind::Constant;
    m.T = static_cast<int>(c.rows());
    m.constant = c;
    return m;
}

DensityModel DensityModel::make_rational(MatrixSeq num, MatrixSeq den) {
    if (num.empty()) throw ConfigError("rational density needs numerator coefficients");
    DensityModel m;
    m.kind = Kind::Rational;
    m.T = static_cast<int>(num.front().rows());
    m.num = std::move(num);
    m.den = std::move(den);
    for (const auto& c : m.num)
        if (c.rows() != m.T || c.cols() != m.T) throw ConfigError("numerator coefficient has wrong shape");
    for (const auto& c : m.den)
        if (c.rows() != m.T || c.cols() != m.T) throw ConfigError("denominator coefficient has wrong shape");
    return m;
}

DensityModel DensityModel::make_scalar_arma(const std::vector<double>& num, const std::vector<double>& den) {
    MatrixSeq n, d;
    for (double x : num) n.push_back(CMatrix::Constant(1, 1, x));
    for (double x : den) d.push_back(CMatrix::Constant(1, 1, x));
    return make_rational(std::move(n), std::move(d));
}

DensityModel DensityModel::make_tabulated(DensityGrid grid) {
    DensityModel m;
    m.kind = Kind::Tabulated;
    m.T = grid.T;
    m.table = std::move(grid);
    return m;
}

CMatrix eval_density_at(const DensityModel& model, double lambda) {
    switch (model.kind) {
        case DensityModel::Kind::Constant:
            return model.constant;
        case DensityModel::Kind::Rational: {
            const Complex z = std::exp(Complex(0.0, -lambda));
            const CMatrix n = poly_at(model.num, z, model.T);
            CMatrix x = n;
            if (!model.den.empty()) {
                const CMatrix a = poly_at(model.den, z, model.T);
                Eigen::PartialPivLU<CMatrix> lu(a);
                if (std::abs(lu.determinant()) < 1e-12) throw DataError("density denominator vanishes on the grid");
                x = lu.solve(n);
            }
            return hermitian_part(x * x.adjoint());
        }
        case DensityModel::Kind::Tabulated:
            throw ConfigError("tabulated densities have no pointwise evaluation");
    }
    return {};
}

DensityGrid eval_density(const DensityModel& model, int grid_size) {
    if (!power_of_two(grid_size) || grid_size < 64) throw ConfigError("grid size must be a power of two >= 64");
    if (model.kind == DensityModel::Kind::Tabulated) {
        if (model.table.size() != grid_size) throw ConfigError("tabulated density has a different grid size");
        DensityGrid g = model.table;
        for (auto& v : g.values) v = hermitian_part(v);
        return g;
    }
    DensityGrid g = DensityGrid::zeros(model.T, grid_size);
    for (int m = 0; m < grid_size; ++m) g.values[m] = hermitian_part(eval_density_at(model, g.lambda(m)));
    return g;
}

Eigen::VectorXd increment_weight(const IncrementSpec& spec, int M) {
    Eigen::VectorXd w(M);
    for (int m = 0; m < M; ++m) {
        const double r2 = std::norm(kernel_ratio(spec, DensityGrid::grid_lambda(m, M)));
        w(m) = r2 > 0.0 ? 1.0 / r2 : std::numeric_limits<double>::infinity();
    }
    return w;
}

DensityGrid noisy_density(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec) {
    check_same_grid(f, g);
    DensityGrid p = f;
    p.label = "p";
    for (int m = 0; m < f.size(); ++m) p.values[m] += std::norm(beta_transfer(spec, f.lambda(m))) * g.values[m];
    return p;
}

Eigen::VectorXcd dft_coeffs(const Eigen::VectorXcd& fn) {
    const int M = static_cast<int>(fn.size());
    std::vector<Complex> in(fn.data(), fn.data() + M), out;
    fft_engine().fwd(out, in);
    Eigen::VectorXcd F(M);
    for (int idx = 0; idx < M; ++idx) {
        const int k = idx < M / 2 ? idx : idx - M;
        F(idx) = ((k % 2 == 0) ? 1.0 : -1.0) * out[idx] / static_cast<double>(M);
    }
    return F;
}

Eigen::VectorXcd fourier_coeffs_scalar(const Eigen::VectorXcd& fn, int k_min, int k_max) {
    const int M = static_cast<int>(fn.size());
    if (k_max < k_min) throw ConfigError("empty lag range");
    if (M < 4 * (k_max - k_min)) throw NumericError("grid too coarse for requested Fourier lags");
    std::vector<Complex> in(fn.data(), fn.data() + M), out;
    fft_engine().fwd(out, in);
    Eigen::VectorXcd F(k_max - k_min + 1);
    for (int k = k_min; k <= k_max; ++k) {
        const int idx = ((k % M) + M) % M;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        F(k - k_min) = sign * out[idx] / static_cast<double>(M);
    }
    return F;
}

Eigen::VectorXcd synthesize_scalar(const Eigen::VectorXcd& coeffs, int first, int M, int sign) {
    std::vector<Complex> in(M, 0.0), out;
    for (int j = 0; j < coeffs.size(); ++j) {
        const int k = first + j;
        const int kk = sign > 0 ? k : -k;
        const int idx = ((kk % M) + M) % M;
        in[idx] += ((k % 2 == 0) ? 1.0 : -1.0) * coeffs(j);
    }
    fft_engine().inv(out, in);
    Eigen::VectorXcd v(M);
    for (int m = 0; m < M; ++m) v(m) = out[m] * static_cast<double>(M);
    return v;
}

MatrixSeq fourier_coeffs(const MatrixSeq& fn, int k_min, int k_max) {
    const int M = static_cast<int>(fn.size());
    const int rows = static_cast<int>(fn.front().rows());
    const int cols = static_cast<int>(fn.front().cols());
    MatrixSeq F(k_max - k_min + 1, CMatrix::Zero(rows, cols));
    Eigen::VectorXcd column(M);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            for (int m = 0; m < M; ++m) column(m) = fn[m](i, j);
            const Eigen::VectorXcd c = fourier_coeffs_scalar(column, k_min, k_max);
            for (int k = 0; k < c.size(); ++k) F[k](i, j) = c(k);
        }
    return F;
}

MatrixSeq synthesize(const MatrixSeq& coeffs, int first, int M, int sign) {
    const int rows = static_cast<int>(coeffs.front().rows());
    const int cols = static_cast<int>(coeffs.front().cols());
    MatrixSeq out(M, CMatrix::Zero(rows, cols));
    Eigen::VectorXcd c(coeffs.size());
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            for (size_t k = 0; k < coeffs.size(); ++k) c(k) = coeffs[k](i, j);
            const Eigen::VectorXcd v = synthesize_scalar(c, first, M, sign);
            for (int m = 0; m < M; ++m) out[m](i, j) = v(m);
        }
    return out;
}

CMatrix structural_function(const DensityGrid& f, const IncrementSpec& spec, int m, const std::vector<int>& mu1,
                            const std::vector<int>& mu2) {
    validate(spec);
    if (spec.has_fractional()) throw ConfigError("structural function requires integer orders");
    auto with_steps = [&](const std::vector<int>& mu) {
        IncrementSpec s = spec;
        if (mu.empty()) return s;
        if (mu.size() != s.patterns.size()) throw ConfigError("step vector length does not match patterns");
        for (size_t i = 0; i < mu.size(); ++i) s.patterns[i].mu = mu[i];
        validate(s);
        return s;
    };
    const IncrementSpec s1 = with_steps(mu1), s2 = with_steps(mu2);
    const int M = f.size();
    MatrixSeq integrand(M);
    for (int j = 0; j < M; ++j) {
        const double l = f.lambda(j);
        const Complex k = kernel_ratio(s1, l) * std::conj(kernel_ratio(s2, l));
        integrand[j] = k * f.values[j];
        if (!integrand[j].allFinite() || integrand[j].cwiseAbs().maxCoeff() > 1e12)
            throw NumericError("structural function integrand overflow at lambda = " + std::to_string(l));
    }
    return fourier_coeffs(integrand, -m, -m).front();
}

MinimalityReport minimality_check(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec, double cap) {
    check_same_grid(f, g);
    const DensityGrid p = noisy_density(f, g, spec);
    const Eigen::VectorXd w = increment_weight(spec, p.size());
    const int M = p.size();
    Eigen::VectorXd integrand(M);
    MinimalityReport rep;
    for (int m = 0; m < M; ++m) {
        const double l = p.lambda(m);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(p.values[m]);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (!std::isfinite(w(m))) {
            rep.offending_lambda = l;
            rep.message = "weight |beta|^2/|chi|^2 unbounded";
            return rep;
        }
        if (lo <= 1e-14 * hi) {
            rep.offending_lambda = l;
            rep.message = "p singular at a non-removable frequency";
            return rep;
        }
        integrand(m) = w(m) * (es.eigenvalues().cwiseInverse()).sum();
    }
    rep.value = integrand.mean();
    double coarse = 0.0;
    for (int m = 0; m < M; m += 2) coarse += integrand(m);
    coarse /= (M / 2);
    if (rep.value > 2.0 * coarse) {
        rep.message = "integral grows under grid refinement";
        return rep;
    }
    if (!(rep.value < cap)) {
        rep.message = "integral exceeds cap";
        return rep;
    }
    rep.pass = true;
    return rep;
}

FractionalTransform fractional_density_transform(const DensityGrid& f_tilde, const IncrementSpec& spec,
                                                 double pole_cap) {
    validate(spec);
    if (!passes_stationarity_gate(spec)) throw ConfigError("fractional orders violate the stationarity gate");
    const int M = f_tilde.size();
    const SeriesCoeffs gplus = fractional_expansion(spec, ExpansionSign::Plus, M - 1);
    const Eigen::VectorXcd transfer = synthesize_scalar(gplus.coeffs.cast<Complex>(), 0, M, -1);
    FractionalTransform out;
    out.f = f_tilde;
    out.f.label = "f";
    for (int m = 0; m < M; ++m) out.f.values[m] *= std::min(std::norm(transfer(m)), pole_cap);
    out.long_memory = long_memory(spec);
    return out;
}

}  // namespace gmi
