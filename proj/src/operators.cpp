#include "gmi/operators.hpp"

#include <cmath>

namespace gmi {

Weights BlockOperator::apply(const Weights& x) const {
    CVector in = CVector::Zero(dense.cols());
    const int n = std::min<int>(static_cast<int>(in.size()), static_cast<int>(x.values.size()));
    const CVector xs = x.stacked();
    for (int i = 0; i < n; ++i) in(i) = xs(i);
    return Weights::from_stacked(dense * in, T, 0);
}

BlockOperator toeplitz_operator(const MatrixSeq& symbol, int block_rows, int block_cols, std::string role) {
    const int T = static_cast<int>(symbol.front().rows());
    const int lo = -(block_cols - 1), hi = block_rows - 1;
    const MatrixSeq F = fourier_coeffs(symbol, lo, hi);
    BlockOperator op(T, block_rows, block_cols, std::move(role));
    for (int j = 0; j < block_rows; ++j)
        for (int k = 0; k < block_cols; ++k) op.block(j, k) = F[j - k - lo];
    return op;
}

OperatorSymbols operator_symbols(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec) {
    check_same_grid(f, g);
    const DensityGrid p = noisy_density(f, g, spec);
    const Eigen::VectorXd w = increment_weight(spec, p.size());
    const int M = p.size();
    OperatorSymbols s;
    s.P.resize(M);
    s.T.resize(M);
    s.Q.resize(M);
    for (int m = 0; m < M; ++m) {
        if (!std::isfinite(w(m))) throw NumericError("increment weight unbounded at lambda = " + std::to_string(p.lambda(m)));
        Eigen::PartialPivLU<CMatrix> lu(p.values[m]);
        if (std::abs(lu.determinant()) < 1e-300) throw NumericError("p singular at lambda = " + std::to_string(p.lambda(m)));
        const CMatrix pinv = lu.inverse();
        s.P[m] = w(m) * pinv.transpose();
        s.T[m] = w(m) * (g.values[m] * pinv).transpose();
        s.Q[m] = (f.values[m] * pinv * g.values[m]).transpose();
    }
    return s;
}

OperatorSet build_PTQ(const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec, int N, int t_cols,
                      int q_size) {
    if (N < 0) throw ConfigError("truncation must be nonnegative");
    if (t_cols < 0) t_cols = N + 1;
    if (q_size < 0) q_size = N + 1;
    const OperatorSymbols s = operator_symbols(f, g, spec);
    return {toeplitz_operator(s.P, N + 1, N + 1, "P"), toeplitz_operator(s.T, N + 1, t_cols, "T"),
            toeplitz_operator(s.Q, q_size, q_size, "Q")};
}

BlockOperator build_D(const IncrementSpec& spec, int T, int N) {
    const Eigen::VectorXd d = dmu_coefficients(spec, N).coeffs;
    BlockOperator op(T, N + 1, N + 1, "D");
    for (int j = 0; j <= N; ++j)
        for (int k = j; k <= N; ++k) op.block(j, k) = d(k - j) * CMatrix::Identity(T, T);
    return op;
}

Weights a_mu_weights(const Weights& a, const Eigen::VectorXd& e) {
    if (a.first != 0) throw ConfigError("functional weights must start at index 0");
    const int n = static_cast<int>(e.size()) - 1;
    Weights out(a.dim(), 0, a.count() + n);
    for (int m = 0; m < out.count(); ++m)
        for (int l = std::max(m - n, 0); l <= std::min(m, a.last()); ++l) out.col(m) += e(m - l) * a.at(l);
    return out;
}

BVWeights b_and_v_weights(const Weights& a, const IncrementSpec& spec) {
    if (a.first != 0) throw ConfigError("functional weights must start at index 0");
    const int N = a.last();
    const Eigen::VectorXd e = increment_polynomial(spec);
    const int n = static_cast<int>(e.size()) - 1;
    const Eigen::VectorXd d = dmu_coefficients(spec, std::max(N, 0)).coeffs;
    BVWeights out;
    out.b = Weights(a.dim(), 0, a.count());
    for (int k = 0; k <= N; ++k)
        for (int m = k; m <= N; ++m) out.b.col(k) += d(m - k) * a.at(m);
    out.v = Weights(a.dim(), -n, n);
    for (int k = -n; k <= -1; ++k)
        for (int l = 0; l <= std::min(N, k + n); ++l) out.v.col(k) += e(l - k) * out.b.at(l);
    return out;
}

CoefficientSolve solve_c(const BlockOperator& P, const Weights& b, const BlockOperator& T_op, const Weights& a_mu,
                         double rcond_floor) {
    const int rows = static_cast<int>(P.dense.rows());
    CVector rhs = CVector::Zero(rows);
    const CVector bs = b.stacked();
    for (int i = 0; i < std::min<int>(rows, static_cast<int>(bs.size())); ++i) rhs(i) = bs(i);
    if (T_op.dense.size() > 0) rhs -= T_op.apply(a_mu).stacked().head(rows);
    Eigen::PartialPivLU<CMatrix> lu(P.dense);
    CoefficientSolve out;
    out.rcond = lu.rcond();
    if (!(out.rcond > rcond_floor)) throw NumericError("operator P is ill-conditioned (rcond " + std::to_string(out.rcond) + ")");
    CVector x = lu.solve(rhs);
    x += lu.solve(rhs - P.dense * x);
    out.residual = (rhs - P.dense * x).norm() / std::max(rhs.norm(), 1e-300);
    out.c = Weights::from_stacked(x, P.T, 0);
    return out;
}

BlockOperator factorized_P(const Factorization& psi, int N) {
    const int T = psi.dim();
    const int K = psi.length() - 1;
    BlockOperator op(T, N + 1, N + 1, "P");
    for (int j = 0; j <= N; ++j)
        for (int k = 0; k <= N; ++k) {
            CMatrix acc = CMatrix::Zero(T, T);
            for (int l = std::max(j, k); l <= std::min(j, k) + K; ++l)
                acc += psi.at(l - j).transpose() * psi.at(l - k).conjugate();
            op.block(j, k) = acc;
        }
    return op;
}

BlockOperator factorized_P_inverse(const Factorization& theta, int N) {
    const int T = theta.dim();
    BlockOperator op(T, N + 1, N + 1, "P inverse");
    for (int j = 0; j <= N; ++j)
        for (int k = 0; k <= N; ++k) {
            CMatrix acc = CMatrix::Zero(T, T);
            for (int l = 0; l <= std::min(j, k); ++l) acc += theta.at(j - l).conjugate() * theta.at(k - l).transpose();
            op.block(j, k) = acc;
        }
    return op;
}

MatrixLags covariance_from_factor(const Factorization& phi) {
    const int K = phi.length() - 1;
    MatrixLags g;
    g.first = -K;
    for (int k = -K; k <= K; ++k) {
        CMatrix acc = CMatrix::Zero(phi.dim(), phi.dim());
        for (int m = 0; m <= K; ++m) acc += phi.at(m) * phi.at(m + k).adjoint();
        g.values.push_back(acc);
    }
    return g;
}

BlockOperator build_Z(const Factorization& psi, const MatrixLags& g_coeffs, int N, int cols) {
    if (cols < 0) cols = N + 1;
    const int T = psi.dim();
    const int K = psi.length() - 1;
    BlockOperator op(T, N + 1, cols, "Z");
    for (int k = 0; k <= N; ++k)
        for (int j = 0; j < cols; ++j) {
            CMatrix acc = CMatrix::Zero(T, T);
            // only l with l - k inside the support of g contribute
            const int lo = std::max(j, k + g_coeffs.first), hi = std::min(j + K, k + g_coeffs.last());
            for (int l = lo; l <= hi; ++l) acc += psi.at(l - j).conjugate() * g_coeffs.at(l - k).conjugate();
            op.block(k, j) = acc;
        }
    return op;
}

BlockOperator psi_transpose_times(const Factorization& psi, const BlockOperator& Z, int out_rows) {
    const int T = psi.dim();
    const int K = psi.length() - 1;
    BlockOperator op(T, out_rows, Z.block_cols(), "T");
    for (int j = 0; j < out_rows; ++j)
        for (int l = j; l <= std::min(j + K, Z.block_rows() - 1); ++l) {
            const CMatrix pt = psi.at(l - j).transpose();
            for (int m = 0; m < Z.block_cols(); ++m) op.block(j, m) += pt * Z.block(l, m);
        }
    return op;
}

}  // namespace gmi
