#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gmi {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

template <typename Scalar>
using ComplexMatrixT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// Sequence of square complex matrices, indexed by lag or by frequency.
template <typename Scalar>
using MatrixSeqT = std::vector<ComplexMatrixT<Scalar>>;
using MatrixSeq = MatrixSeqT<double>;

constexpr double kPi = 3.14159265358979323846;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// T-dimensional complex weights w(k), k = first .. first+count-1, stored column-wise.
struct Weights {
    int first = 0;
    CMatrix values;  // T x count

    Weights() = default;
    Weights(int dim, int first_index, int count)
        : first(first_index), values(CMatrix::Zero(dim, count)) {}

    int dim() const { return static_cast<int>(values.rows()); }
    int count() const { return static_cast<int>(values.cols()); }
    int last() const { return first + count() - 1; }
    bool contains(int k) const { return k >= first && k <= last(); }

    CVector at(int k) const {
        if (!contains(k)) return CVector::Zero(dim());
        return values.col(k - first);
    }
    auto col(int k) { return values.col(k - first); }

    /// Stacked (w(first); w(first+1); ...) view as one long vector.
    CVector stacked() const {
        return Eigen::Map<const CVector>(values.data(), values.size());
    }
    static Weights from_stacked(const CVector& v, int dim, int first_index) {
        Weights w(dim, first_index, static_cast<int>(v.size()) / dim);
        w.values = Eigen::Map<const CMatrix>(v.data(), dim, w.count());
        return w;
    }
};

/// Matrix coefficients m(k), k = first .. first+size-1; zero elsewhere.
struct MatrixLags {
    int first = 0;
    MatrixSeq values;

    int dim() const { return values.empty() ? 0 : static_cast<int>(values.front().rows()); }
    int last() const { return first + static_cast<int>(values.size()) - 1; }
    CMatrix at(int k) const {
        if (k < first || k > last()) return CMatrix::Zero(dim(), dim());
        return values[k - first];
    }
};

/// Sum over k of x(k)^T conj(y(k)).
inline Complex bracket(const Weights& x, const Weights& y) {
    Complex s = 0.0;
    const int lo = std::max(x.first, y.first);
    const int hi = std::min(x.last(), y.last());
    for (int k = lo; k <= hi; ++k)
        s += y.values.col(k - y.first).dot(x.values.col(k - x.first));
    return s;
}

}  // namespace gmi
