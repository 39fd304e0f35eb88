#include "mpcanet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mpcanet/error.hpp"

namespace mpcanet {

std::size_t shape_volume(std::span<const std::size_t> dims) {
    std::size_t v = 1;
    for (auto d : dims) v *= d;
    return v;
}

std::string shape_to_string(std::span<const std::size_t> dims) {
    std::ostringstream os;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) os << 'x';
        os << dims[i];
    }
    return os.str();
}

// ---------------------------------------------------------------- DenseMatrix

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw DimensionError("matrix data length " + std::to_string(data_.size()) + " does not match " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("ragged matrix initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " * " +
                             std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto crow = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw DimensionError("matmul_tn: row counts differ");
    DenseMatrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto arow = a.row(k);
        auto brow = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            auto crow = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aki * brow[j];
        }
    }
    return c;
}

DenseMatrix gram_rows(const DenseMatrix& a) {
    const std::size_t n = a.rows();
    DenseMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        auto ri = a.row(i);
        for (std::size_t j = i; j < n; ++j) {
            auto rj = a.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += ri[k] * rj[k];
            g(i, j) = s;
            g(j, i) = s;
        }
    }
    return g;
}

double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_abs_difference: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

// ---------------------------------------------------------------- DenseTensor

namespace {

void validate_dims(const Shape& dims) {
    if (dims.empty()) throw DimensionError("tensor order must be at least 1");
    for (auto d : dims)
        if (d == 0) throw DimensionError("tensor extents must be positive, got " + shape_to_string(dims));
}

void require_same_dims(const DenseTensor& a, const DenseTensor& b, const char* op) {
    if (a.dims() != b.dims()) {
        throw DimensionError(std::string(op) + ": dims " + shape_to_string(a.dims()) + " vs " +
                             shape_to_string(b.dims()));
    }
}

void require_mode(const DenseTensor& t, std::size_t mode, const char* op) {
    if (mode >= t.order()) {
        throw DimensionError(std::string(op) + ": mode " + std::to_string(mode) + " out of range for order " +
                             std::to_string(t.order()));
    }
}

}  // namespace

DenseTensor::DenseTensor() : dims_{1}, data_(1, 0.0) {}

DenseTensor::DenseTensor(Shape dims) : dims_(std::move(dims)) {
    validate_dims(dims_);
    data_.assign(shape_volume(dims_), 0.0);
}

DenseTensor::DenseTensor(Shape dims, std::vector<double> data) : dims_(std::move(dims)), data_(std::move(data)) {
    validate_dims(dims_);
    if (data_.size() != shape_volume(dims_)) {
        throw DimensionError("tensor data length " + std::to_string(data_.size()) + " does not match dims " +
                             shape_to_string(dims_));
    }
}

DenseTensor DenseTensor::filled(Shape dims, double value) {
    DenseTensor t(std::move(dims));
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
}

std::vector<std::size_t> DenseTensor::strides() const {
    std::vector<std::size_t> s(dims_.size());
    std::size_t acc = 1;
    for (std::size_t n = dims_.size(); n-- > 0;) {
        s[n] = acc;
        acc *= dims_[n];
    }
    return s;
}

std::size_t DenseTensor::linear_index(std::span<const std::size_t> index) const {
    if (index.size() != dims_.size()) throw DimensionError("index order does not match tensor order");
    std::size_t lin = 0;
    for (std::size_t n = 0; n < dims_.size(); ++n) {
        if (index[n] >= dims_[n]) throw DimensionError("tensor index out of range");
        lin = lin * dims_[n] + index[n];
    }
    return lin;
}

double& DenseTensor::at(std::span<const std::size_t> index) { return data_[linear_index(index)]; }
double DenseTensor::at(std::span<const std::size_t> index) const { return data_[linear_index(index)]; }

DenseTensor DenseTensor::flattened() const { return DenseTensor({data_.size()}, data_); }

DenseTensor DenseTensor::reshaped(Shape dims) const { return DenseTensor(std::move(dims), data_); }

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
    require_same_dims(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other) {
    require_same_dims(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

DenseTensor& DenseTensor::operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
}

DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }

// ---------------------------------------------------------------- algebra

// A tensor seen through one mode is a 3-D block (outer, I_mode, inner), where
// outer is the product of preceding extents and inner of the following ones.
namespace {

struct ModeSplit {
    std::size_t outer;
    std::size_t extent;
    std::size_t inner;
};

ModeSplit split_at(const Shape& dims, std::size_t mode) {
    ModeSplit s{1, dims[mode], 1};
    for (std::size_t k = 0; k < mode; ++k) s.outer *= dims[k];
    for (std::size_t k = mode + 1; k < dims.size(); ++k) s.inner *= dims[k];
    return s;
}

}  // namespace

DenseMatrix unfold(const DenseTensor& t, std::size_t mode) {
    require_mode(t, mode, "unfold");
    const auto s = split_at(t.dims(), mode);
    DenseMatrix m(s.extent, s.outer * s.inner);
    const auto src = t.data();
    for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t i = 0; i < s.extent; ++i)
            for (std::size_t r = 0; r < s.inner; ++r) m(i, o * s.inner + r) = src[(o * s.extent + i) * s.inner + r];
    return m;
}

DenseTensor fold(const DenseMatrix& m, std::size_t mode, const Shape& dims) {
    DenseTensor t(dims);
    require_mode(t, mode, "fold");
    const auto s = split_at(dims, mode);
    if (m.rows() != s.extent || m.cols() != s.outer * s.inner) throw DimensionError("fold: matrix shape mismatch");
    auto dst = t.data();
    for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t i = 0; i < s.extent; ++i)
            for (std::size_t r = 0; r < s.inner; ++r) dst[(o * s.extent + i) * s.inner + r] = m(i, o * s.inner + r);
    return t;
}

DenseTensor mode_multiply(const DenseTensor& t, const DenseMatrix& u, std::size_t mode) {
    require_mode(t, mode, "mode_multiply");
    if (u.cols() != t.extent(mode)) {
        throw DimensionError("mode_multiply: factor has " + std::to_string(u.cols()) + " columns, mode " +
                             std::to_string(mode) + " has extent " + std::to_string(t.extent(mode)));
    }
    const auto s = split_at(t.dims(), mode);
    Shape out_dims = t.dims();
    out_dims[mode] = u.rows();
    DenseTensor out(out_dims);
    const auto src = t.data();
    auto dst = out.data();
    const std::size_t J = u.rows();
    for (std::size_t o = 0; o < s.outer; ++o) {
        const double* in_block = src.data() + o * s.extent * s.inner;
        double* out_block = dst.data() + o * J * s.inner;
        for (std::size_t j = 0; j < J; ++j) {
            double* out_row = out_block + j * s.inner;
            for (std::size_t i = 0; i < s.extent; ++i) {
                const double w = u(j, i);
                if (w == 0.0) continue;
                const double* in_row = in_block + i * s.inner;
                for (std::size_t r = 0; r < s.inner; ++r) out_row[r] += w * in_row[r];
            }
        }
    }
    return out;
}

DenseTensor mode_multiply_transposed(const DenseTensor& t, const DenseMatrix& v, std::size_t mode) {
    require_mode(t, mode, "mode_multiply_transposed");
    if (v.rows() != t.extent(mode)) {
        throw DimensionError("mode_multiply_transposed: factor has " + std::to_string(v.rows()) + " rows, mode " +
                             std::to_string(mode) + " has extent " + std::to_string(t.extent(mode)));
    }
    const auto s = split_at(t.dims(), mode);
    Shape out_dims = t.dims();
    out_dims[mode] = v.cols();
    DenseTensor out(out_dims);
    const auto src = t.data();
    auto dst = out.data();
    const std::size_t P = v.cols();
    for (std::size_t o = 0; o < s.outer; ++o) {
        const double* in_block = src.data() + o * s.extent * s.inner;
        double* out_block = dst.data() + o * P * s.inner;
        for (std::size_t i = 0; i < s.extent; ++i) {
            const double* in_row = in_block + i * s.inner;
            const auto vrow = v.row(i);
            for (std::size_t p = 0; p < P; ++p) {
                const double w = vrow[p];
                if (w == 0.0) continue;
                double* out_row = out_block + p * s.inner;
                for (std::size_t r = 0; r < s.inner; ++r) out_row[r] += w * in_row[r];
            }
        }
    }
    return out;
}

DenseTensor multi_mode_multiply(const DenseTensor& t, std::span<const ModeFactor> factors) {
    std::vector<bool> seen(t.order(), false);
    for (const auto& f : factors) {
        require_mode(t, f.mode, "multi_mode_multiply");
        if (seen[f.mode]) throw DimensionError("multi_mode_multiply: duplicate mode " + std::to_string(f.mode));
        seen[f.mode] = true;
    }
    DenseTensor out = t;
    for (const auto& f : factors) out = mode_multiply(out, f.matrix, f.mode);
    return out;
}

DenseMatrix kron_chain(std::span<const DenseMatrix> ms) {
    if (ms.empty()) throw DimensionError("kron_chain: empty factor list");
    DenseMatrix acc = ms.front();
    for (std::size_t k = 1; k < ms.size(); ++k) {
        const auto& b = ms[k];
        DenseMatrix next(acc.rows() * b.rows(), acc.cols() * b.cols());
        for (std::size_t i = 0; i < acc.rows(); ++i)
            for (std::size_t j = 0; j < acc.cols(); ++j) {
                const double a = acc(i, j);
                for (std::size_t p = 0; p < b.rows(); ++p)
                    for (std::size_t q = 0; q < b.cols(); ++q) next(i * b.rows() + p, j * b.cols() + q) = a * b(p, q);
            }
        acc = std::move(next);
    }
    return acc;
}

double frobenius_sq_distance(const DenseTensor& a, const DenseTensor& b) {
    require_same_dims(a, b, "frobenius_sq_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double frobenius_sq_norm(const DenseTensor& t) {
    double s = 0.0;
    for (auto v : t.data()) s += v * v;
    return s;
}

}  // namespace mpcanet
