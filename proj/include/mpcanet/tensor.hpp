#pragma once

// Dense N-order tensors and the multilinear algebra built on them.
//
// Storage is row-major: the last mode varies fastest. Modes are 0-based in
// this API. Unfolding along mode n yields an I_n x (prod of other extents)
// matrix whose columns enumerate the remaining modes in increasing mode
// order, again row-major (the lowest remaining mode varies slowest). With
// that convention, for Y = X x_0 U_0 x_1 U_1 ... x_{N-1} U_{N-1}:
//
//     unfold(Y, n) == U_n * unfold(X, n) * kron_chain(U_k for k != n, ascending)^T

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mpcanet {

using Shape = std::vector<std::size_t>;

std::size_t shape_volume(std::span<const std::size_t> dims);
std::string shape_to_string(std::span<const std::size_t> dims);

class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    DenseMatrix transposed() const;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// a^T * b without materializing the transpose.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
/// a * a^T, symmetric.
DenseMatrix gram_rows(const DenseMatrix& a);
double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b);

class DenseTensor {
public:
    /// Order-1 tensor with a single zero entry.
    DenseTensor();
    explicit DenseTensor(Shape dims);
    DenseTensor(Shape dims, std::vector<double> data);

    static DenseTensor filled(Shape dims, double value);

    const Shape& dims() const noexcept { return dims_; }
    std::size_t order() const noexcept { return dims_.size(); }
    std::size_t extent(std::size_t mode) const { return dims_.at(mode); }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    double& operator[](std::size_t linear) { return data_[linear]; }
    double operator[](std::size_t linear) const { return data_[linear]; }

    double& at(std::span<const std::size_t> index);
    double at(std::span<const std::size_t> index) const;
    double& at(std::initializer_list<std::size_t> index) { return at(std::span(index.begin(), index.size())); }
    double at(std::initializer_list<std::size_t> index) const { return at(std::span(index.begin(), index.size())); }

    std::size_t linear_index(std::span<const std::size_t> index) const;
    /// Row-major strides, in elements.
    std::vector<std::size_t> strides() const;

    /// Same data viewed as an order-1 tensor.
    DenseTensor flattened() const;
    DenseTensor reshaped(Shape dims) const;

    DenseTensor& operator+=(const DenseTensor& other);
    DenseTensor& operator-=(const DenseTensor& other);
    DenseTensor& operator*=(double s);

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    Shape dims_;
    std::vector<double> data_;
};

DenseTensor operator+(DenseTensor a, const DenseTensor& b);
DenseTensor operator-(DenseTensor a, const DenseTensor& b);

/// Mode-n matricization; see the file comment for the column convention.
DenseMatrix unfold(const DenseTensor& t, std::size_t mode);
/// Inverse of unfold for the given target dims.
DenseTensor fold(const DenseMatrix& m, std::size_t mode, const Shape& dims);

/// n-mode product: result(.., j, ..) = sum_i t(.., i, ..) * u(j, i).
DenseTensor mode_multiply(const DenseTensor& t, const DenseMatrix& u, std::size_t mode);

/// t x_mode v^T for a v with I_mode rows, without forming the transpose.
DenseTensor mode_multiply_transposed(const DenseTensor& t, const DenseMatrix& v, std::size_t mode);

struct ModeFactor {
    std::size_t mode;
    DenseMatrix matrix;
};

/// Sequential n-mode products over distinct modes, applied in list order.
DenseTensor multi_mode_multiply(const DenseTensor& t, std::span<const ModeFactor> factors);

/// Left-to-right Kronecker product.
DenseMatrix kron_chain(std::span<const DenseMatrix> ms);

double frobenius_sq_distance(const DenseTensor& a, const DenseTensor& b);
double frobenius_sq_norm(const DenseTensor& t);

}  // namespace mpcanet
