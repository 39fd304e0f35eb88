#pragma once

// Test-side reference implementations. These use plain index loops and
// std::mt19937_64 so they share no code paths with the library.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mpcanet/tensor.hpp"

namespace oracle {

using mpcanet::DenseMatrix;
using mpcanet::DenseTensor;
using mpcanet::Shape;

inline DenseTensor random_tensor(const Shape& dims, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    DenseTensor t(dims);
    for (auto& v : t.data()) v = g(rng);
    return t;
}

inline DenseMatrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    DenseMatrix m(r, c);
    for (auto& v : m.data()) v = g(rng);
    return m;
}

inline Shape random_dims(std::size_t max_order, std::size_t max_extent, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> order(1, max_order), extent(1, max_extent);
    Shape d(order(rng));
    for (auto& e : d) e = extent(rng);
    return d;
}

/// Calls f on every multi-index of dims, last index fastest.
inline void for_each_index(const Shape& dims, const std::function<void(const std::vector<std::size_t>&)>& f) {
    std::size_t total = 1;
    for (auto d : dims) total *= d;
    std::vector<std::size_t> idx(dims.size(), 0);
    for (std::size_t k = 0; k < total; ++k) {
        f(idx);
        for (std::size_t n = dims.size(); n-- > 0;) {
            if (++idx[n] < dims[n]) break;
            idx[n] = 0;
        }
    }
}

inline std::size_t offset(const Shape& dims, const std::vector<std::size_t>& idx) {
    std::size_t off = 0;
    for (std::size_t n = 0; n < dims.size(); ++n) off = off * dims[n] + idx[n];
    return off;
}

/// Mode-n unfolding by brute force: column index is the row-major offset of
/// the remaining indices in ascending mode order.
inline DenseMatrix unfold(const DenseTensor& t, std::size_t mode) {
    const auto& dims = t.dims();
    Shape rest;
    for (std::size_t n = 0; n < dims.size(); ++n)
        if (n != mode) rest.push_back(dims[n]);
    std::size_t cols = 1;
    for (auto d : rest) cols *= d;
    DenseMatrix m(dims[mode], cols);
    for_each_index(dims, [&](const std::vector<std::size_t>& idx) {
        std::vector<std::size_t> r;
        for (std::size_t n = 0; n < dims.size(); ++n)
            if (n != mode) r.push_back(idx[n]);
        m(idx[mode], offset(rest, r)) = t[offset(dims, idx)];
    });
    return m;
}

/// Direct summation of the n-mode product: Y(.., j, ..) = sum_i X(.., i, ..) U(j, i).
inline DenseTensor mode_product(const DenseTensor& t, const DenseMatrix& u, std::size_t mode) {
    Shape out_dims = t.dims();
    out_dims[mode] = u.rows();
    DenseTensor y(out_dims);
    for_each_index(out_dims, [&](const std::vector<std::size_t>& idx) {
        double s = 0.0;
        auto src = idx;
        for (std::size_t i = 0; i < t.extent(mode); ++i) {
            src[mode] = i;
            s += t[offset(t.dims(), src)] * u(idx[mode], i);
        }
        y[offset(out_dims, idx)] = s;
    });
    return y;
}

inline DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t p = 0; p < b.rows(); ++p)
                for (std::size_t q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
    return k;
}

inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

inline double max_abs(const DenseMatrix& a, const DenseMatrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

inline double max_abs(const DenseTensor& a, const DenseTensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Symmetric eigenvectors by power iteration with deflation; slow but
/// independent of the library's Jacobi solver. Columns sorted by eigenvalue.
inline std::pair<std::vector<double>, DenseMatrix> power_eigen(DenseMatrix a, std::size_t k) {
    const std::size_t n = a.rows();
    std::vector<double> values;
    DenseMatrix vecs(n, k);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> g;
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<double> v(n);
        for (auto& x : v) x = g(rng);
        double lambda = 0.0;
        for (int it = 0; it < 20000; ++it) {
            std::vector<double> w(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) w[i] += a(i, j) * v[j];
            double norm = 0.0;
            for (auto x : w) norm += x * x;
            norm = std::sqrt(norm);
            if (norm == 0.0) break;
            double diff = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                w[i] /= norm;
                diff = std::max(diff, std::abs(std::abs(w[i]) - std::abs(v[i])));
            }
            v = w;
            lambda = norm;
            if (diff < 1e-15 && it > 50) break;
        }
        values.push_back(lambda);
        for (std::size_t i = 0; i < n; ++i) vecs(i, c) = v[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) -= lambda * v[i] * v[j];
    }
    return {values, vecs};
}

/// Sine of the largest principal angle between the column spaces of two
/// matrices with orthonormal columns, via the projector difference.
inline double subspace_distance(const DenseMatrix& a, const DenseMatrix& b) {
    const auto pa = multiply(a, transpose(a));
    const auto pb = multiply(b, transpose(b));
    // ||P_a - P_b||_2 equals sin of the largest principal angle; bound with
    // the Frobenius norm scaled for equal dimensions.
    double f = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) f += std::pow(pa.data()[i] - pb.data()[i], 2);
    return std::sqrt(f / 2.0);
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("mpcanet_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

}  // namespace oracle
