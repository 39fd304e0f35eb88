#include "mpcanet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpcanet/error.hpp"

namespace mpcanet {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
}

double frobenius(const DenseMatrix& a) {
    double s = 0.0;
    for (auto v : a.data()) s += v * v;
    return std::sqrt(s);
}

}  // namespace

void canonicalize_column_signs(DenseMatrix& m) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
        std::size_t best = 0;
        double best_mag = -1.0;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const double mag = std::abs(m(r, c));
            if (mag > best_mag) {
                best_mag = mag;
                best = r;
            }
        }
        if (m.rows() && m(best, c) < 0.0)
            for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = -m(r, c);
    }
}

SymmetricEigen symmetric_eigen(const DenseMatrix& input) {
    if (input.rows() != input.cols()) throw DimensionError("symmetric_eigen: matrix is not square");
    const std::size_t n = input.rows();

    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            a(i, j) = input(i, j);
            a(j, i) = input(i, j);
        }
    for (auto v : a.data())
        if (!std::isfinite(v)) throw NumericError("symmetric_eigen: non-finite matrix entry");

    DenseMatrix v = DenseMatrix::identity(n);
    const double scale = frobenius(a);
    const double target = scale * 1e-15;

    for (int sweep = 0; sweep < kMaxSweeps && scale > 0.0; ++sweep) {
        if (off_diagonal_norm(a) <= target) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                // Skip rotations that cannot change the diagonal at working precision.
                if (sweep > 3 && std::abs(apq) * 1e18 < std::abs(app) && std::abs(apq) * 1e18 < std::abs(aqq)) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (off_diagonal_norm(a) > std::max(target, scale * 1e-12))
        throw NumericError("symmetric_eigen: Jacobi sweeps did not converge");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = DenseMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    canonicalize_column_signs(out.vectors);
    return out;
}

DenseMatrix cholesky(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("cholesky: matrix is not square");
    const std::size_t n = a.rows();
    DenseMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d))
            throw NumericError("cholesky: matrix is not positive definite (pivot " + std::to_string(j) + ")");
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

DenseMatrix forward_substitute(const DenseMatrix& lower, const DenseMatrix& b) {
    const std::size_t n = lower.rows();
    if (b.rows() != n) throw DimensionError("forward_substitute: shape mismatch");
    DenseMatrix y = b;
    for (std::size_t c = 0; c < b.cols(); ++c)
        for (std::size_t i = 0; i < n; ++i) {
            double s = y(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * y(k, c);
            y(i, c) = s / lower(i, i);
        }
    return y;
}

DenseMatrix back_substitute_transposed(const DenseMatrix& lower, const DenseMatrix& b) {
    const std::size_t n = lower.rows();
    if (b.rows() != n) throw DimensionError("back_substitute_transposed: shape mismatch");
    DenseMatrix x = b;
    for (std::size_t c = 0; c < b.cols(); ++c)
        for (std::size_t i = n; i-- > 0;) {
            double s = x(i, c);
            for (std::size_t k = i + 1; k < n; ++k) s -= lower(k, i) * x(k, c);
            x(i, c) = s / lower(i, i);
        }
    return x;
}

DenseMatrix cholesky_solve(const DenseMatrix& lower, const DenseMatrix& b) {
    return back_substitute_transposed(lower, forward_substitute(lower, b));
}

double orthonormality_defect(const DenseMatrix& m) {
    const auto g = matmul_tn(m, m);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return worst;
}

double max_principal_angle(const DenseMatrix& a, const DenseMatrix& b) {
    // Sine-based form keeps precision for tiny angles: sin^2 of the largest
    // angle is the largest eigenvalue of B^T (I - A A^T) B.
    if (a.rows() != b.rows()) throw DimensionError("max_principal_angle: ambient dimensions differ");
    const auto atb = matmul_tn(a, b);
    DenseMatrix resid = b;
    const auto proj = matmul(a, atb);
    for (std::size_t i = 0; i < resid.size(); ++i) resid.data()[i] -= proj.data()[i];
    const auto e = symmetric_eigen(matmul_tn(resid, resid));
    const double s2 = e.values.empty() ? 0.0 : std::max(0.0, e.values.front());
    return std::asin(std::min(1.0, std::sqrt(s2)));
}

}  // namespace mpcanet
