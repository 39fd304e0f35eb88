#include <doctest.h>

#include <algorithm>

#include "mpcanet/error.hpp"
#include "mpcanet/linalg.hpp"
#include "mpcanet/mpca.hpp"
#include "support.hpp"

using namespace mpcanet;

namespace {

DenseMatrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
    auto a = oracle::random_matrix(n, n, rng);
    DenseMatrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = a(i, j) + a(j, i);
    return s;
}

std::vector<DenseTensor> random_samples(std::size_t m, const Shape& dims, std::mt19937_64& rng) {
    std::vector<DenseTensor> out;
    for (std::size_t i = 0; i < m; ++i) out.push_back(oracle::random_tensor(dims, rng));
    return out;
}

}  // namespace

TEST_CASE("symmetric eigen reconstructs the matrix") {
    std::mt19937_64 rng(10);
    for (std::size_t n : {1u, 2u, 5u, 12u, 30u}) {
        const auto a = random_symmetric(n, rng);
        const auto e = symmetric_eigen(a);
        CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
        CHECK(orthonormality_defect(e.vectors) < 1e-12);
        DenseMatrix d(n, n);
        for (std::size_t i = 0; i < n; ++i) d(i, i) = e.values[i];
        const auto back = oracle::multiply(oracle::multiply(e.vectors, d), oracle::transpose(e.vectors));
        CHECK(oracle::max_abs(back, a) < 1e-10);
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t arg = 0;
            for (std::size_t r = 1; r < n; ++r)
                if (std::abs(e.vectors(r, c)) > std::abs(e.vectors(arg, c))) arg = r;
            CHECK(e.vectors(arg, c) > 0.0);
        }
    }
}

TEST_CASE("symmetric eigen matches power iteration") {
    std::mt19937_64 rng(11);
    const auto b = oracle::random_matrix(6, 6, rng);
    const auto a = oracle::multiply(b, oracle::transpose(b));
    const auto e = symmetric_eigen(a);
    const auto [vals, vecs] = oracle::power_eigen(a, 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(e.values[k] == doctest::Approx(vals[k]).epsilon(1e-9));
        double dot = 0.0;
        for (std::size_t r = 0; r < 6; ++r) dot += e.vectors(r, k) * vecs(r, k);
        CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("cholesky solve") {
    std::mt19937_64 rng(12);
    const auto b = oracle::random_matrix(5, 5, rng);
    auto a = oracle::multiply(b, oracle::transpose(b));
    for (std::size_t i = 0; i < 5; ++i) a(i, i) += 1.0;
    const auto rhs = oracle::random_matrix(5, 2, rng);
    const auto x = cholesky_solve(cholesky(a), rhs);
    CHECK(oracle::max_abs(oracle::multiply(a, x), rhs) < 1e-10);
    CHECK_THROWS_AS(cholesky(DenseMatrix{{1, 2}, {2, 1}}), NumericError);
}

TEST_CASE("select_mode_dims examples") {
    const std::vector<double> a{8, 1, 1};
    CHECK(select_mode_dims(a, 0.97) == 3);
    const std::vector<double> b{9, 0.5, 0.5};
    CHECK(select_mode_dims(b, 0.9) == 1);
    const std::vector<double> c{3, 2, 1};
    CHECK(select_mode_dims(c, 1.0) == 3);
    const std::vector<double> trailing{3, 2, 0, 0};
    CHECK(select_mode_dims(trailing, 1.0) == 2);
    const std::vector<double> zero{0, 0, 0};
    CHECK(select_mode_dims(zero, 0.97) == 1);
    CHECK(select_mode_dims(a, 0.5, 2) == 2);
    CHECK(select_mode_dims(a, 0.5, 9) == 3);
    CHECK_THROWS(EnergyPolicy{0.0, {}}.validate());
    CHECK_THROWS(EnergyPolicy{1.5, {}}.validate());
}

TEST_CASE("identical samples give zero scatter") {
    DenseTensor s({3, 2}, {1, 2, 3, 4, 5, 6});
    const std::vector<DenseTensor> samples{s, s, s};
    MpcaFitTrace trace;
    const auto m = fit_mpca(samples, {}, &trace);
    CHECK(m.captured_scatter == 0.0);
    CHECK(m.mean == s);
    const auto core = project(m, s);
    for (auto v : core.data()) CHECK(v == 0.0);
    CHECK(trace.converged);
}

TEST_CASE("fit_mpca rejects bad inputs") {
    std::mt19937_64 rng(13);
    const std::vector<DenseTensor> one{oracle::random_tensor({2, 2}, rng)};
    CHECK_THROWS_AS(fit_mpca(one), DataError);
    const std::vector<DenseTensor> mixed{oracle::random_tensor({2, 2}, rng), oracle::random_tensor({2, 3}, rng)};
    CHECK_THROWS_AS(fit_mpca(mixed), DimensionError);
}

TEST_CASE("order-1 fit matches covariance PCA") {
    std::mt19937_64 rng(14);
    const auto samples = random_samples(50, {12}, rng);
    MpcaFitOptions opt;
    opt.energy.q = 0.8;
    const auto m = fit_mpca(samples, opt);
    const std::size_t p = m.output_dims[0];

    DenseMatrix cov(12, 12);
    std::vector<double> mean(12, 0.0);
    for (const auto& s : samples)
        for (std::size_t i = 0; i < 12; ++i) mean[i] += s[i] / 50.0;
    for (const auto& s : samples)
        for (std::size_t i = 0; i < 12; ++i)
            for (std::size_t j = 0; j < 12; ++j) cov(i, j) += (s[i] - mean[i]) * (s[j] - mean[j]);
    const auto [vals, vecs] = oracle::power_eigen(cov, p);
    DenseMatrix top(12, p);
    for (std::size_t r = 0; r < 12; ++r)
        for (std::size_t c = 0; c < p; ++c) top(r, c) = vecs(r, c);
    CHECK(max_principal_angle(m.factors[0], top) < 1e-8);
    CHECK(oracle::subspace_distance(m.factors[0], top) < 1e-8);
}

TEST_CASE("mode scatter matches the all-loops oracle") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 10; ++trial) {
        const Shape dims{1 + rng() % 4, 1 + rng() % 4};
        auto samples = random_samples(6, dims, rng);
        std::vector<DenseMatrix> factors;
        for (auto d : dims) {
            auto e = symmetric_eigen(random_symmetric(d, rng));
            factors.push_back(e.vectors);
        }
        for (std::size_t n = 0; n < 2; ++n) {
            const auto phi = mode_scatter(samples, factors, n);
            DenseMatrix ref(dims[n], dims[n]);
            for (const auto& x : samples) {
                auto y = x;
                const std::size_t other = 1 - n;
                y = oracle::mode_product(y, oracle::transpose(factors[other]), other);
                const auto u = oracle::unfold(y, n);
                const auto g = oracle::multiply(u, oracle::transpose(u));
                for (std::size_t i = 0; i < g.size(); ++i) ref.data()[i] += g.data()[i];
            }
            CHECK(oracle::max_abs(phi, ref) < 1e-10);
        }
    }
}

TEST_CASE("full projection is invertible") {
    std::mt19937_64 rng(16);
    const auto samples = random_samples(8, {3, 4, 2}, rng);
    MpcaFitOptions opt;
    opt.energy.q = 1.0;
    const auto m = fit_mpca(samples, opt);
    CHECK(m.output_dims == Shape{3, 4, 2});
    for (const auto& s : samples) CHECK(oracle::max_abs(reconstruct(m, project(m, s)), s) < 1e-10);
    CHECK(oracle::max_abs(project(m, m.mean), DenseTensor(m.output_dims)) == 0.0);
}

TEST_CASE("project matches a naive mode-by-mode oracle") {
    std::mt19937_64 rng(17);
    const auto samples = random_samples(10, {4, 3, 3}, rng);
    MpcaFitOptions opt;
    opt.energy.q = 0.8;
    const auto m = fit_mpca(samples, opt);
    const auto t = oracle::random_tensor({4, 3, 3}, rng);
    auto ref = t - m.mean;
    for (std::size_t n = 0; n < 3; ++n) ref = oracle::mode_product(ref, oracle::transpose(m.factors[n]), n);
    CHECK(oracle::max_abs(project(m, t), ref) < 1e-12);
    CHECK_THROWS_AS(project(m, DenseTensor({4, 3})), DimensionError);
}

TEST_CASE("model invariants hold on random fits") {
    std::mt19937_64 rng(18);
    for (int trial = 0; trial < 10; ++trial) {
        const Shape dims{2 + rng() % 4, 2 + rng() % 3, 1 + rng() % 3};
        const auto samples = random_samples(5 + rng() % 5, dims, rng);
        MpcaFitTrace trace;
        auto m = fit_mpca(samples, {}, &trace);
        for (std::size_t n = 0; n < dims.size(); ++n) {
            CHECK(orthonormality_defect(m.factors[n]) < 1e-10);
            CHECK(m.output_dims[n] >= 1);
            CHECK(m.output_dims[n] <= dims[n]);
            CHECK(std::is_sorted(m.mode_eigenvalues[n].rbegin(), m.mode_eigenvalues[n].rend()));
            CHECK(m.mode_eigenvalues[n].back() >= -1e-12);
        }
        for (std::size_t k = 1; k < trace.scatter.size(); ++k) CHECK(trace.scatter[k] >= trace.scatter[k - 1] - 1e-9);
        CHECK(m.captured_scatter == trace.scatter.back());
        auto order = compute_variance_order(m, samples);
        std::sort(order.begin(), order.end());
        for (std::size_t k = 0; k < order.size(); ++k) CHECK(order[k] == k);
    }
}

TEST_CASE("minimum core size grows dims greedily") {
    std::mt19937_64 rng(19);
    const auto samples = random_samples(6, {3, 3, 2}, rng);
    MpcaFitOptions opt;
    opt.energy.q = 0.1;
    opt.min_core_size = 8;
    const auto m = fit_mpca(samples, opt);
    CHECK(m.core_size() >= 8);
    opt.min_core_size = 19;
    CHECK_THROWS_AS(fit_mpca(samples, opt), ConfigError);
}

TEST_CASE("variance order and vectorization") {
    // Three core coordinates with variances 0.1, 5, 2 in natural order.
    MpcaModel m;
    m.input_dims = {3};
    m.output_dims = {3};
    m.factors = {DenseMatrix::identity(3)};
    m.mean = DenseTensor({3});
    const double a = std::sqrt(0.1), b = std::sqrt(5.0), c = std::sqrt(2.0);
    const std::vector<DenseTensor> samples{DenseTensor({3}, {a, b, c}), DenseTensor({3}, {-a, -b, -c})};
    CHECK(compute_variance_order(m, samples) == std::vector<std::size_t>{1, 2, 0});

    // Appending a duplicate of the sample set keeps the order.
    auto doubled = samples;
    doubled.insert(doubled.end(), samples.begin(), samples.end());
    CHECK(compute_variance_order(m, doubled) == std::vector<std::size_t>{1, 2, 0});

    // Equal variances fall back to ascending index.
    const std::vector<DenseTensor> flat{DenseTensor({3}), DenseTensor({3})};
    CHECK(compute_variance_order(m, flat) == std::vector<std::size_t>{0, 1, 2});

    MpcaModel q;
    q.output_dims = {2, 2};
    q.variance_order = {3, 0, 2, 1};
    const DenseTensor core({2, 2}, {1, 2, 3, 4});
    const auto v = vectorize_core(q, core);
    CHECK(v == std::vector<double>{4, 1, 3, 2});
    CHECK(unvectorize_core(q, v) == core);
    q.variance_order = {0, 1, 2, 3};
    CHECK(vectorize_core(q, core) == std::vector<double>{1, 2, 3, 4});
    q.variance_order.clear();
    CHECK_THROWS_AS(vectorize_core(q, core), DataError);
}

TEST_CASE("fits are bitwise reproducible") {
    std::mt19937_64 rng(20);
    const auto samples = random_samples(7, {4, 3, 2}, rng);
    auto a = fit_mpca(samples);
    auto b = fit_mpca(samples);
    for (std::size_t n = 0; n < 3; ++n) CHECK(a.factors[n] == b.factors[n]);
    CHECK(a.captured_scatter == b.captured_scatter);
}
