#include "mpcanet/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpcanet/error.hpp"
#include "mpcanet/linalg.hpp"

namespace mpcanet {

namespace {

std::vector<std::size_t> sorted_classes(std::span<const std::size_t> labels) {
    std::vector<std::size_t> c(labels.begin(), labels.end());
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

std::size_t class_index(const std::vector<std::size_t>& classes, std::size_t label) {
    return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), label) - classes.begin());
}

void require_rows(const DenseMatrix& features, std::span<const std::size_t> labels, const char* op) {
    if (features.rows() != labels.size()) {
        throw DimensionError(std::string(op) + ": " + std::to_string(features.rows()) + " feature rows but " +
                             std::to_string(labels.size()) + " labels");
    }
    if (features.rows() == 0) throw DataError(std::string(op) + ": no training samples");
}

std::vector<double> column_means(const DenseMatrix& x) {
    std::vector<double> mu(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto r = x.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) mu[j] += r[j];
    }
    for (auto& v : mu) v /= static_cast<double>(x.rows());
    return mu;
}

std::size_t argmax_first(std::span<const double> s) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < s.size(); ++k)
        if (s[k] > s[best]) best = k;
    return best;
}

}  // namespace

// ---------------------------------------------------------------- ridge

LinearModel fit_ridge_ovr(const DenseMatrix& features, std::span<const std::size_t> labels, double lambda) {
    require_rows(features, labels, "fit_ridge_ovr");
    if (!(lambda > 0.0)) throw ConfigError("fit_ridge_ovr: lambda must be positive");
    const auto classes = sorted_classes(labels);
    if (classes.size() < 2) throw DataError("fit_ridge_ovr: need at least 2 classes");

    const std::size_t n = features.rows();
    const std::size_t d = features.cols();
    const std::size_t c = classes.size();

    const auto x_mean = column_means(features);
    DenseMatrix xc = features;
    for (std::size_t i = 0; i < n; ++i) {
        auto r = xc.row(i);
        for (std::size_t j = 0; j < d; ++j) r[j] -= x_mean[j];
    }
    DenseMatrix y(n, c);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < c; ++k) y(i, k) = classes[k] == labels[i] ? 1.0 : -1.0;
    const auto y_mean = column_means(y);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < c; ++k) y(i, k) -= y_mean[k];

    DenseMatrix w;  // d x c
    if (n < d) {
        DenseMatrix k = gram_rows(xc);
        for (std::size_t i = 0; i < n; ++i) k(i, i) += lambda;
        const auto alpha = cholesky_solve(cholesky(k), y);
        w = matmul_tn(xc, alpha);
    } else {
        DenseMatrix g = matmul_tn(xc, xc);
        for (std::size_t i = 0; i < d; ++i) g(i, i) += lambda;
        w = cholesky_solve(cholesky(g), matmul_tn(xc, y));
    }

    LinearModel m;
    m.classes = classes;
    m.weights = w.transposed();
    m.bias.resize(c);
    for (std::size_t k = 0; k < c; ++k) {
        double dot = 0.0;
        for (std::size_t j = 0; j < d; ++j) dot += x_mean[j] * m.weights(k, j);
        m.bias[k] = y_mean[k] - dot;
    }
    for (auto v : m.weights.data())
        if (!std::isfinite(v)) throw NumericError("fit_ridge_ovr: non-finite weights");
    return m;
}

std::vector<double> class_scores(const LinearModel& model, std::span<const double> f) {
    if (f.size() != model.feature_dim()) {
        throw DimensionError("predict: feature length " + std::to_string(f.size()) + " != model dimension " +
                             std::to_string(model.feature_dim()));
    }
    std::vector<double> s(model.classes.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        double acc = model.bias[k];
        auto w = model.weights.row(k);
        for (std::size_t j = 0; j < f.size(); ++j) acc += w[j] * f[j];
        s[k] = acc;
    }
    return s;
}

std::size_t predict(const LinearModel& model, std::span<const double> f) {
    return model.classes[argmax_first(class_scores(model, f))];
}

// ---------------------------------------------------------------- 1-NN

NearestNeighborModel fit_nearest_neighbor(const DenseMatrix& features, std::span<const std::size_t> labels) {
    require_rows(features, labels, "fit_nearest_neighbor");
    return {features, std::vector<std::size_t>(labels.begin(), labels.end())};
}

std::size_t predict(const NearestNeighborModel& model, std::span<const double> f) {
    if (f.size() != model.features.cols()) throw DimensionError("predict: feature length mismatch");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < model.features.rows(); ++i) {
        auto r = model.features.row(i);
        double dist = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            const double diff = r[j] - f[j];
            dist += diff * diff;
        }
        if (dist < best_d) {
            best_d = dist;
            best = i;
        }
    }
    return model.labels[best];
}

// ---------------------------------------------------------------- LDA

LdaModel fit_lda(const DenseMatrix& features, std::span<const std::size_t> labels, std::size_t d) {
    require_rows(features, labels, "fit_lda");
    const auto classes = sorted_classes(labels);
    const std::size_t dim = features.cols();
    const std::size_t c = classes.size();
    if (c < 2) throw DataError("fit_lda: need at least 2 classes");
    if (d < 1 || d > c - 1 || d > dim) {
        throw ConfigError("fit_lda: d = " + std::to_string(d) + " must lie in [1, min(classes - 1, features)] = [1, " +
                          std::to_string(std::min(c - 1, dim)) + "]");
    }

    std::vector<std::size_t> counts(c, 0);
    std::vector<std::vector<double>> means(c, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const auto k = class_index(classes, labels[i]);
        ++counts[k];
        auto r = features.row(i);
        for (std::size_t j = 0; j < dim; ++j) means[k][j] += r[j];
    }
    for (std::size_t k = 0; k < c; ++k) {
        if (counts[k] < 2) {
            throw DataError("fit_lda: class " + std::to_string(classes[k]) +
                            " has a single sample; within-class scatter is undefined");
        }
        for (auto& v : means[k]) v /= static_cast<double>(counts[k]);
    }
    const auto overall = column_means(features);

    DenseMatrix sw(dim, dim);
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const auto& mu = means[class_index(classes, labels[i])];
        auto r = features.row(i);
        std::vector<double> diff(dim);
        for (std::size_t j = 0; j < dim; ++j) diff[j] = r[j] - mu[j];
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = a; b < dim; ++b) sw(a, b) += diff[a] * diff[b];
    }
    DenseMatrix sb(dim, dim);
    for (std::size_t k = 0; k < c; ++k) {
        std::vector<double> diff(dim);
        for (std::size_t j = 0; j < dim; ++j) diff[j] = means[k][j] - overall[j];
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = a; b < dim; ++b) sb(a, b) += static_cast<double>(counts[k]) * diff[a] * diff[b];
    }
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < a; ++b) {
            sw(a, b) = sw(b, a);
            sb(a, b) = sb(b, a);
        }

    double trace = 0.0;
    for (std::size_t j = 0; j < dim; ++j) trace += sw(j, j);
    // Classes without spread still get a positive definite S_w.
    const double eps = trace > 0.0 ? 1e-6 * trace / static_cast<double>(dim) : 1e-6;
    for (std::size_t j = 0; j < dim; ++j) sw(j, j) += eps;

    // With S_w = L L^T the problem becomes the symmetric L^-1 S_b L^-T u = lambda u, w = L^-T u.
    const auto lower = cholesky(sw);
    const auto t = forward_substitute(lower, sb);
    auto m = forward_substitute(lower, t.transposed());
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < a; ++b) {
            const double avg = 0.5 * (m(a, b) + m(b, a));
            m(a, b) = m(b, a) = avg;
        }
    const auto eig = symmetric_eigen(m);
    DenseMatrix u(dim, d);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t k = 0; k < d; ++k) u(r, k) = eig.vectors(r, k);

    LdaModel model;
    model.classes = classes;
    model.projection = back_substitute_transposed(lower, u);
    canonicalize_column_signs(model.projection);

    model.class_means.assign(c, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const auto z = lda_transform(model, features.row(i));
        auto& acc = model.class_means[class_index(classes, labels[i])];
        for (std::size_t k = 0; k < d; ++k) acc[k] += z[k];
    }
    for (std::size_t k = 0; k < c; ++k)
        for (auto& v : model.class_means[k]) v /= static_cast<double>(counts[k]);
    return model;
}

std::vector<double> lda_transform(const LdaModel& model, std::span<const double> f) {
    if (f.size() != model.projection.rows()) throw DimensionError("lda_transform: feature length mismatch");
    std::vector<double> z(model.dims(), 0.0);
    for (std::size_t j = 0; j < f.size(); ++j) {
        auto r = model.projection.row(j);
        for (std::size_t k = 0; k < z.size(); ++k) z[k] += f[j] * r[k];
    }
    return z;
}

std::size_t predict(const LdaModel& model, std::span<const double> f) {
    const auto z = lda_transform(model, f);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < model.classes.size(); ++k) {
        double dist = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double diff = z[j] - model.class_means[k][j];
            dist += diff * diff;
        }
        if (dist < best_d) {
            best_d = dist;
            best = k;
        }
    }
    return model.classes[best];
}

// ---------------------------------------------------------------- evaluation

Evaluation evaluate(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                    std::size_t num_classes) {
    if (predictions.size() != labels.size()) {
        throw DimensionError("evaluate: " + std::to_string(predictions.size()) + " predictions for " +
                             std::to_string(labels.size()) + " labels");
    }
    if (labels.empty()) throw DataError("evaluate: nothing to evaluate");
    Evaluation e;
    e.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= num_classes || predictions[i] >= num_classes) throw DataError("evaluate: label out of range");
        ++e.confusion[labels[i]][predictions[i]];
        if (labels[i] == predictions[i]) ++correct;
    }
    e.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
    return e;
}

}  // namespace mpcanet
