#pragma once

// Classifiers over feature vectors. Labels are dense class ids; models keep
// their class ids sorted ascending and break score ties in that order.

#include <cstddef>
#include <span>
#include <vector>

#include "mpcanet/tensor.hpp"

namespace mpcanet {

inline constexpr double kDefaultRidgeLambda = 1e-2;

struct LinearModel {
    std::vector<std::size_t> classes;
    DenseMatrix weights;  // classes x features
    std::vector<double> bias;

    std::size_t feature_dim() const { return weights.cols(); }
};

/// One-vs-rest regularized least squares with +-1 targets and an
/// unpenalized bias (features and targets are centered before the solve).
/// Solves the d x d normal equations, or the n x n Gram-side system when
/// there are fewer samples than features.
LinearModel fit_ridge_ovr(const DenseMatrix& features, std::span<const std::size_t> labels, double lambda);

std::vector<double> class_scores(const LinearModel& model, std::span<const double> f);
std::size_t predict(const LinearModel& model, std::span<const double> f);

/// 1-nearest-neighbour (Euclidean) over stored training features.
struct NearestNeighborModel {
    DenseMatrix features;
    std::vector<std::size_t> labels;
};

NearestNeighborModel fit_nearest_neighbor(const DenseMatrix& features, std::span<const std::size_t> labels);
std::size_t predict(const NearestNeighborModel& model, std::span<const double> f);

struct LdaModel {
    std::vector<std::size_t> classes;
    DenseMatrix projection;                        // features x d
    std::vector<std::vector<double>> class_means;  // per class, d entries, in projected space

    std::size_t dims() const { return projection.cols(); }
};

/// Fisher discriminant directions from S_b w = lambda (S_w + eps I) w with
/// eps = 1e-6 * trace(S_w) / featureDim; classification by nearest class mean
/// in the projected space. Requires d <= numClasses - 1 and every class to
/// have at least two samples.
LdaModel fit_lda(const DenseMatrix& features, std::span<const std::size_t> labels, std::size_t d);

std::vector<double> lda_transform(const LdaModel& model, std::span<const double> f);
std::size_t predict(const LdaModel& model, std::span<const double> f);

struct Evaluation {
    double accuracy = 0.0;
    std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
};

/// Labels and predictions must be ids below num_classes.
Evaluation evaluate(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                    std::size_t num_classes);

}  // namespace mpcanet
