#pragma once

// Multilinear PCA: per-mode orthonormal projections V(n) (I_n x P_n) that
// maximize the total scatter of the projected cores
//
//     psi = sum_m || (X_m - mean) x_0 V(0)^T ... x_{N-1} V(N-1)^T ||_F^2
//
// found by alternating mode-wise eigendecompositions.

#include <cstddef>
#include <span>
#include <vector>

#include "mpcanet/tensor.hpp"

namespace mpcanet {

/// Per-mode cumulative eigenvalue-energy threshold with optional floors.
struct EnergyPolicy {
    double q = 0.97;
    std::vector<std::size_t> min_dims;  // per mode; missing entries mean 1

    std::size_t floor_for(std::size_t mode) const { return mode < min_dims.size() ? min_dims[mode] : 1; }
    void validate() const;
};

/// Smallest P whose leading eigenvalues hold at least a fraction q of the
/// total. Negative round-off eigenvalues count as zero, so with q == 1 the
/// trailing exact-zero directions are dropped. Returns 1 for zero total
/// energy, and never less than `floor` (clipped to the eigenvalue count).
std::size_t select_mode_dims(std::span<const double> eigvals, double q, std::size_t floor = 1);

struct MpcaModel {
    Shape input_dims;
    Shape output_dims;
    std::vector<DenseMatrix> factors;                   // V(n), I_n x P_n, orthonormal columns
    DenseTensor mean;                                   // sample mean, input_dims
    std::vector<std::vector<double>> mode_eigenvalues;  // per mode, descending, length I_n
    std::vector<std::size_t> variance_order;            // core linear indices by descending variance
    double captured_scatter = 0.0;

    std::size_t core_size() const { return shape_volume(output_dims); }
};

struct MpcaFitOptions {
    EnergyPolicy energy;
    int max_iter = 10;
    double tol = 1e-6;
    // Grow the selected dims until the core has at least this many
    // coordinates (largest next eigenvalue across modes first).
    std::size_t min_core_size = 1;
};

struct MpcaFitTrace {
    // Entry 0 is the scatter after initialization, entry k after sweep k.
    std::vector<double> scatter;
    bool converged = false;
};

/// Mode-n scatter of already-centered samples, each projected through the
/// transposed factors of every other mode. An empty `factors` span means no
/// other-mode projection.
DenseMatrix mode_scatter(std::span<const DenseTensor> centered, std::span<const DenseMatrix> factors,
                         std::size_t mode);

/// Fits the projection. Dimensions P_n are chosen once from the
/// full-projection eigenvalues (stored in mode_eigenvalues), then the factors
/// are refined by alternating per-mode eigendecompositions with P_n fixed
/// until the relative scatter change drops below tol or max_iter sweeps run.
/// variance_order is left empty; see compute_variance_order.
MpcaModel fit_mpca(std::span<const DenseTensor> samples, const MpcaFitOptions& options = {},
                   MpcaFitTrace* trace = nullptr);

/// Core of t: (t - mean) x_n V(n)^T over all modes.
DenseTensor project(const MpcaModel& model, const DenseTensor& t);

/// mean + core x_n V(n) over all modes.
DenseTensor reconstruct(const MpcaModel& model, const DenseTensor& core);

/// Orders core coordinates by descending variance over the projected
/// samples (ties by ascending linear index), stores the permutation into
/// model.variance_order and returns it.
std::vector<std::size_t> compute_variance_order(MpcaModel& model, std::span<const DenseTensor> samples);

/// Core entries rearranged by variance order.
std::vector<double> vectorize_core(const MpcaModel& model, const DenseTensor& core);

/// Inverse of vectorize_core.
DenseTensor unvectorize_core(const MpcaModel& model, std::span<const double> vec);

}  // namespace mpcanet
