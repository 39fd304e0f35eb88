#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mpcanet/tensor.hpp"

namespace mpcanet {

enum class Padding : std::uint8_t {
    ZeroSame = 0,  // pad floor(k/2) leading, k-1-floor(k/2) trailing zeros; one position per element
    Valid = 1,     // windows fully inside the source; I - k + 1 positions
};

/// Sliding window over a source tensor, stride 1 along slide modes.
///
/// Modes outside `slide_modes` must be covered entirely by the patch and are
/// squeezed out of the position grid. The grid lists slid modes in ascending
/// order; with no slid modes it is the single position {1}.
struct PatchGeometry {
    Shape source_dims;
    Shape patch_dims;
    std::vector<std::size_t> slide_modes;  // 0-based, ascending
    Padding padding = Padding::ZeroSame;

    /// Slides along every mode the patch does not cover completely.
    static PatchGeometry covering(Shape source_dims, Shape patch_dims, Padding padding = Padding::ZeroSame);

    void validate() const;
    Shape grid_dims() const;
    std::size_t position_count() const { return shape_volume(grid_dims()); }
    bool slides(std::size_t mode) const;

    friend bool operator==(const PatchGeometry&, const PatchGeometry&) = default;
};

struct PatchSet {
    std::vector<DenseTensor> patches;  // row-major over grid positions
    Shape grid_dims;
    Shape source_dims;
};

PatchSet extract_patches(const DenseTensor& t, const PatchGeometry& g);

/// Appends the patches of t to `out` without building a PatchSet.
void append_patches(const DenseTensor& t, const PatchGeometry& g, std::vector<DenseTensor>& out);

/// Element-wise mean of equally shaped tensors.
DenseTensor mean_tensor(std::span<const DenseTensor> ts);

/// Subtracts `mean` (or the ensemble mean when absent) from every patch.
/// Returns the centered set and the mean that was used.
std::pair<PatchSet, DenseTensor> center_patches(PatchSet ps, const std::optional<DenseTensor>& mean = std::nullopt);

}  // namespace mpcanet
