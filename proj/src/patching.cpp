#include "mpcanet/patching.hpp"

#include <algorithm>

#include "mpcanet/error.hpp"

namespace mpcanet {

PatchGeometry PatchGeometry::covering(Shape source_dims, Shape patch_dims, Padding padding) {
    PatchGeometry g{std::move(source_dims), std::move(patch_dims), {}, padding};
    if (g.source_dims.size() != g.patch_dims.size()) throw ConfigError("patch order does not match source order");
    for (std::size_t n = 0; n < g.source_dims.size(); ++n)
        if (g.patch_dims[n] < g.source_dims[n]) g.slide_modes.push_back(n);
    g.validate();
    return g;
}

bool PatchGeometry::slides(std::size_t mode) const {
    return std::find(slide_modes.begin(), slide_modes.end(), mode) != slide_modes.end();
}

void PatchGeometry::validate() const {
    if (source_dims.empty()) throw ConfigError("patch geometry: empty source dims");
    if (patch_dims.size() != source_dims.size()) {
        throw ConfigError("patch geometry: patch " + shape_to_string(patch_dims) + " does not match source order " +
                          shape_to_string(source_dims));
    }
    for (std::size_t i = 0; i < slide_modes.size(); ++i) {
        if (slide_modes[i] >= source_dims.size()) throw ConfigError("patch geometry: slide mode out of range");
        if (i && slide_modes[i] <= slide_modes[i - 1])
            throw ConfigError("patch geometry: slide modes must be strictly ascending");
    }
    for (std::size_t n = 0; n < source_dims.size(); ++n) {
        const auto k = patch_dims[n];
        if (k < 1 || k > source_dims[n]) {
            throw ConfigError("patch geometry: patch " + shape_to_string(patch_dims) + " does not fit source " +
                              shape_to_string(source_dims));
        }
        if (!slides(n) && k != source_dims[n]) {
            throw ConfigError("patch geometry: mode " + std::to_string(n + 1) +
                              " is not slid, so the patch must span it entirely");
        }
    }
}

Shape PatchGeometry::grid_dims() const {
    Shape grid;
    for (auto n : slide_modes)
        grid.push_back(padding == Padding::ZeroSame ? source_dims[n] : source_dims[n] - patch_dims[n] + 1);
    if (grid.empty()) grid.push_back(1);
    return grid;
}

void append_patches(const DenseTensor& t, const PatchGeometry& g, std::vector<DenseTensor>& out) {
    if (t.dims() != g.source_dims) {
        throw DimensionError("extract_patches: tensor dims " + shape_to_string(t.dims()) + " != geometry source " +
                             shape_to_string(g.source_dims));
    }
    g.validate();
    const std::size_t order = t.order();
    const auto strides = t.strides();
    const Shape grid = g.grid_dims();
    const std::size_t positions = shape_volume(grid);
    const std::size_t volume = shape_volume(g.patch_dims);

    // Leading offset of each mode's window relative to the position index.
    std::vector<long> lead(order, 0);
    if (g.padding == Padding::ZeroSame)
        for (auto n : g.slide_modes) lead[n] = static_cast<long>(g.patch_dims[n] / 2);

    std::vector<std::size_t> pos(g.slide_modes.size(), 0);
    std::vector<long> origin(order, 0);
    std::vector<std::size_t> off(order, 0);
    const auto src = t.data();

    out.reserve(out.size() + positions);
    for (std::size_t p = 0; p < positions; ++p) {
        std::fill(origin.begin(), origin.end(), 0);
        for (std::size_t s = 0; s < g.slide_modes.size(); ++s) {
            const auto n = g.slide_modes[s];
            origin[n] = static_cast<long>(pos[s]) - lead[n];
        }

        DenseTensor patch(g.patch_dims);
        auto dst = patch.data();
        std::fill(off.begin(), off.end(), 0);
        for (std::size_t e = 0; e < volume; ++e) {
            bool inside = true;
            std::size_t lin = 0;
            for (std::size_t n = 0; n < order; ++n) {
                const long idx = origin[n] + static_cast<long>(off[n]);
                if (idx < 0 || idx >= static_cast<long>(t.extent(n))) {
                    inside = false;
                    break;
                }
                lin += static_cast<std::size_t>(idx) * strides[n];
            }
            dst[e] = inside ? src[lin] : 0.0;
            for (std::size_t n = order; n-- > 0;) {
                if (++off[n] < g.patch_dims[n]) break;
                off[n] = 0;
            }
        }
        out.push_back(std::move(patch));

        for (std::size_t s = g.slide_modes.size(); s-- > 0;) {
            if (++pos[s] < grid[s]) break;
            pos[s] = 0;
        }
    }
}

PatchSet extract_patches(const DenseTensor& t, const PatchGeometry& g) {
    PatchSet ps;
    append_patches(t, g, ps.patches);
    ps.grid_dims = g.grid_dims();
    ps.source_dims = g.source_dims;
    return ps;
}

DenseTensor mean_tensor(std::span<const DenseTensor> ts) {
    if (ts.empty()) throw DataError("mean_tensor: no tensors");
    DenseTensor mean(ts.front().dims());
    for (const auto& t : ts) mean += t;
    mean *= 1.0 / static_cast<double>(ts.size());
    return mean;
}

std::pair<PatchSet, DenseTensor> center_patches(PatchSet ps, const std::optional<DenseTensor>& mean) {
    DenseTensor m = mean ? *mean : mean_tensor(ps.patches);
    for (auto& p : ps.patches) {
        if (p.dims() != m.dims()) {
            throw DimensionError("center_patches: mean dims " + shape_to_string(m.dims()) + " != patch dims " +
                                 shape_to_string(p.dims()));
        }
        p -= m;
    }
    return {std::move(ps), std::move(m)};
}

}  // namespace mpcanet
