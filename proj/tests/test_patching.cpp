#include <doctest.h>

#include "mpcanet/error.hpp"
#include "mpcanet/patching.hpp"
#include "support.hpp"

using namespace mpcanet;

namespace {

// Brute-force window: source index = grid position - lead + patch offset,
// zero outside the source, for the slid modes; fixed modes start at 0.
DenseTensor window(const DenseTensor& t, const PatchGeometry& g, const std::vector<std::size_t>& pos) {
    DenseTensor p(g.patch_dims);
    oracle::for_each_index(g.patch_dims, [&](const std::vector<std::size_t>& off) {
        std::vector<std::size_t> src(off.size());
        std::size_t slot = 0;
        bool inside = true;
        for (std::size_t n = 0; n < off.size(); ++n) {
            long long s = static_cast<long long>(off[n]);
            if (g.slides(n)) {
                const long long lead = g.padding == Padding::ZeroSame ? static_cast<long long>(g.patch_dims[n] / 2) : 0;
                s += static_cast<long long>(pos[slot++]) - lead;
            }
            if (s < 0 || s >= static_cast<long long>(t.extent(n))) inside = false;
            src[n] = static_cast<std::size_t>(std::max(0LL, s));
        }
        p[oracle::offset(g.patch_dims, off)] = inside ? t[oracle::offset(t.dims(), src)] : 0.0;
    });
    return p;
}

}  // namespace

TEST_CASE("patch spanning the whole tensor yields the tensor") {
    std::mt19937_64 rng(30);
    const auto t = oracle::random_tensor({3, 4, 2}, rng);
    for (auto pad : {Padding::ZeroSame, Padding::Valid}) {
        PatchGeometry g{t.dims(), t.dims(), {}, pad};
        const auto ps = extract_patches(t, g);
        REQUIRE(ps.patches.size() == 1);
        CHECK(ps.patches[0] == t);
        CHECK(ps.grid_dims == Shape{1});
    }
}

TEST_CASE("valid and same position counts") {
    std::mt19937_64 rng(31);
    const auto t = oracle::random_tensor({4, 4, 2}, rng);
    PatchGeometry valid{t.dims(), {3, 3, 2}, {0, 1}, Padding::Valid};
    CHECK(extract_patches(t, valid).patches.size() == 4);
    CHECK(valid.grid_dims() == Shape{2, 2});
    PatchGeometry same{t.dims(), {3, 3, 2}, {0, 1}, Padding::ZeroSame};
    const auto ps = extract_patches(t, same);
    CHECK(ps.patches.size() == 16);
    CHECK(ps.grid_dims == Shape{4, 4});
    // Corner patch: the first row and column of the window lie in the padding.
    const auto& corner = ps.patches[0];
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(corner.at({0, k, c}) == 0.0);
            CHECK(corner.at({k, 0, c}) == 0.0);
        }
        CHECK(corner.at({1, 1, c}) == t.at({0, 0, c}));
        CHECK(corner.at({2, 2, c}) == t.at({1, 1, c}));
    }
    CHECK(corner == window(t, same, {0, 0}));
}

TEST_CASE("patch entries match the brute-force window on random geometries") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 60; ++trial) {
        const Shape dims{1 + rng() % 5, 1 + rng() % 5, 1 + rng() % 3};
        const auto t = oracle::random_tensor(dims, rng);
        Shape patch(3);
        std::vector<std::size_t> slide;
        for (std::size_t n = 0; n < 3; ++n) {
            patch[n] = 1 + rng() % dims[n];
            if (patch[n] < dims[n] || rng() % 2) slide.push_back(n);
        }
        const auto pad = rng() % 2 ? Padding::Valid : Padding::ZeroSame;
        PatchGeometry g{dims, patch, slide, pad};
        const auto ps = extract_patches(t, g);

        Shape grid;
        std::size_t expected = 1;
        for (auto n : slide) {
            const auto count = pad == Padding::Valid ? dims[n] - patch[n] + 1 : dims[n];
            grid.push_back(count);
            expected *= count;
        }
        if (grid.empty()) grid = {1};
        CHECK(ps.patches.size() == expected);
        CHECK(ps.grid_dims == grid);
        std::size_t k = 0;
        oracle::for_each_index(grid, [&](const std::vector<std::size_t>& pos) {
            std::vector<std::size_t> slot_pos = slide.empty() ? std::vector<std::size_t>{} : pos;
            CHECK(ps.patches[k++] == window(t, g, slot_pos));
        });
    }
}

TEST_CASE("geometry validation") {
    PatchGeometry bad_extent{{4, 4}, {5, 1}, {0, 1}, Padding::ZeroSame};
    CHECK_THROWS_AS(bad_extent.validate(), ConfigError);
    PatchGeometry fixed_partial{{4, 4}, {3, 3}, {0}, Padding::ZeroSame};
    CHECK_THROWS_AS(fixed_partial.validate(), ConfigError);
    PatchGeometry order{{4, 4}, {3}, {0}, Padding::ZeroSame};
    CHECK_THROWS_AS(order.validate(), ConfigError);
    const auto c = PatchGeometry::covering({80, 50, 20}, {5, 5, 20});
    CHECK(c.slide_modes == std::vector<std::size_t>{0, 1});
    CHECK(c.grid_dims() == Shape{80, 50});
    const auto valid = PatchGeometry::covering({80, 50, 20}, {5, 5, 20}, Padding::Valid);
    CHECK(valid.grid_dims() == Shape{76, 46});
}

TEST_CASE("patch centering") {
    const DenseTensor p = DenseTensor::filled({2, 2}, 3.0);
    PatchSet same{{p, p, p}, {3}, {3, 2}};
    auto [centered, mean] = center_patches(same);
    CHECK(mean == p);
    for (const auto& c : centered.patches)
        for (auto v : c.data()) CHECK(v == 0.0);

    PatchSet two{{DenseTensor::filled({2}, 0.0), DenseTensor::filled({2}, 2.0)}, {2}, {2}};
    auto [c2, m2] = center_patches(two);
    CHECK(m2 == DenseTensor::filled({2}, 1.0));
    CHECK(c2.patches[0] == DenseTensor::filled({2}, -1.0));
    CHECK(c2.patches[1] == DenseTensor::filled({2}, 1.0));

    std::mt19937_64 rng(33);
    PatchSet rnd{{}, {5}, {5}};
    for (int i = 0; i < 5; ++i) rnd.patches.push_back(oracle::random_tensor({2, 3}, rng));
    auto [c3, m3] = center_patches(rnd);
    CHECK(oracle::max_abs(mean_tensor(c3.patches), DenseTensor({2, 3})) < 1e-12);

    auto [c4, m4] = center_patches(rnd, m3);
    CHECK(c4.patches == c3.patches);
    CHECK_THROWS_AS(center_patches(rnd, DenseTensor({3, 2})), DimensionError);
}
