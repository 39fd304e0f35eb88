#pragma once

// Model container. All integers little-endian, u32 unless noted; reals are
// IEEE-754 binary64 little-endian. shape = u32 order, u32 extents;
// tensor = shape, f64 payload; matrix = u32 rows, u32 cols, f64 payload;
// reals/indices = u32 count then entries.
//
//   "MPCM"  u8 version (1)  u8 architecture tag
//   shape input_dims   u32 feature_dim   u32 layer_count
//   per layer:
//     shape source_dims  shape patch_dims  indices slide_modes  u8 padding
//     u32 L  u8 dictionary_kind  f64 energy_q  indices min_dims  u32 max_iter  f64 tol
//     tensor mean_patch
//     shape model_input_dims  shape model_output_dims
//     u32 factor_count, matrix per factor   tensor model_mean
//     u32 mode_count, reals per mode (eigenvalues)
//     indices variance_order  f64 captured_scatter
//   shape box_dims  f64 overlap  u8 normalized
//   optional classifier section:
//     "CLSF"  u8 kind (0 ridge, 1 nearest-neighbour)
//     u32 label_count, per label u32 length + UTF-8 bytes
//     ridge: indices classes  matrix weights  reals bias
//     nearest-neighbour: matrix features  indices labels

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mpcanet/classifier.hpp"
#include "mpcanet/network.hpp"

namespace mpcanet {

inline constexpr std::uint8_t kModelFileVersion = 1;

struct ClassifierSection {
    std::vector<std::string> label_names;  // indexed by class id
    std::variant<LinearModel, NearestNeighborModel> model;

    std::size_t predict(std::span<const double> f) const;
    std::string_view kind_name() const;
};

struct ModelFile {
    Network network;
    std::optional<ClassifierSection> classifier;
};

void write_network(std::ostream& os, const Network& net);
Network read_network(std::istream& is);

void write_model(std::ostream& os, const ModelFile& m);
ModelFile read_model(std::istream& is);
void write_model_file(const std::filesystem::path& path, const ModelFile& m);
ModelFile read_model_file(const std::filesystem::path& path);

}  // namespace mpcanet
