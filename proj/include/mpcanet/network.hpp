#pragma once

// Cascaded projection network: per-layer MPCA (or PCA) dictionaries learned
// from patches, projected encoding into L feature maps, Heaviside
// binarization, binary weighting into decimal maps and block-histogram
// pooling.
//
// With layers 0..K-1, every map produced by layers 0..K-2 is a "parent". The
// last layer encodes each parent into L_last children which are binarized
// and weighted into one decimal map per parent; each decimal map is pooled
// and the histograms are concatenated in parent order. Hence
//
//     feature_dim = 2^L_last * B * prod(L_k for k < K-1)

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mpcanet/mpca.hpp"
#include "mpcanet/patching.hpp"
#include "mpcanet/tensor.hpp"

namespace mpcanet {

enum class DictionaryKind : std::uint8_t {
    TensorMpca = 0,  // MPCA over patch tensors
    VectorPca = 1,   // PCA over flattened patches (order-1 MPCA)
};

enum class Architecture : std::uint8_t {
    Mpcanet1 = 0,
    Mpcanet2Vector = 1,
    Mpcanet2Cuboid = 2,
    Pcanet1 = 3,
    Pcanet2 = 4,
};

std::string_view architecture_name(Architecture a);
/// Throws ConfigError for unknown names.
Architecture parse_architecture(std::string_view name);
/// Dictionary kind of each layer, first to last.
std::vector<DictionaryKind> architecture_layers(Architecture a);

std::string_view dictionary_kind_name(DictionaryKind k);

/// Largest L accepted for the last layer (histograms have 2^L bins).
inline constexpr std::size_t kMaxLastLayerEncoders = 16;

struct LayerConfig {
    PatchGeometry geometry;
    std::size_t encoders = 8;  // L
    DictionaryKind kind = DictionaryKind::TensorMpca;
    EnergyPolicy energy;
    int max_iter = 10;
    double tol = 1e-6;

    friend bool operator==(const LayerConfig&, const LayerConfig&) = default;
};

struct LayerDictionary {
    LayerConfig config;
    MpcaModel model;  // over patch tensors, or over flattened patches for VectorPca
    DenseTensor mean_patch;
};

struct PoolingConfig {
    Shape box_dims;
    double overlap = 0.5;
    bool normalized = false;

    void validate() const;
    std::vector<std::size_t> strides() const;

    friend bool operator==(const PoolingConfig&, const PoolingConfig&) = default;
};

/// Box anchors per mode: multiples of the stride plus one final anchor
/// clamped so the last box touches the boundary, duplicates removed.
std::vector<std::vector<std::size_t>> box_anchors(const Shape& map_dims, const PoolingConfig& p);
std::size_t box_count(const Shape& map_dims, const PoolingConfig& p);

/// User-facing description of one layer before the input geometry is known.
struct LayerSpec {
    Shape patch_dims;
    std::optional<std::vector<std::size_t>> slide_modes;  // 0-based; default slides every uncovered mode
    Padding padding = Padding::ZeroSame;
    std::size_t encoders = 8;
    EnergyPolicy energy;
    int max_iter = 10;
    double tol = 1e-6;
};

struct NetworkConfig {
    Architecture architecture = Architecture::Mpcanet1;
    std::vector<LayerSpec> layers;
    PoolingConfig pooling;
};

/// Geometry of a network resolved against concrete input dims, computed
/// without any training.
struct NetworkPlan {
    std::vector<LayerConfig> layers;
    Shape map_dims;  // grid of the last layer, i.e. the pooled maps
    std::size_t boxes = 0;
    std::size_t feature_dim = 0;
};

NetworkPlan plan_network(const Shape& input_dims, const NetworkConfig& cfg);

struct Network {
    Architecture architecture = Architecture::Mpcanet1;
    Shape input_dims;
    std::vector<LayerDictionary> layers;
    PoolingConfig pooling;
    std::size_t feature_dim = 0;

    Shape map_dims() const { return layers.back().config.geometry.grid_dims(); }
};

/// Patches of every input, centered by their ensemble mean, fitted with MPCA
/// (or PCA on flattened patches) and ordered by variance. Guarantees at least
/// `encoders` core coordinates. Throws ZeroVarianceError when all centered
/// patches vanish.
LayerDictionary learn_layer_dictionary(std::span<const DenseTensor> inputs, const LayerConfig& cfg);

/// L feature maps over the layer's position grid: map l at position q holds
/// coordinate l of the variance-ordered projection of centered patch q.
std::vector<DenseTensor> encode_layer(const DenseTensor& t, const LayerDictionary& d);

/// 1 where the entry is strictly positive, else 0.
DenseTensor binarize(const DenseTensor& map);

/// sum_l 2^l * maps[l] (0-based l); inputs must be {0,1}-valued with equal dims.
DenseTensor weight_maps(std::span<const DenseTensor> binary_maps);

/// Concatenated 2^L-bin histograms of every box, boxes in row-major anchor order.
std::vector<double> pool_histograms(const DenseTensor& decimal_map, const PoolingConfig& p, std::size_t encoders);

/// Layer dictionaries trained one after another: layer 0 on the raw inputs,
/// layer k on every map layer k-1 produces for every input.
Network train_network(std::span<const DenseTensor> inputs, const NetworkConfig& cfg);

/// Maps emitted by all layers but the last, parent-major.
std::vector<DenseTensor> encode_parents(const Network& net, const DenseTensor& t);

/// Last-layer encoding, weighting and pooling of each parent, concatenated.
std::vector<double> pool_parents(const Network& net, std::span<const DenseTensor> parents);

std::vector<double> forward(const Network& net, const DenseTensor& t);

/// forward() for every tensor; one row per input.
DenseMatrix extract_features(const Network& net, std::span<const DenseTensor> inputs);

}  // namespace mpcanet
