#include "mpcanet/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpcanet/error.hpp"

namespace mpcanet {

namespace {

struct ArchitectureInfo {
    Architecture arch;
    std::string_view name;
    std::vector<DictionaryKind> layers;
};

const std::vector<ArchitectureInfo>& architectures() {
    using K = DictionaryKind;
    static const std::vector<ArchitectureInfo> table = {
        {Architecture::Mpcanet1, "mpcanet1", {K::TensorMpca}},
        {Architecture::Mpcanet2Vector, "mpcanet2-vector", {K::TensorMpca, K::VectorPca}},
        {Architecture::Mpcanet2Cuboid, "mpcanet2-cuboid", {K::TensorMpca, K::TensorMpca}},
        {Architecture::Pcanet1, "pcanet1", {K::VectorPca}},
        {Architecture::Pcanet2, "pcanet2", {K::VectorPca, K::VectorPca}},
    };
    return table;
}

const ArchitectureInfo& info(Architecture a) {
    for (const auto& i : architectures())
        if (i.arch == a) return i;
    throw ConfigError("unknown architecture tag " + std::to_string(static_cast<int>(a)));
}

}  // namespace

std::string_view architecture_name(Architecture a) { return info(a).name; }

Architecture parse_architecture(std::string_view name) {
    for (const auto& i : architectures())
        if (i.name == name) return i.arch;
    std::string known;
    for (const auto& i : architectures()) known += (known.empty() ? "" : ", ") + std::string(i.name);
    throw ConfigError("unknown architecture '" + std::string(name) + "' (expected one of: " + known + ")");
}

std::vector<DictionaryKind> architecture_layers(Architecture a) { return info(a).layers; }

std::string_view dictionary_kind_name(DictionaryKind k) {
    return k == DictionaryKind::TensorMpca ? "tensor-mpca" : "vector-pca";
}

// ---------------------------------------------------------------- pooling

void PoolingConfig::validate() const {
    if (box_dims.empty()) throw ConfigError("pooling: box dims are empty");
    for (auto b : box_dims)
        if (b < 1) throw ConfigError("pooling: box extents must be positive");
    if (!(overlap >= 0.0 && overlap < 1.0)) throw ConfigError("pooling: overlap ratio must lie in [0, 1)");
}

std::vector<std::size_t> PoolingConfig::strides() const {
    std::vector<std::size_t> s;
    for (auto b : box_dims) {
        const double raw = std::round(static_cast<double>(b) * (1.0 - overlap));
        s.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(raw)));
    }
    return s;
}

std::vector<std::vector<std::size_t>> box_anchors(const Shape& map_dims, const PoolingConfig& p) {
    p.validate();
    if (p.box_dims.size() != map_dims.size()) {
        throw ConfigError("pooling: box " + shape_to_string(p.box_dims) + " does not match feature map order " +
                          shape_to_string(map_dims));
    }
    const auto strides = p.strides();
    std::vector<std::vector<std::size_t>> anchors(map_dims.size());
    for (std::size_t n = 0; n < map_dims.size(); ++n) {
        if (p.box_dims[n] > map_dims[n]) {
            throw ConfigError("pooling: box " + shape_to_string(p.box_dims) + " is larger than feature map " +
                              shape_to_string(map_dims));
        }
        const std::size_t last = map_dims[n] - p.box_dims[n];
        auto& a = anchors[n];
        for (std::size_t pos = 0; pos <= last; pos += strides[n]) a.push_back(pos);
        if (a.back() != last) a.push_back(last);
    }
    return anchors;
}

std::size_t box_count(const Shape& map_dims, const PoolingConfig& p) {
    std::size_t b = 1;
    for (const auto& a : box_anchors(map_dims, p)) b *= a.size();
    return b;
}

// ---------------------------------------------------------------- planning

NetworkPlan plan_network(const Shape& input_dims, const NetworkConfig& cfg) {
    const auto kinds = architecture_layers(cfg.architecture);
    if (cfg.layers.size() != kinds.size()) {
        throw ConfigError("architecture " + std::string(architecture_name(cfg.architecture)) + " needs " +
                          std::to_string(kinds.size()) + " layer(s), config has " + std::to_string(cfg.layers.size()));
    }

    NetworkPlan plan;
    Shape source = input_dims;
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        const auto& spec = cfg.layers[k];
        if (spec.encoders < 1) throw ConfigError("layer " + std::to_string(k + 1) + ": L must be at least 1");
        spec.energy.validate();

        LayerConfig lc;
        if (spec.slide_modes) {
            lc.geometry = PatchGeometry{source, spec.patch_dims, *spec.slide_modes, spec.padding};
            lc.geometry.validate();
        } else {
            lc.geometry = PatchGeometry::covering(source, spec.patch_dims, spec.padding);
        }
        lc.encoders = spec.encoders;
        lc.kind = kinds[k];
        lc.energy = spec.energy;
        lc.max_iter = spec.max_iter;
        lc.tol = spec.tol;

        const std::size_t available = shape_volume(spec.patch_dims);
        if (lc.encoders > available) {
            throw ConfigError("layer " + std::to_string(k + 1) + ": L = " + std::to_string(lc.encoders) +
                              " exceeds the " + std::to_string(available) + " coordinates of patch " +
                              shape_to_string(spec.patch_dims));
        }
        source = lc.geometry.grid_dims();
        plan.layers.push_back(std::move(lc));
    }

    const std::size_t last_l = plan.layers.back().encoders;
    if (last_l > kMaxLastLayerEncoders) {
        throw ConfigError("last layer L = " + std::to_string(last_l) + " exceeds the supported maximum of " +
                          std::to_string(kMaxLastLayerEncoders));
    }
    plan.map_dims = source;
    plan.boxes = box_count(plan.map_dims, cfg.pooling);
    std::size_t parents = 1;
    for (std::size_t k = 0; k + 1 < plan.layers.size(); ++k) parents *= plan.layers[k].encoders;
    plan.feature_dim = (std::size_t{1} << last_l) * plan.boxes * parents;
    return plan;
}

// ---------------------------------------------------------------- layers

LayerDictionary learn_layer_dictionary(std::span<const DenseTensor> inputs, const LayerConfig& cfg) {
    if (inputs.empty()) throw DataError("learn_layer_dictionary: no inputs");
    cfg.geometry.validate();

    // TODO: stream patches into the scatter accumulation instead of
    // materializing them; protocol-scale inputs (80x50x20, 5x5x20 patches)
    // need gigabytes here.
    std::vector<DenseTensor> patches;
    for (const auto& t : inputs) append_patches(t, cfg.geometry, patches);

    LayerDictionary d;
    d.config = cfg;
    d.mean_patch = mean_tensor(patches);
    double energy = 0.0;
    for (auto& p : patches) {
        p -= d.mean_patch;
        energy += frobenius_sq_norm(p);
        if (cfg.kind == DictionaryKind::VectorPca) p = p.flattened();
    }
    if (energy == 0.0) throw ZeroVarianceError("learn_layer_dictionary: all patches are identical");
    if (patches.size() < 2) throw DataError("learn_layer_dictionary: need at least 2 patches");

    MpcaFitOptions opts;
    opts.energy = cfg.energy;
    opts.max_iter = cfg.max_iter;
    opts.tol = cfg.tol;
    opts.min_core_size = cfg.encoders;
    d.model = fit_mpca(patches, opts);
    compute_variance_order(d.model, patches);
    return d;
}

std::vector<DenseTensor> encode_layer(const DenseTensor& t, const LayerDictionary& d) {
    const auto& g = d.config.geometry;
    if (t.dims() != g.source_dims) {
        throw DimensionError("encode_layer: input dims " + shape_to_string(t.dims()) + " != layer source dims " +
                             shape_to_string(g.source_dims));
    }
    const Shape grid = g.grid_dims();
    const std::size_t L = d.config.encoders;
    std::vector<DenseTensor> maps(L, DenseTensor(grid));

    std::vector<DenseTensor> patches;
    append_patches(t, g, patches);
    const auto& order = d.model.variance_order;
    for (std::size_t q = 0; q < patches.size(); ++q) {
        DenseTensor p = patches[q] - d.mean_patch;
        if (d.config.kind == DictionaryKind::VectorPca) p = p.flattened();
        const DenseTensor core = project(d.model, p);
        for (std::size_t l = 0; l < L; ++l) maps[l][q] = core[order[l]];
    }
    return maps;
}

DenseTensor binarize(const DenseTensor& map) {
    DenseTensor out(map.dims());
    for (std::size_t i = 0; i < map.size(); ++i) out[i] = map[i] > 0.0 ? 1.0 : 0.0;
    return out;
}

DenseTensor weight_maps(std::span<const DenseTensor> binary_maps) {
    if (binary_maps.empty()) throw DataError("weight_maps: no maps");
    DenseTensor out(binary_maps.front().dims());
    double w = 1.0;
    for (const auto& m : binary_maps) {
        if (m.dims() != out.dims()) throw DimensionError("weight_maps: maps differ in dims");
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double b = m[i];
            if (b != 0.0 && b != 1.0) throw DataError("weight_maps: map entries must be 0 or 1");
            out[i] += w * b;
        }
        w *= 2.0;
    }
    return out;
}

std::vector<double> pool_histograms(const DenseTensor& decimal_map, const PoolingConfig& p, std::size_t encoders) {
    if (encoders < 1 || encoders > kMaxLastLayerEncoders) throw ConfigError("pool_histograms: unsupported L");
    const auto anchors = box_anchors(decimal_map.dims(), p);
    const std::size_t bins = std::size_t{1} << encoders;
    const std::size_t order = decimal_map.order();
    const auto strides = decimal_map.strides();

    std::vector<std::size_t> bin_of(decimal_map.size());
    for (std::size_t i = 0; i < decimal_map.size(); ++i) {
        const double v = decimal_map[i];
        if (!(v >= 0.0) || v > static_cast<double>(bins - 1) || v != std::floor(v))
            throw DataError("pool_histograms: map value " + std::to_string(v) + " is not an integer in [0, 2^L - 1]");
        bin_of[i] = static_cast<std::size_t>(v);
    }

    std::size_t boxes = 1;
    for (const auto& a : anchors) boxes *= a.size();
    std::vector<double> out(bins * boxes, 0.0);
    const double volume = static_cast<double>(shape_volume(p.box_dims));
    const double scale = p.normalized ? 1.0 / volume : 1.0;

    std::vector<std::size_t> which(order, 0);
    std::vector<std::size_t> off(order, 0);
    for (std::size_t b = 0; b < boxes; ++b) {
        double* hist = out.data() + b * bins;
        std::fill(off.begin(), off.end(), 0);
        const std::size_t cells = shape_volume(p.box_dims);
        for (std::size_t c = 0; c < cells; ++c) {
            std::size_t lin = 0;
            for (std::size_t n = 0; n < order; ++n) lin += (anchors[n][which[n]] + off[n]) * strides[n];
            hist[bin_of[lin]] += scale;
            for (std::size_t n = order; n-- > 0;) {
                if (++off[n] < p.box_dims[n]) break;
                off[n] = 0;
            }
        }
        for (std::size_t n = order; n-- > 0;) {
            if (++which[n] < anchors[n].size()) break;
            which[n] = 0;
        }
    }
    return out;
}

// ---------------------------------------------------------------- network

Network train_network(std::span<const DenseTensor> inputs, const NetworkConfig& cfg) {
    if (inputs.empty()) throw DataError("train_network: empty training set");
    const Shape dims = inputs.front().dims();
    for (std::size_t m = 1; m < inputs.size(); ++m) {
        if (inputs[m].dims() != dims) {
            throw DimensionError("train_network: sample " + std::to_string(m) + " has dims " +
                                 shape_to_string(inputs[m].dims()) + ", expected " + shape_to_string(dims));
        }
    }
    const NetworkPlan plan = plan_network(dims, cfg);

    Network net;
    net.architecture = cfg.architecture;
    net.input_dims = dims;
    net.pooling = cfg.pooling;
    net.feature_dim = plan.feature_dim;

    std::vector<DenseTensor> current(inputs.begin(), inputs.end());
    for (std::size_t k = 0; k < plan.layers.size(); ++k) {
        net.layers.push_back(learn_layer_dictionary(current, plan.layers[k]));
        if (k + 1 == plan.layers.size()) break;
        std::vector<DenseTensor> next;
        next.reserve(current.size() * plan.layers[k].encoders);
        for (const auto& t : current)
            for (auto& m : encode_layer(t, net.layers.back())) next.push_back(std::move(m));
        current = std::move(next);
    }
    return net;
}

std::vector<DenseTensor> encode_parents(const Network& net, const DenseTensor& t) {
    if (t.dims() != net.input_dims) {
        throw DimensionError("forward: input dims " + shape_to_string(t.dims()) + " != network input dims " +
                             shape_to_string(net.input_dims));
    }
    std::vector<DenseTensor> current{t};
    for (std::size_t k = 0; k + 1 < net.layers.size(); ++k) {
        std::vector<DenseTensor> next;
        for (const auto& m : current)
            for (auto& child : encode_layer(m, net.layers[k])) next.push_back(std::move(child));
        current = std::move(next);
    }
    return current;
}

std::vector<double> pool_parents(const Network& net, std::span<const DenseTensor> parents) {
    const auto& last = net.layers.back();
    std::vector<double> f;
    f.reserve(net.feature_dim);
    for (const auto& parent : parents) {
        auto children = encode_layer(parent, last);
        for (auto& c : children) c = binarize(c);
        const auto hist = pool_histograms(weight_maps(children), net.pooling, last.config.encoders);
        f.insert(f.end(), hist.begin(), hist.end());
    }
    return f;
}

std::vector<double> forward(const Network& net, const DenseTensor& t) {
    const auto parents = encode_parents(net, t);
    return pool_parents(net, parents);
}

DenseMatrix extract_features(const Network& net, std::span<const DenseTensor> inputs) {
    DenseMatrix out(inputs.size(), net.feature_dim);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto f = forward(net, inputs[i]);
        std::copy(f.begin(), f.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace mpcanet
