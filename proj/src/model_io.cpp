#include "mpcanet/model_io.hpp"

#include <algorithm>
#include <fstream>

#include "mpcanet/binary_io.hpp"
#include "mpcanet/error.hpp"

namespace mpcanet {

namespace {

constexpr std::size_t kMaxLabelBytes = 1 << 16;

void write_layer(BinaryWriter& w, const LayerDictionary& d) {
    const auto& c = d.config;
    w.shape(c.geometry.source_dims);
    w.shape(c.geometry.patch_dims);
    w.indices(c.geometry.slide_modes);
    w.u8(static_cast<std::uint8_t>(c.geometry.padding));
    w.count(c.encoders);
    w.u8(static_cast<std::uint8_t>(c.kind));
    w.f64(c.energy.q);
    w.indices(c.energy.min_dims);
    w.count(static_cast<std::size_t>(c.max_iter));
    w.f64(c.tol);
    w.tensor(d.mean_patch);

    const auto& m = d.model;
    w.shape(m.input_dims);
    w.shape(m.output_dims);
    w.count(m.factors.size());
    for (const auto& f : m.factors) w.matrix(f);
    w.tensor(m.mean);
    w.count(m.mode_eigenvalues.size());
    for (const auto& e : m.mode_eigenvalues) w.reals(e);
    w.indices(m.variance_order);
    w.f64(m.captured_scatter);
}

void check(bool ok, const std::string& what) {
    if (!ok) throw FormatError("model file: " + what);
}

LayerDictionary read_layer(BinaryReader& r) {
    LayerDictionary d;
    auto& c = d.config;
    c.geometry.source_dims = r.shape();
    c.geometry.patch_dims = r.shape();
    c.geometry.slide_modes = r.indices();
    const auto padding = r.u8();
    check(padding <= 1, "unknown padding tag");
    c.geometry.padding = static_cast<Padding>(padding);
    try {
        c.geometry.validate();
    } catch (const ConfigError& e) {
        throw FormatError(std::string("model file: ") + e.what());
    }
    c.encoders = r.count();
    const auto kind = r.u8();
    check(kind <= 1, "unknown dictionary kind");
    c.kind = static_cast<DictionaryKind>(kind);
    c.energy.q = r.f64();
    c.energy.min_dims = r.indices();
    c.max_iter = static_cast<int>(r.count());
    c.tol = r.f64();
    d.mean_patch = r.tensor();
    check(d.mean_patch.dims() == c.geometry.patch_dims, "mean patch does not match patch dims");

    auto& m = d.model;
    m.input_dims = r.shape();
    m.output_dims = r.shape();
    const Shape expected_input =
        c.kind == DictionaryKind::VectorPca ? Shape{shape_volume(c.geometry.patch_dims)} : c.geometry.patch_dims;
    check(m.input_dims == expected_input, "dictionary input dims do not match the patch geometry");
    check(m.output_dims.size() == m.input_dims.size(), "dictionary output order mismatch");
    const auto factors = r.count();
    check(factors == m.input_dims.size(), "factor count mismatch");
    for (std::size_t n = 0; n < factors; ++n) {
        m.factors.push_back(r.matrix());
        check(m.factors.back().rows() == m.input_dims[n] && m.factors.back().cols() == m.output_dims[n] &&
                  m.output_dims[n] <= m.input_dims[n],
              "factor shape mismatch");
    }
    m.mean = r.tensor();
    check(m.mean.dims() == m.input_dims, "dictionary mean dims mismatch");
    const auto modes = r.count();
    check(modes == m.input_dims.size(), "eigenvalue mode count mismatch");
    for (std::size_t n = 0; n < modes; ++n) {
        m.mode_eigenvalues.push_back(r.reals());
        check(m.mode_eigenvalues.back().size() == m.input_dims[n], "eigenvalue count mismatch");
    }
    m.variance_order = r.indices();
    auto sorted = m.variance_order;
    std::sort(sorted.begin(), sorted.end());
    bool permutation = sorted.size() == m.core_size();
    for (std::size_t i = 0; permutation && i < sorted.size(); ++i) permutation = sorted[i] == i;
    check(permutation, "variance order is not a permutation of the core coordinates");
    check(c.encoders >= 1 && c.encoders <= m.core_size(), "encoder count exceeds the core size");
    m.captured_scatter = r.f64();
    return d;
}

}  // namespace

void write_network(std::ostream& os, const Network& net) {
    BinaryWriter w(os);
    w.bytes("MPCM");
    w.u8(kModelFileVersion);
    w.u8(static_cast<std::uint8_t>(net.architecture));
    w.shape(net.input_dims);
    w.count(net.feature_dim);
    w.count(net.layers.size());
    for (const auto& l : net.layers) write_layer(w, l);
    w.shape(net.pooling.box_dims);
    w.f64(net.pooling.overlap);
    w.u8(net.pooling.normalized ? 1 : 0);
}

Network read_network(std::istream& is) {
    BinaryReader r(is);
    r.expect_magic("MPCM", "model file");
    const auto version = r.u8();
    check(version == kModelFileVersion, "unsupported version " + std::to_string(version));
    const auto arch = r.u8();
    check(arch <= static_cast<std::uint8_t>(Architecture::Pcanet2), "unknown architecture tag");

    Network net;
    net.architecture = static_cast<Architecture>(arch);
    net.input_dims = r.shape();
    net.feature_dim = r.count();
    const auto layers = r.count();
    const auto kinds = architecture_layers(net.architecture);
    check(layers == kinds.size(), "layer count does not match the architecture");
    Shape source = net.input_dims;
    for (std::size_t k = 0; k < layers; ++k) {
        net.layers.push_back(read_layer(r));
        const auto& c = net.layers.back().config;
        check(c.kind == kinds[k], "dictionary kind does not match the architecture");
        check(c.geometry.source_dims == source, "layer source dims do not chain");
        source = c.geometry.grid_dims();
    }
    net.pooling.box_dims = r.shape();
    net.pooling.overlap = r.f64();
    const auto normalized = r.u8();
    check(normalized <= 1, "bad normalization flag");
    net.pooling.normalized = normalized == 1;

    std::size_t expected = 0;
    try {
        std::size_t parents = 1;
        for (std::size_t k = 0; k + 1 < layers; ++k) parents *= net.layers[k].config.encoders;
        const auto last_l = net.layers.back().config.encoders;
        check(last_l <= kMaxLastLayerEncoders, "last layer L too large");
        expected = (std::size_t{1} << last_l) * box_count(net.map_dims(), net.pooling) * parents;
    } catch (const ConfigError& e) {
        throw FormatError(std::string("model file: ") + e.what());
    }
    check(expected == net.feature_dim, "stored feature dimension is inconsistent");
    return net;
}

std::size_t ClassifierSection::predict(std::span<const double> f) const {
    return std::visit([&](const auto& m) { return mpcanet::predict(m, f); }, model);
}

std::string_view ClassifierSection::kind_name() const {
    return std::holds_alternative<LinearModel>(model) ? "ridge" : "nn1";
}

void write_model(std::ostream& os, const ModelFile& m) {
    write_network(os, m.network);
    if (!m.classifier) return;
    BinaryWriter w(os);
    const auto& c = *m.classifier;
    w.bytes("CLSF");
    w.u8(std::holds_alternative<LinearModel>(c.model) ? 0 : 1);
    w.count(c.label_names.size());
    for (const auto& l : c.label_names) w.string(l);
    if (const auto* lin = std::get_if<LinearModel>(&c.model)) {
        w.indices(lin->classes);
        w.matrix(lin->weights);
        w.reals(lin->bias);
    } else {
        const auto& nn = std::get<NearestNeighborModel>(c.model);
        w.matrix(nn.features);
        w.indices(nn.labels);
    }
}

ModelFile read_model(std::istream& is) {
    ModelFile m;
    m.network = read_network(is);
    BinaryReader r(is);
    if (r.at_end()) return m;
    r.expect_magic("CLSF", "classifier section");
    const auto kind = r.u8();
    check(kind <= 1, "unknown classifier kind");
    ClassifierSection c;
    const auto labels = r.count();
    for (std::size_t i = 0; i < labels; ++i) {
        const auto len = r.count();
        check(len <= kMaxLabelBytes, "label too long");
        c.label_names.push_back(r.bytes(len));
    }
    if (kind == 0) {
        LinearModel lin;
        lin.classes = r.indices();
        lin.weights = r.matrix();
        lin.bias = r.reals();
        check(lin.weights.rows() == lin.classes.size() && lin.bias.size() == lin.classes.size(),
              "ridge model shapes disagree");
        check(lin.weights.cols() == m.network.feature_dim, "ridge model feature dimension mismatch");
        for (auto k : lin.classes) check(k < labels, "class id without a label");
        c.model = std::move(lin);
    } else {
        NearestNeighborModel nn;
        nn.features = r.matrix();
        nn.labels = r.indices();
        check(nn.features.rows() == nn.labels.size(), "nearest-neighbour shapes disagree");
        check(nn.features.rows() > 0 && nn.features.cols() == m.network.feature_dim,
              "nearest-neighbour feature dimension mismatch");
        for (auto k : nn.labels) check(k < labels, "class id without a label");
        c.model = std::move(nn);
    }
    check(r.at_end(), "trailing bytes after classifier section");
    m.classifier = std::move(c);
    return m;
}

void write_model_file(const std::filesystem::path& path, const ModelFile& m) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open " + path.string() + " for writing");
    write_model(os, m);
    if (!os) throw DataError("failed writing " + path.string());
}

ModelFile read_model_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open model file " + path.string());
    return read_model(is);
}

}  // namespace mpcanet
