#include "mpcanet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

#include "mpcanet/binary_io.hpp"
#include "mpcanet/error.hpp"
#include "mpcanet/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace mpcanet {

// ---------------------------------------------------------------- tensor files

void write_tensor(std::ostream& os, const DenseTensor& t) {
    if (t.order() > 255) throw FormatError("tensor order does not fit the file header");
    BinaryWriter w(os);
    w.bytes("TOBJ");
    w.u8(kTensorFileVersion);
    w.u8(static_cast<std::uint8_t>(t.order()));
    for (auto d : t.dims()) w.count(d);
    for (auto v : t.data()) w.f64(v);
}

DenseTensor read_tensor(std::istream& is) {
    BinaryReader r(is);
    r.expect_magic("TOBJ", "tensor file");
    const auto version = r.u8();
    if (version != kTensorFileVersion)
        throw FormatError("unsupported tensor file version " + std::to_string(version));
    const auto order = r.u8();
    if (order == 0) throw FormatError("tensor file declares order 0");
    Shape dims(order);
    std::size_t volume = 1;
    for (auto& d : dims) {
        d = r.u32();
        if (d == 0) throw FormatError("tensor file declares a zero extent");
        if (volume > (std::size_t{1} << 36) / d) throw FormatError("tensor file extents overflow the element limit");
        volume *= d;
    }
    auto data = r.payload(volume);
    if (!r.at_end()) throw FormatError("trailing bytes after tensor payload");
    return DenseTensor(std::move(dims), std::move(data));
}

void write_tensor_file(const fs::path& path, const DenseTensor& t) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open " + path.string() + " for writing");
    write_tensor(os, t);
    if (!os) throw DataError("failed writing " + path.string());
}

DenseTensor read_tensor_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open tensor file " + path.string());
    try {
        return read_tensor(is);
    } catch (const BadMagicError& e) {
        throw BadMagicError(path.string() + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------- manifests

DatasetManifest read_manifest(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open manifest " + path.string());
    DatasetManifest m;
    try {
        const json doc = json::parse(is);
        if (doc.contains("dims") && !doc.at("dims").is_null()) m.dims = doc.at("dims").get<Shape>();
        for (const auto& e : doc.at("entries")) m.entries.push_back({e.at("path").get<std::string>(), e.at("label").get<std::string>()});
    } catch (const json::exception& e) {
        throw DataError("malformed manifest " + path.string() + ": " + e.what());
    }
    return m;
}

void write_manifest(const fs::path& path, const DatasetManifest& m) {
    json doc;
    if (m.dims) doc["dims"] = *m.dims;
    doc["entries"] = json::array();
    for (const auto& e : m.entries) doc["entries"].push_back({{"path", e.path}, {"label", e.label}});
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot open " + path.string() + " for writing");
    os << doc.dump(2) << '\n';
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.label_names = label_names;
    for (auto i : indices) {
        out.tensors.push_back(tensors.at(i));
        out.labels.push_back(labels.at(i));
        if (!paths.empty()) out.paths.push_back(paths.at(i));
    }
    return out;
}

Dataset load_dataset(const fs::path& manifest_path) {
    const auto manifest = read_manifest(manifest_path);
    const fs::path base = manifest_path.parent_path();
    Dataset ds;
    std::map<std::string, std::size_t> ids;
    std::optional<Shape> dims = manifest.dims;
    for (const auto& e : manifest.entries) {
        const fs::path p = fs::path(e.path).is_absolute() ? fs::path(e.path) : base / e.path;
        if (!fs::exists(p)) throw DataError("missing tensor file " + p.string());
        DenseTensor t = read_tensor_file(p);
        if (dims && t.dims() != *dims) {
            throw DimensionError(p.string() + ": dims " + shape_to_string(t.dims()) + " do not match " +
                                 (manifest.dims ? "canonical dims " : "dataset dims ") + shape_to_string(*dims));
        }
        if (!dims) dims = t.dims();
        auto [it, inserted] = ids.try_emplace(e.label, ds.label_names.size());
        if (inserted) ds.label_names.push_back(e.label);
        ds.labels.push_back(it->second);
        ds.tensors.push_back(std::move(t));
        ds.paths.push_back(e.path);
    }
    return ds;
}

void write_dataset(const Dataset& ds, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create directory " + out_dir.string() + ": " + ec.message());
    DatasetManifest m;
    if (!ds.tensors.empty()) m.dims = ds.tensors.front().dims();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "sample_%05zu.tobj", i);
        write_tensor_file(out_dir / name, ds.tensors[i]);
        m.entries.push_back({name, ds.label_names.at(ds.labels[i])});
    }
    write_manifest(out_dir / "manifest.json", m);
}

// ---------------------------------------------------------------- splits

Split stratified_split(std::span<const std::size_t> labels, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

    Xoshiro256 rng(seed);
    Split split;
    bool ceil_next = true;
    for (auto& [label, idx] : members) {
        const std::size_t n = idx.size();
        if (n < 2) {
            throw DataError("class " + std::to_string(label) + " has " + std::to_string(n) +
                            " sample(s); splitting needs at least 2");
        }
        const double target = ratio * static_cast<double>(n);
        const double lo = std::floor(target);
        std::size_t k;
        if (target - lo == 0.5) {
            k = static_cast<std::size_t>(ceil_next ? lo + 1.0 : lo);
            ceil_next = !ceil_next;
        } else {
            k = static_cast<std::size_t>(std::round(target));
        }
        k = std::clamp<std::size_t>(k, 1, n - 1);

        for (std::size_t i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.below(i + 1)]);
        split.train.insert(split.train.end(), idx.begin(), idx.begin() + static_cast<long>(k));
        split.test.insert(split.test.end(), idx.begin() + static_cast<long>(k), idx.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

// ---------------------------------------------------------------- synthetic data

void SynthSpec::validate() const {
    if (dims.empty()) throw ConfigError("synth: dims are empty");
    for (auto d : dims)
        if (d < 1) throw ConfigError("synth: extents must be positive");
    if (num_classes < 1) throw ConfigError("synth: need at least one class");
    if (samples_per_class < 1) throw ConfigError("synth: need at least one sample per class");
    if (template_rank.size() != 1 && template_rank.size() != dims.size())
        throw ConfigError("synth: template rank needs one value or one per mode");
    for (std::size_t n = 0; n < dims.size(); ++n) {
        const auto r = rank_for(n);
        if (r < 1 || r > dims[n]) throw ConfigError("synth: template rank must lie in [1, extent] for every mode");
    }
    if (!(noise_sigma >= 0.0)) throw ConfigError("synth: noise sigma must be non-negative");
}

namespace {

// Modified Gram-Schmidt on the columns of a Gaussian matrix.
DenseMatrix random_orthonormal(Xoshiro256& rng, std::size_t rows, std::size_t cols) {
    DenseMatrix m(rows, cols);
    for (auto& v : m.data()) v = rng.normal();
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t prev = 0; prev < c; ++prev) {
            double dot = 0.0;
            for (std::size_t r = 0; r < rows; ++r) dot += m(r, c) * m(r, prev);
            for (std::size_t r = 0; r < rows; ++r) m(r, c) -= dot * m(r, prev);
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < rows; ++r) norm += m(r, c) * m(r, c);
        norm = std::sqrt(norm);
        if (norm < 1e-12) throw NumericError("synth: degenerate random factor");
        for (std::size_t r = 0; r < rows; ++r) m(r, c) /= norm;
    }
    return m;
}

}  // namespace

Dataset synth_generate(const SynthSpec& spec) {
    spec.validate();
    Xoshiro256 rng(spec.seed);
    const std::size_t order = spec.dims.size();

    Shape core_dims(order);
    for (std::size_t n = 0; n < order; ++n) core_dims[n] = spec.rank_for(n);
    const double scale = std::sqrt(static_cast<double>(shape_volume(spec.dims)) /
                                   static_cast<double>(shape_volume(core_dims)));

    std::vector<DenseTensor> templates;
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
        std::vector<DenseMatrix> factors;
        for (std::size_t n = 0; n < order; ++n) factors.push_back(random_orthonormal(rng, spec.dims[n], core_dims[n]));
        DenseTensor t(core_dims);
        for (auto& v : t.data()) v = scale * rng.normal();
        for (std::size_t n = 0; n < order; ++n) t = mode_multiply(t, factors[n], n);
        templates.push_back(std::move(t));
    }

    Dataset ds;
    for (std::size_t c = 0; c < spec.num_classes; ++c) ds.label_names.push_back("class_" + std::to_string(c));
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
        for (std::size_t s = 0; s < spec.samples_per_class; ++s) {
            DenseTensor x = templates[c];
            for (auto& v : x.data()) v += spec.noise_sigma * rng.normal();
            ds.tensors.push_back(std::move(x));
            ds.labels.push_back(c);
        }
    }
    return ds;
}

}  // namespace mpcanet
