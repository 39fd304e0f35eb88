#include "mpcanet/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "mpcanet/error.hpp"

using json = nlohmann::json;

namespace mpcanet::cli {

std::string_view classifier_kind_name(ClassifierKind k) {
    return k == ClassifierKind::Ridge ? "ridge" : "nn1";
}

ClassifierKind parse_classifier_kind(std::string_view name) {
    if (name == "ridge") return ClassifierKind::Ridge;
    if (name == "nn1") return ClassifierKind::NearestNeighbor;
    throw ConfigError("unknown classifier '" + std::string(name) + "' (known: ridge, nn1)");
}

namespace {

std::size_t parse_size(std::string_view text, std::string_view what) {
    std::size_t v = 0;
    const auto* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || p != end || text.empty())
        throw ConfigError("bad " + std::string(what) + " '" + std::string(text) + "'");
    return v;
}

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> known) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
}

Shape json_dims(const json& v, std::string_view what) {
    auto dims = v.get<Shape>();
    if (dims.empty()) throw ConfigError(std::string(what) + " must not be empty");
    for (auto d : dims)
        if (d == 0) throw ConfigError(std::string(what) + " extents must be positive");
    return dims;
}

std::vector<std::size_t> from_one_based(const std::vector<std::size_t>& modes, std::string_view what) {
    std::vector<std::size_t> out;
    for (auto m : modes) {
        if (m == 0) throw ConfigError(std::string(what) + ": modes are numbered from 1");
        out.push_back(m - 1);
    }
    return out;
}

std::vector<std::size_t> to_one_based(const std::vector<std::size_t>& modes) {
    std::vector<std::size_t> out;
    for (auto m : modes) out.push_back(m + 1);
    return out;
}

Padding parse_padding(const std::string& s) {
    if (s == "same") return Padding::ZeroSame;
    if (s == "valid") return Padding::Valid;
    throw ConfigError("unknown padding '" + s + "' (known: same, valid)");
}

LayerRunConfig layer_from_json(const json& j, std::size_t index) {
    const std::string where = "layers[" + std::to_string(index) + "]";
    check_keys(j, where, {"patch", "slide_modes", "L", "energy", "min_dims", "padding"});
    LayerRunConfig l;
    if (j.contains("patch")) l.patch = json_dims(j.at("patch"), where + ".patch");
    if (j.contains("slide_modes"))
        l.slide_modes = from_one_based(j.at("slide_modes").get<std::vector<std::size_t>>(), where + ".slide_modes");
    if (j.contains("L")) l.encoders = j.at("L").get<std::size_t>();
    if (j.contains("energy")) l.energy = j.at("energy").get<double>();
    if (j.contains("min_dims")) l.min_dims = j.at("min_dims").get<std::vector<std::size_t>>();
    if (j.contains("padding")) l.padding = parse_padding(j.at("padding").get<std::string>());
    return l;
}

Shape box_from_json(const json& j) {
    if (j.is_array()) return json_dims(j, "pooling.box");
    check_keys(j, "pooling.box", {"unit", "multiple"});
    auto unit = json_dims(j.at("unit"), "pooling.box.unit");
    const auto k = j.at("multiple").get<std::size_t>();
    if (k == 0) throw ConfigError("pooling.box.multiple must be positive");
    for (auto& d : unit) d *= k;
    return unit;
}

}  // namespace

void RunConfig::validate() const {
    const auto stages = architecture_layers(architecture).size();
    if (layers.size() > stages) {
        throw ConfigError("architecture " + std::string(architecture_name(architecture)) + " has " +
                          std::to_string(stages) + " stage(s) but " + std::to_string(layers.size()) +
                          " layer configs were given");
    }
    for (std::size_t k = 0; k < layers.size(); ++k) {
        if (layers[k].encoders < 1) throw ConfigError("layer " + std::to_string(k + 1) + ": L must be at least 1");
        EnergyPolicy{layers[k].energy, layers[k].min_dims}.validate();
    }
    if (!(lambda > 0.0)) throw ConfigError("classifier lambda must be positive");
    if (!(overlap >= 0.0 && overlap < 1.0)) throw ConfigError("pooling overlap must lie in [0, 1)");
    if (splits < 1) throw ConfigError("splits must be at least 1");
    if (ratio && !(*ratio > 0.0 && *ratio < 1.0)) throw ConfigError("ratio must lie in (0, 1)");
    if (max_iter < 1) throw ConfigError("mpca.max_iter must be at least 1");
    if (!(tol >= 0.0)) throw ConfigError("mpca.tol must be non-negative");
    if (sweep_dims.empty()) throw ConfigError("sweep.dims must not be empty");
    for (auto d : sweep_dims)
        if (d < 1) throw ConfigError("sweep.dims entries must be positive");
    EnergyPolicy{sweep_energy, {}}.validate();
}

RunConfig config_from_json(const json& doc) {
    RunConfig c;
    try {
        check_keys(doc, "config",
                   {"architecture", "layers", "pooling", "classifier", "mpca", "seed", "splits", "ratio", "bench",
                    "sweep"});
        if (doc.contains("architecture")) c.architecture = parse_architecture(doc.at("architecture").get<std::string>());
        if (doc.contains("layers")) {
            const auto& layers = doc.at("layers");
            if (!layers.is_array()) throw ConfigError("layers must be an array");
            for (std::size_t i = 0; i < layers.size(); ++i) c.layers.push_back(layer_from_json(layers[i], i));
        }
        if (doc.contains("pooling")) {
            const auto& p = doc.at("pooling");
            check_keys(p, "pooling", {"box", "overlap", "normalized"});
            if (p.contains("box")) c.box = box_from_json(p.at("box"));
            if (p.contains("overlap")) c.overlap = p.at("overlap").get<double>();
            if (p.contains("normalized")) c.normalized = p.at("normalized").get<bool>();
        }
        if (doc.contains("classifier")) {
            const auto& k = doc.at("classifier");
            check_keys(k, "classifier", {"kind", "lambda"});
            if (k.contains("kind")) c.classifier = parse_classifier_kind(k.at("kind").get<std::string>());
            if (k.contains("lambda")) c.lambda = k.at("lambda").get<double>();
        }
        if (doc.contains("mpca")) {
            const auto& m = doc.at("mpca");
            check_keys(m, "mpca", {"max_iter", "tol"});
            if (m.contains("max_iter")) c.max_iter = m.at("max_iter").get<int>();
            if (m.contains("tol")) c.tol = m.at("tol").get<double>();
        }
        if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("splits")) c.splits = doc.at("splits").get<std::size_t>();
        if (doc.contains("ratio") && !doc.at("ratio").is_null()) c.ratio = doc.at("ratio").get<double>();
        if (doc.contains("bench")) {
            const auto& b = doc.at("bench");
            check_keys(b, "bench", {"patch_sizes"});
            if (b.contains("patch_sizes"))
                for (const auto& p : b.at("patch_sizes")) c.bench_patches.push_back(json_dims(p, "bench.patch_sizes"));
        }
        if (doc.contains("sweep")) {
            const auto& s = doc.at("sweep");
            check_keys(s, "sweep", {"dims", "energy"});
            if (s.contains("dims")) c.sweep_dims = s.at("dims").get<std::vector<std::size_t>>();
            if (s.contains("energy")) c.sweep_energy = s.at("energy").get<double>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return config_from_json(doc);
}

json config_to_json(const RunConfig& c) {
    json doc;
    doc["architecture"] = std::string(architecture_name(c.architecture));
    doc["layers"] = json::array();
    for (const auto& l : c.layers) {
        json j;
        if (l.patch) j["patch"] = *l.patch;
        if (l.slide_modes) j["slide_modes"] = to_one_based(*l.slide_modes);
        j["L"] = l.encoders;
        j["energy"] = l.energy;
        if (!l.min_dims.empty()) j["min_dims"] = l.min_dims;
        j["padding"] = l.padding == Padding::ZeroSame ? "same" : "valid";
        doc["layers"].push_back(j);
    }
    json pooling;
    if (c.box) pooling["box"] = *c.box;
    pooling["overlap"] = c.overlap;
    pooling["normalized"] = c.normalized;
    doc["pooling"] = pooling;
    doc["classifier"] = {{"kind", std::string(classifier_kind_name(c.classifier))}, {"lambda", c.lambda}};
    doc["mpca"] = {{"max_iter", c.max_iter}, {"tol", c.tol}};
    doc["seed"] = c.seed;
    doc["splits"] = c.splits;
    doc["ratio"] = c.ratio ? json(*c.ratio) : json(nullptr);
    if (!c.bench_patches.empty()) doc["bench"] = {{"patch_sizes", c.bench_patches}};
    doc["sweep"] = {{"dims", c.sweep_dims}, {"energy", c.sweep_energy}};
    return doc;
}

Shape parse_dims(std::string_view text) {
    Shape dims;
    std::size_t start = 0;
    while (true) {
        const auto x = text.find('x', start);
        const auto part = text.substr(start, x == std::string_view::npos ? std::string_view::npos : x - start);
        const auto d = parse_size(part, "dims");
        if (d == 0) throw ConfigError("dims '" + std::string(text) + "' contain a zero extent");
        dims.push_back(d);
        if (x == std::string_view::npos) break;
        start = x + 1;
    }
    return dims;
}

std::string dims_to_string(const Shape& dims) {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(dims[i]);
    }
    return s;
}

Shape parse_box(std::string_view text) {
    const auto star = text.find('*');
    if (star == std::string_view::npos) return parse_dims(text);
    auto unit = parse_dims(text.substr(0, star));
    const auto k = parse_size(text.substr(star + 1), "box multiple");
    if (k == 0) throw ConfigError("box multiple must be positive");
    for (auto& d : unit) d *= k;
    return unit;
}

namespace {

Shape default_patch(const Shape& source) {
    Shape p = source;
    for (std::size_t n = 0; n < p.size() && n < 2; ++n) p[n] = std::min<std::size_t>(3, source[n]);
    return p;
}

}  // namespace

NetworkConfig resolve_network(const RunConfig& cfg, const Shape& input_dims, const Shape* first_patch) {
    cfg.validate();
    const auto stages = architecture_layers(cfg.architecture).size();
    NetworkConfig nc;
    nc.architecture = cfg.architecture;
    Shape source = input_dims;
    for (std::size_t k = 0; k < stages; ++k) {
        const LayerRunConfig lr = k < cfg.layers.size() ? cfg.layers[k] : LayerRunConfig{};
        LayerSpec spec;
        if (k == 0 && first_patch) {
            spec.patch_dims = *first_patch;
        } else {
            spec.patch_dims = lr.patch ? *lr.patch : default_patch(source);
        }
        spec.slide_modes = lr.slide_modes;
        spec.padding = lr.padding;
        spec.encoders = lr.encoders;
        spec.energy = EnergyPolicy{lr.energy, lr.min_dims};
        spec.max_iter = cfg.max_iter;
        spec.tol = cfg.tol;

        PatchGeometry g = spec.slide_modes ? PatchGeometry{source, spec.patch_dims, *spec.slide_modes, spec.padding}
                                           : PatchGeometry::covering(source, spec.patch_dims, spec.padding);
        try {
            g.validate();
        } catch (const ConfigError& e) {
            throw ConfigError("layer " + std::to_string(k + 1) + ": " + e.what());
        }
        source = g.grid_dims();
        nc.layers.push_back(std::move(spec));
    }
    if (cfg.box) {
        nc.pooling.box_dims = *cfg.box;
    } else {
        nc.pooling.box_dims = source;
        for (auto& d : nc.pooling.box_dims) d = std::min<std::size_t>(4, d);
    }
    nc.pooling.overlap = cfg.overlap;
    nc.pooling.normalized = cfg.normalized;
    plan_network(input_dims, nc);
    return nc;
}

}  // namespace mpcanet::cli
