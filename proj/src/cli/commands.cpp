#include "mpcanet/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpcanet/error.hpp"
#include "mpcanet/mpca.hpp"

using json = nlohmann::json;

namespace mpcanet::cli {

namespace {

std::string fmt(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string stage_patches(const NetworkConfig& nc) {
    std::string s;
    for (std::size_t k = 0; k < nc.layers.size(); ++k) {
        if (k) s += '+';
        s += dims_to_string(nc.layers[k].patch_dims);
    }
    return s;
}

std::string stage_encoders(const NetworkConfig& nc) {
    std::string s;
    for (std::size_t k = 0; k < nc.layers.size(); ++k) {
        if (k) s += '-';
        s += std::to_string(nc.layers[k].encoders);
    }
    return s;
}

void require_samples(const Dataset& ds, std::string_view what) {
    if (ds.size() == 0) throw DataError(std::string(what) + ": the manifest has no entries");
}

ModelFile train_resolved(const NetworkConfig& nc, const RunConfig& cfg, const Dataset& ds) {
    ModelFile m;
    m.network = train_network(ds.tensors, nc);
    const auto features = extract_features(m.network, ds.tensors);
    ClassifierSection c;
    c.label_names = ds.label_names;
    if (cfg.classifier == ClassifierKind::Ridge) {
        c.model = fit_ridge_ovr(features, ds.labels, cfg.lambda);
    } else {
        c.model = fit_nearest_neighbor(features, ds.labels);
    }
    m.classifier = std::move(c);
    return m;
}

std::vector<std::size_t> predict_all(const ModelFile& m, const Dataset& ds) {
    std::vector<std::size_t> out;
    out.reserve(ds.size());
    for (const auto& t : ds.tensors) out.push_back(m.classifier->predict(forward(m.network, t)));
    return out;
}

}  // namespace

ModelFile train_model(const RunConfig& cfg, const Dataset& ds, const Shape* first_patch) {
    require_samples(ds, "train");
    const auto nc = resolve_network(cfg, ds.tensors.front().dims(), first_patch);
    return train_resolved(nc, cfg, ds);
}

Evaluation evaluate_model(const ModelFile& model, const Dataset& ds) {
    if (!model.classifier) throw DataError("model file has no classifier section");
    require_samples(ds, "eval");
    const auto& names = model.classifier->label_names;
    std::vector<std::size_t> truth;
    for (auto id : ds.labels) {
        const auto& name = ds.label_names.at(id);
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw DataError("label '" + name + "' is unknown to the model");
        truth.push_back(static_cast<std::size_t>(it - names.begin()));
    }
    return evaluate(predict_all(model, ds), truth, names.size());
}

BenchResult run_bench(const RunConfig& cfg, const Dataset& ds) {
    require_samples(ds, "bench");
    const double ratio = cfg.ratio.value_or(0.5);
    const Shape dims = ds.tensors.front().dims();

    // Every configuration is checked before any training starts.
    std::vector<NetworkConfig> configs;
    if (cfg.bench_patches.empty()) {
        configs.push_back(resolve_network(cfg, dims));
    } else {
        for (const auto& p : cfg.bench_patches) configs.push_back(resolve_network(cfg, dims, &p));
    }

    BenchResult result;
    for (const auto& nc : configs) {
        BenchSummary summary{std::string(architecture_name(nc.architecture)), stage_patches(nc), stage_encoders(nc),
                             dims_to_string(nc.pooling.box_dims), cfg.splits, 0.0, 0.0};
        std::vector<double> accs;
        for (std::size_t s = 0; s < cfg.splits; ++s) {
            const auto split = stratified_split(ds.labels, ratio, cfg.seed + s);
            const auto train = ds.subset(split.train);
            const auto test = ds.subset(split.test);
            const auto model = train_resolved(nc, cfg, train);
            const auto eval = evaluate(predict_all(model, test), test.labels, ds.num_classes());
            accs.push_back(eval.accuracy);
            result.rows.push_back({summary.architecture, summary.patch, summary.encoders, summary.box, s, eval.accuracy});
        }
        double sum = 0.0;
        for (auto a : accs) sum += a;
        summary.mean = sum / static_cast<double>(accs.size());
        if (accs.size() > 1) {
            double ss = 0.0;
            for (auto a : accs) ss += (a - summary.mean) * (a - summary.mean);
            summary.stddev = std::sqrt(ss / static_cast<double>(accs.size() - 1));
        }
        result.summaries.push_back(summary);
    }
    return result;
}

SweepResult run_mpca_lda_sweep(const RunConfig& cfg, const Dataset& ds) {
    cfg.validate();
    require_samples(ds, "sweep-mpca-lda");
    const std::size_t classes = ds.num_classes();
    if (classes < 2) throw DataError("sweep-mpca-lda: need at least 2 classes");
    const double ratio = cfg.ratio.value_or(0.5);

    std::vector<std::size_t> ds_list = cfg.sweep_dims;
    ds_list.push_back(classes - 1);
    std::sort(ds_list.begin(), ds_list.end());
    ds_list.erase(std::unique(ds_list.begin(), ds_list.end()), ds_list.end());

    std::map<std::size_t, std::vector<SweepRow>> by_d;
    for (std::size_t s = 0; s < cfg.splits; ++s) {
        const auto split = stratified_split(ds.labels, ratio, cfg.seed + s);
        const auto train = ds.subset(split.train);
        const auto test = ds.subset(split.test);

        MpcaFitOptions opt;
        opt.energy = EnergyPolicy{cfg.sweep_energy, {}};
        opt.max_iter = cfg.max_iter;
        opt.tol = cfg.tol;
        auto model = fit_mpca(train.tensors, opt);
        compute_variance_order(model, train.tensors);
        const std::size_t available = model.core_size();

        auto vectors = [&](const Dataset& part) {
            DenseMatrix f(part.size(), available);
            for (std::size_t i = 0; i < part.size(); ++i) {
                const auto v = vectorize_core(model, project(model, part.tensors[i]));
                std::copy(v.begin(), v.end(), f.row(i).begin());
            }
            return f;
        };
        const auto train_f = vectors(train);
        const auto test_f = vectors(test);

        for (auto d : ds_list) {
            SweepRow row{d, s, available, d > available, 0.0};
            if (!row.skipped) {
                DenseMatrix x(train_f.rows(), d);
                for (std::size_t i = 0; i < x.rows(); ++i)
                    std::copy_n(train_f.row(i).begin(), d, x.row(i).begin());
                const auto lda = fit_lda(x, train.labels, std::min(classes - 1, d));
                std::vector<std::size_t> preds;
                for (std::size_t i = 0; i < test_f.rows(); ++i)
                    preds.push_back(predict(lda, test_f.row(i).first(d)));
                row.accuracy = evaluate(preds, test.labels, classes).accuracy;
            }
            by_d[d].push_back(row);
        }
    }

    SweepResult result;
    bool have_best = false;
    for (auto& [d, rows] : by_d) {
        bool complete = true;
        double sum = 0.0;
        for (const auto& r : rows) {
            complete = complete && !r.skipped;
            sum += r.accuracy;
        }
        const double mean = sum / static_cast<double>(rows.size());
        if (complete && (!have_best || mean > result.best_mean)) {
            result.best_d = d;
            result.best_mean = mean;
            have_best = true;
        }
        result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    }
    return result;
}

// ---------------------------------------------------------------- CLI

namespace {

struct Options {
    std::string config_path;
    std::string data;
    std::string model;
    std::string out;
    std::string csv;
    bool json_out = false;

    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> splits;
    std::optional<double> ratio;
    std::optional<std::string> arch;
    std::optional<std::string> patch;
    std::optional<std::size_t> encoders;
    std::optional<double> energy;
    std::optional<std::string> box;
    std::optional<double> overlap;
    bool normalized = false;
    std::optional<std::string> classifier;
    std::optional<double> lambda;
    std::optional<std::string> patch_sizes;
    std::optional<std::string> lda_dims;
    std::optional<double> sweep_energy;

    std::string synth_dims = "16x16x8";
    std::size_t synth_classes = 4;
    std::size_t synth_per_class = 20;
    std::string synth_rank = "2";
    double synth_sigma = 0.05;
};

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) parts.push_back(item);
    if (parts.empty()) throw ConfigError("empty list '" + s + "'");
    return parts;
}

RunConfig effective_config(const Options& o) {
    RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (o.arch) c.architecture = parse_architecture(*o.arch);
    const auto stages = architecture_layers(c.architecture).size();
    auto per_stage = [&] {
        if (c.layers.size() < stages) c.layers.resize(stages);
    };
    if (o.patch) {
        const auto parts = split_list(*o.patch, ',');
        if (parts.size() > stages) throw ConfigError("--patch lists more stages than the architecture has");
        per_stage();
        for (std::size_t k = 0; k < parts.size(); ++k) c.layers[k].patch = parse_dims(parts[k]);
    }
    if (o.encoders) {
        per_stage();
        for (auto& l : c.layers) l.encoders = *o.encoders;
    }
    if (o.energy) {
        per_stage();
        for (auto& l : c.layers) l.energy = *o.energy;
    }
    if (o.box) c.box = parse_box(*o.box);
    if (o.overlap) c.overlap = *o.overlap;
    if (o.normalized) c.normalized = true;
    if (o.classifier) c.classifier = parse_classifier_kind(*o.classifier);
    if (o.lambda) c.lambda = *o.lambda;
    if (o.seed) c.seed = *o.seed;
    if (o.splits) c.splits = *o.splits;
    if (o.ratio) c.ratio = *o.ratio;
    if (o.patch_sizes) {
        c.bench_patches.clear();
        for (const auto& p : split_list(*o.patch_sizes, ',')) c.bench_patches.push_back(parse_dims(p));
    }
    if (o.lda_dims) {
        c.sweep_dims.clear();
        for (const auto& d : split_list(*o.lda_dims, ',')) {
            const auto v = parse_dims(d);
            if (v.size() != 1) throw ConfigError("--lda-dims takes a comma-separated list of integers");
            c.sweep_dims.push_back(v.front());
        }
    }
    if (o.sweep_energy) c.sweep_energy = *o.sweep_energy;
    c.validate();
    return c;
}

struct CsvSink {
    std::ofstream file;
    std::ostream* os = nullptr;

    CsvSink(const std::string& path, std::ostream& out) {
        if (path == "-") {
            os = &out;
            return;
        }
        file.open(path, std::ios::trunc);
        if (!file) throw DataError("cannot open " + path + " for writing");
        os = &file;
    }
};

json layer_json(const LayerDictionary& l) {
    const auto& g = l.config.geometry;
    std::vector<std::size_t> slide;
    for (auto m : g.slide_modes) slide.push_back(m + 1);
    return {{"kind", std::string(dictionary_kind_name(l.config.kind))},
            {"patch", g.patch_dims},
            {"slide_modes", slide},
            {"padding", g.padding == Padding::ZeroSame ? "same" : "valid"},
            {"grid", g.grid_dims()},
            {"L", l.config.encoders},
            {"dictionary_input", l.model.input_dims},
            {"P", l.model.output_dims}};
}

std::string layer_line(std::size_t k, const LayerDictionary& l) {
    const auto& g = l.config.geometry;
    std::string slide;
    for (auto m : g.slide_modes) slide += (slide.empty() ? "" : ",") + std::to_string(m + 1);
    return "layer " + std::to_string(k + 1) + ": " + std::string(dictionary_kind_name(l.config.kind)) + " patch " +
           dims_to_string(g.patch_dims) + " slide [" + slide + "] grid " + dims_to_string(g.grid_dims()) +
           " dictionary " + dims_to_string(l.model.input_dims) + " -> " + dims_to_string(l.model.output_dims) +
           " L " + std::to_string(l.config.encoders);
}

int cmd_train(const Options& o, std::ostream& out) {
    const auto cfg = effective_config(o);
    auto ds = load_dataset(o.data);
    require_samples(ds, "train");
    if (cfg.ratio) ds = ds.subset(stratified_split(ds.labels, *cfg.ratio, cfg.seed).train);
    const auto model = train_model(cfg, ds);
    write_model_file(o.model, model);

    const auto& net = model.network;
    if (o.json_out) {
        json layers = json::array();
        for (const auto& l : net.layers) layers.push_back(layer_json(l));
        json doc{{"config", config_to_json(cfg)},
                 {"samples", ds.size()},
                 {"architecture", std::string(architecture_name(net.architecture))},
                 {"layers", layers},
                 {"feature_dim", net.feature_dim},
                 {"model", o.model}};
        out << doc.dump(2) << '\n';
        return 0;
    }
    out << "config: " << config_to_json(cfg).dump() << '\n';
    out << "samples: " << ds.size() << '\n';
    out << "architecture: " << architecture_name(net.architecture) << '\n';
    for (std::size_t k = 0; k < net.layers.size(); ++k) out << layer_line(k, net.layers[k]) << '\n';
    out << "feature_dim: " << net.feature_dim << '\n';
    out << "model: " << o.model << '\n';
    return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
    const auto model = read_model_file(o.model);
    const auto ds = load_dataset(o.data);
    const auto e = evaluate_model(model, ds);
    const auto& names = model.classifier->label_names;
    const json echo{{"model", o.model}, {"data", o.data}};
    if (o.json_out) {
        json doc{{"config", echo},
                 {"samples", ds.size()},
                 {"labels", names},
                 {"accuracy", e.accuracy},
                 {"confusion", e.confusion}};
        out << doc.dump(2) << '\n';
        return 0;
    }
    out << "config: " << echo.dump() << '\n';
    out << "samples: " << ds.size() << '\n';
    out << "accuracy: " << fmt(e.accuracy) << '\n';
    out << "confusion (rows true, columns predicted):\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
        out << "  " << names[i] << ':';
        for (auto v : e.confusion[i]) out << ' ' << v;
        out << '\n';
    }
    return 0;
}

int cmd_bench(const Options& o, std::ostream& out) {
    const auto cfg = effective_config(o);
    const auto ds = load_dataset(o.data);
    const auto r = run_bench(cfg, ds);
    const auto echo = config_to_json(cfg);

    if (!o.csv.empty()) {
        CsvSink sink(o.csv, out);
        auto& os = *sink.os;
        os << "# config: " << echo.dump() << '\n';
        os << "architecture,patch,L,box,split,accuracy\n";
        for (std::size_t c = 0; c < r.summaries.size(); ++c) {
            const auto& s = r.summaries[c];
            for (std::size_t k = 0; k < s.splits; ++k) {
                const auto& row = r.rows[c * s.splits + k];
                os << row.architecture << ',' << row.patch << ',' << row.encoders << ',' << row.box << ','
                   << row.split << ',' << fmt(row.accuracy) << '\n';
            }
            os << s.architecture << ',' << s.patch << ',' << s.encoders << ',' << s.box << ",mean," << fmt(s.mean)
               << '\n';
        }
        if (o.csv == "-") return 0;
    }
    if (o.json_out) {
        json rows = json::array();
        for (const auto& row : r.rows)
            rows.push_back({{"architecture", row.architecture},
                            {"patch", row.patch},
                            {"L", row.encoders},
                            {"box", row.box},
                            {"split", row.split},
                            {"accuracy", row.accuracy}});
        json summaries = json::array();
        for (const auto& s : r.summaries)
            summaries.push_back({{"architecture", s.architecture},
                                 {"patch", s.patch},
                                 {"L", s.encoders},
                                 {"box", s.box},
                                 {"splits", s.splits},
                                 {"mean", s.mean},
                                 {"stddev", s.stddev}});
        out << json{{"config", echo}, {"rows", rows}, {"summaries", summaries}}.dump(2) << '\n';
        return 0;
    }
    out << "config: " << echo.dump() << '\n';
    for (const auto& row : r.rows)
        out << row.architecture << " patch " << row.patch << " L " << row.encoders << " box " << row.box
            << " split " << row.split << " accuracy " << fmt(row.accuracy) << '\n';
    for (const auto& s : r.summaries)
        out << s.architecture << " patch " << s.patch << " L " << s.encoders << " box " << s.box << " mean "
            << fmt(s.mean) << " stddev " << fmt(s.stddev) << " over " << s.splits << " split(s)\n";
    return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
    const auto cfg = effective_config(o);
    const auto ds = load_dataset(o.data);
    const auto r = run_mpca_lda_sweep(cfg, ds);
    const auto echo = config_to_json(cfg);

    if (!o.csv.empty()) {
        CsvSink sink(o.csv, out);
        auto& os = *sink.os;
        os << "# config: " << echo.dump() << '\n';
        os << "d,split,available,status,accuracy\n";
        for (const auto& row : r.rows) {
            os << row.d << ',' << row.split << ',' << row.available << ',' << (row.skipped ? "skipped" : "ok") << ','
               << (row.skipped ? "" : fmt(row.accuracy)) << '\n';
        }
        if (o.csv == "-") return 0;
    }
    if (o.json_out) {
        json rows = json::array();
        for (const auto& row : r.rows) {
            rows.push_back({{"d", row.d},
                            {"split", row.split},
                            {"available", row.available},
                            {"status", row.skipped ? "skipped" : "ok"},
                            {"accuracy", row.skipped ? json(nullptr) : json(row.accuracy)}});
        }
        out << json{{"config", echo}, {"rows", rows}, {"best_d", r.best_d}, {"best_mean", r.best_mean}}.dump(2)
            << '\n';
        return 0;
    }
    out << "config: " << echo.dump() << '\n';
    for (const auto& row : r.rows) {
        out << "d " << row.d << " split " << row.split << ' ';
        if (row.skipped) {
            out << "skipped (" << row.available << " coordinates available)\n";
        } else {
            out << "accuracy " << fmt(row.accuracy) << '\n';
        }
    }
    out << "best: d " << r.best_d << " mean accuracy " << fmt(r.best_mean) << '\n';
    return 0;
}

int cmd_synth(const Options& o, std::ostream& out) {
    SynthSpec spec;
    spec.dims = parse_dims(o.synth_dims);
    spec.num_classes = o.synth_classes;
    spec.samples_per_class = o.synth_per_class;
    spec.template_rank = parse_dims(o.synth_rank);
    spec.noise_sigma = o.synth_sigma;
    spec.seed = o.seed.value_or(0);
    spec.validate();
    const auto ds = synth_generate(spec);
    write_dataset(ds, o.out);

    const json echo{{"dims", spec.dims},        {"classes", spec.num_classes}, {"per_class", spec.samples_per_class},
                    {"rank", spec.template_rank}, {"sigma", spec.noise_sigma},   {"seed", spec.seed},
                    {"out", o.out}};
    if (o.json_out) {
        out << json{{"config", echo}, {"samples", ds.size()}, {"manifest", o.out + "/manifest.json"}}.dump(2) << '\n';
        return 0;
    }
    out << "config: " << echo.dump() << '\n';
    out << "wrote " << ds.size() << " tensors and manifest.json to " << o.out << '\n';
    return 0;
}

int cmd_inspect(const Options& o, std::ostream& out) {
    const auto model = read_model_file(o.model);
    const auto& net = model.network;

    // Per mode: each eigenvalue's share of the mode's total energy.
    auto energy_ratios = [](const std::vector<double>& eig) {
        double total = 0.0;
        for (auto v : eig) total += std::max(v, 0.0);
        std::vector<double> r;
        for (auto v : eig) r.push_back(total > 0.0 ? std::max(v, 0.0) / total : 0.0);
        return r;
    };

    const json echo{{"model", o.model}};
    if (o.json_out) {
        json layers = json::array();
        for (const auto& l : net.layers) {
            auto j = layer_json(l);
            json curves = json::array();
            for (const auto& e : l.model.mode_eigenvalues) curves.push_back(energy_ratios(e));
            j["energy_ratios"] = curves;
            layers.push_back(j);
        }
        json doc{{"config", echo},
                 {"architecture", std::string(architecture_name(net.architecture))},
                 {"input_dims", net.input_dims},
                 {"layers", layers},
                 {"pooling",
                  {{"box", net.pooling.box_dims}, {"overlap", net.pooling.overlap}, {"normalized", net.pooling.normalized}}},
                 {"feature_dim", net.feature_dim}};
        if (model.classifier) {
            doc["classifier"] = {{"kind", std::string(model.classifier->kind_name())},
                                 {"labels", model.classifier->label_names}};
        }
        out << doc.dump(2) << '\n';
        return 0;
    }
    out << "config: " << echo.dump() << '\n';
    out << "architecture: " << architecture_name(net.architecture) << '\n';
    out << "input_dims: " << dims_to_string(net.input_dims) << '\n';
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const auto& l = net.layers[k];
        out << layer_line(k, l) << '\n';
        for (std::size_t n = 0; n < l.model.mode_eigenvalues.size(); ++n) {
            out << "  mode " << n + 1 << " P " << l.model.output_dims[n] << " energy";
            for (auto r : energy_ratios(l.model.mode_eigenvalues[n])) out << ' ' << fmt(r);
            out << '\n';
        }
    }
    out << "pooling: box " << dims_to_string(net.pooling.box_dims) << " overlap " << fmt(net.pooling.overlap)
        << (net.pooling.normalized ? " normalized" : "") << '\n';
    if (model.classifier) {
        out << "classifier: " << model.classifier->kind_name() << " over " << model.classifier->label_names.size()
            << " labels\n";
    }
    out << "feature_dim: " << net.feature_dim << '\n';
    return 0;
}

void add_run_options(CLI::App* c, Options& o) {
    c->add_option("--config", o.config_path, "JSON run config")->check(CLI::ExistingFile);
    c->add_option("--data", o.data, "dataset manifest")->required();
    c->add_option("--seed", o.seed, "split seed (base seed for bench)");
    c->add_option("--ratio", o.ratio, "training fraction per class");
    c->add_option("--arch", o.arch, "mpcanet1, mpcanet2-vector, mpcanet2-cuboid, pcanet1 or pcanet2");
    c->add_option("--patch", o.patch, "patch dims per stage, e.g. 3x3x8 or 3x3x8,3x3");
    c->add_option("--L", o.encoders, "encoders per stage");
    c->add_option("--energy", o.energy, "retained energy Q per stage");
    c->add_option("--box", o.box, "pooling box, e.g. 16x10 or 8x5*2");
    c->add_option("--overlap", o.overlap, "box overlap fraction");
    c->add_flag("--normalized", o.normalized, "divide histograms by box volume");
    c->add_option("--classifier", o.classifier, "ridge or nn1");
    c->add_option("--lambda", o.lambda, "ridge regularization");
    c->add_flag("--json", o.json_out, "machine-readable output");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tensor feature learning with MPCA and MPCANet", "mpcanet"};
    app.require_subcommand(1, 1);
    Options o;

    auto* train = app.add_subcommand("train", "train a network and classifier");
    add_run_options(train, o);
    train->add_option("--model,--out", o.model, "model file to write")->required();

    auto* eval = app.add_subcommand("eval", "evaluate a model on a manifest");
    eval->add_option("--model", o.model, "model file")->required();
    eval->add_option("--data", o.data, "dataset manifest")->required();
    eval->add_flag("--json", o.json_out, "machine-readable output");

    auto* bench = app.add_subcommand("bench", "train and evaluate over random splits");
    add_run_options(bench, o);
    bench->add_option("--splits", o.splits, "number of splits");
    bench->add_option("--patch-sizes", o.patch_sizes, "first-stage patch sweep, e.g. 3x3x20,5x5x20,7x7x20");
    bench->add_option("--csv", o.csv, "CSV output path, - for stdout");

    auto* sweep = app.add_subcommand("sweep-mpca-lda", "MPCA feature length versus LDA accuracy");
    sweep->add_option("--config", o.config_path, "JSON run config")->check(CLI::ExistingFile);
    sweep->add_option("--data", o.data, "dataset manifest")->required();
    sweep->add_option("--seed", o.seed, "base split seed");
    sweep->add_option("--splits", o.splits, "number of splits");
    sweep->add_option("--ratio", o.ratio, "training fraction per class");
    sweep->add_option("--lda-dims", o.lda_dims, "feature lengths, e.g. 10,20,30");
    sweep->add_option("--energy", o.sweep_energy, "retained energy Q of the MPCA step");
    sweep->add_option("--csv", o.csv, "CSV output path, - for stdout");
    sweep->add_flag("--json", o.json_out, "machine-readable output");

    auto* synth = app.add_subcommand("synth", "generate a synthetic low-rank tensor dataset");
    synth->add_option("--out", o.out, "output directory")->required();
    synth->add_option("--dims", o.synth_dims, "tensor dims")->capture_default_str();
    synth->add_option("--classes", o.synth_classes, "number of classes")->capture_default_str();
    synth->add_option("--per-class", o.synth_per_class, "samples per class")->capture_default_str();
    synth->add_option("--rank", o.synth_rank, "template rank, one value or per mode")->capture_default_str();
    synth->add_option("--sigma", o.synth_sigma, "noise standard deviation")->capture_default_str();
    synth->add_option("--seed", o.seed, "generator seed");
    synth->add_flag("--json", o.json_out, "machine-readable output");

    auto* inspect = app.add_subcommand("inspect", "describe a model file");
    inspect->add_option("--model", o.model, "model file")->required();
    inspect->add_flag("--json", o.json_out, "machine-readable output");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ErrorKind::Config);
    }

    try {
        if (*train) return cmd_train(o, out);
        if (*eval) return cmd_eval(o, out);
        if (*bench) return cmd_bench(o, out);
        if (*sweep) return cmd_sweep(o, out);
        if (*synth) return cmd_synth(o, out);
        return cmd_inspect(o, out);
    } catch (const Error& e) {
        static constexpr const char* names[] = {"", "", "config", "data", "numeric"};
        err << "error (" << names[static_cast<int>(e.kind())] << "): " << e.what() << '\n';
        return static_cast<int>(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error (data): " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Data);
    }
}

}  // namespace mpcanet::cli
