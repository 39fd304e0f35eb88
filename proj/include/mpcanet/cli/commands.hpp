#pragma once

// Command implementations behind the mpcanet executable. The run_* functions
// do the work and return plain results; run_cli parses arguments, prints and
// maps errors to exit codes (0 ok, 2 usage/config, 3 data, 4 numeric).

#include <iosfwd>
#include <string>
#include <vector>

#include "mpcanet/classifier.hpp"
#include "mpcanet/cli/config.hpp"
#include "mpcanet/dataset.hpp"
#include "mpcanet/model_io.hpp"

namespace mpcanet::cli {

/// Network plus classifier trained on every sample of `ds`.
ModelFile train_model(const RunConfig& cfg, const Dataset& ds, const Shape* first_patch = nullptr);

/// Class ids follow the model's label names; unknown labels are a DataError.
Evaluation evaluate_model(const ModelFile& model, const Dataset& ds);

struct BenchRow {
    std::string architecture;
    std::string patch;
    std::string encoders;  // per stage, "8" or "8-8"
    std::string box;
    std::size_t split = 0;
    double accuracy = 0.0;
};

struct BenchSummary {
    std::string architecture;
    std::string patch;
    std::string encoders;
    std::string box;
    std::size_t splits = 0;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single split
};

struct BenchResult {
    std::vector<BenchRow> rows;  // config-major, then split index
    std::vector<BenchSummary> summaries;
};

/// Split s uses seed cfg.seed + s and ratio cfg.ratio (default 0.5). With
/// cfg.bench_patches set, every first-stage patch size is run.
BenchResult run_bench(const RunConfig& cfg, const Dataset& ds);

struct SweepRow {
    std::size_t d = 0;
    std::size_t split = 0;
    std::size_t available = 0;  // MPCA core coordinates on this split
    bool skipped = false;
    double accuracy = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // d ascending, then split index
    std::size_t best_d = 0;
    double best_mean = 0.0;
};

/// MPCA on whole tensors, features ordered by variance, truncated to each d
/// in cfg.sweep_dims plus numClasses - 1, then LDA with min(numClasses - 1, d)
/// directions.
SweepResult run_mpca_lda_sweep(const RunConfig& cfg, const Dataset& ds);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpcanet::cli
