#pragma once

// Tensor files, JSON dataset manifests, stratified splits and the synthetic
// low-rank tensor generator.
//
// Tensor file ("TOBJ"), all integers little-endian:
//   4 bytes  magic "TOBJ"
//   u8       version (1)
//   u8       order N (>= 1)
//   u32 x N  extents (each >= 1)
//   f64 x prod(extents)  payload, IEEE-754 binary64 little-endian, row-major

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpcanet/tensor.hpp"

namespace mpcanet {

inline constexpr std::uint8_t kTensorFileVersion = 1;

void write_tensor(std::ostream& os, const DenseTensor& t);
DenseTensor read_tensor(std::istream& is);
void write_tensor_file(const std::filesystem::path& path, const DenseTensor& t);
DenseTensor read_tensor_file(const std::filesystem::path& path);

struct ManifestEntry {
    std::string path;  // relative paths resolve against the manifest's directory
    std::string label;
};

struct DatasetManifest {
    std::optional<Shape> dims;
    std::vector<ManifestEntry> entries;
};

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& m);

struct Dataset {
    std::vector<DenseTensor> tensors;
    std::vector<std::size_t> labels;       // dense ids into label_names
    std::vector<std::string> label_names;  // first-appearance order
    std::vector<std::string> paths;        // empty for generated data

    std::size_t size() const { return tensors.size(); }
    std::size_t num_classes() const { return label_names.size(); }
    /// Same label table, selected samples in the given order.
    Dataset subset(std::span<const std::size_t> indices) const;
};

/// Loads every entry; all tensors must share dims (the manifest's canonical
/// dims when present). Errors name the offending path.
Dataset load_dataset(const std::filesystem::path& manifest_path);

/// Writes sample_NNNNN.tobj files and manifest.json into out_dir.
void write_dataset(const Dataset& ds, const std::filesystem::path& out_dir);

struct Split {
    std::vector<std::size_t> train;  // ascending
    std::vector<std::size_t> test;   // ascending
};

/// Stratified split. Class c (ascending id) sends round(ratio * n_c) samples
/// to train, with exact .5 ties alternating ceil, floor, ceil, ... across
/// classes, clamped to [1, n_c - 1]. Members are Fisher-Yates shuffled by
/// one Xoshiro256 stream seeded with `seed`, classes in ascending order.
Split stratified_split(std::span<const std::size_t> labels, double ratio, std::uint64_t seed);

struct SynthSpec {
    Shape dims;
    std::size_t num_classes = 2;
    std::size_t samples_per_class = 10;
    std::vector<std::size_t> template_rank;  // per mode, or a single value for all
    double noise_sigma = 0.05;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t rank_for(std::size_t mode) const {
        return template_rank.size() == 1 ? template_rank.front() : template_rank.at(mode);
    }
};

/// Class templates are core x_n Q_n with column-orthonormal Q_n (Gram-Schmidt
/// on Gaussian draws) and a Gaussian core scaled to unit expected RMS per
/// entry. Draw order: for each class, Q_0..Q_{N-1} row-major then the core;
/// afterwards class-major samples, each template + sigma * noise (noise is
/// drawn even when sigma is 0). Labels are "class_<c>".
Dataset synth_generate(const SynthSpec& spec);

}  // namespace mpcanet
