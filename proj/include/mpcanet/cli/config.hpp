#pragma once

// Run configuration shared by the command-line entry points. The JSON form
// is documented in the README; mode indices are 1-based there and
// 0-based in memory.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpcanet/network.hpp"

namespace mpcanet::cli {

enum class ClassifierKind : std::uint8_t { Ridge, NearestNeighbor };

std::string_view classifier_kind_name(ClassifierKind k);
ClassifierKind parse_classifier_kind(std::string_view name);

struct LayerRunConfig {
    std::optional<Shape> patch;  // default: 3 along the first two modes, full extent elsewhere
    std::optional<std::vector<std::size_t>> slide_modes;  // 0-based
    std::size_t encoders = 8;
    double energy = 0.97;
    std::vector<std::size_t> min_dims;
    Padding padding = Padding::ZeroSame;
};

struct RunConfig {
    Architecture architecture = Architecture::Mpcanet1;
    std::vector<LayerRunConfig> layers;  // one per stage; missing stages take defaults
    std::optional<Shape> box;            // absolute extents; default min(4, extent) per map mode
    double overlap = 0.5;
    bool normalized = false;
    ClassifierKind classifier = ClassifierKind::Ridge;
    double lambda = 1e-2;
    int max_iter = 10;
    double tol = 1e-6;
    std::uint64_t seed = 0;
    std::size_t splits = 5;
    std::optional<double> ratio;
    std::vector<Shape> bench_patches;  // first-stage patch sweep for bench
    std::vector<std::size_t> sweep_dims = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    double sweep_energy = 0.97;

    /// Checks everything that does not depend on the data dims.
    void validate() const;
};

RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);

/// "3x3x8" -> {3, 3, 8}.
Shape parse_dims(std::string_view text);
std::string dims_to_string(const Shape& dims);

/// Box text: "16x10" or the multiplier shorthand "8x5*2" (unit extents times
/// an integer multiple, stored as absolute extents).
Shape parse_box(std::string_view text);

/// Fills in default patches and box for concrete input dims, then checks the
/// whole network geometry (plan_network) before any training happens.
NetworkConfig resolve_network(const RunConfig& cfg, const Shape& input_dims, const Shape* first_patch = nullptr);

}  // namespace mpcanet::cli
