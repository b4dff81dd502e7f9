#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blurforge/crf.hpp"
#include "blurforge/noise.hpp"

namespace blurforge {

struct DatasetConfig {
    std::vector<std::filesystem::path> input_roots;
    std::filesystem::path output_root;
    std::uint64_t dataset_seed = 1;
    int sub_frames = 121;  // M, forced odd
    int trajectories_per_view = 2;
    // Unset: 0.5 for views that have an object mask, 0 otherwise.
    std::optional<double> rigid_body_probability;
    std::vector<int> resolution_denominators = {1};  // 1/k downscales, k in {1..4}
    NoiseParams noise;
    double qa_threshold_db = 3.0;
    std::optional<int> views_per_scene;  // unset = all anchor views
    double scene_scale_multiplier = 1.0;
    CrfModel crf = CrfModel::Srgb;
    int png_bit_depth = 8;
    int workers = 0;  // 0 = hardware concurrency

    void validate() const;
};

DatasetConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const DatasetConfig& config);
DatasetConfig load_config(const std::filesystem::path& path);

}  // namespace blurforge
