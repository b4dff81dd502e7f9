#include "blurforge/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "blurforge/errors.hpp"

namespace blurforge {

using nlohmann::json;

void DatasetConfig::validate() const {
    if (sub_frames < 1 || sub_frames % 2 == 0)
        throw ContractError("config: sub_frames must be odd and >= 1");
    if (trajectories_per_view < 1)
        throw ContractError("config: trajectories_per_view must be >= 1");
    if (rigid_body_probability &&
        (*rigid_body_probability < 0.0 || *rigid_body_probability > 1.0))
        throw ContractError("config: rigid_body_probability must lie in [0, 1]");
    if (resolution_denominators.empty())
        throw ContractError("config: resolution_denominators must not be empty");
    for (int d : resolution_denominators)
        if (d < 1 || d > 4)
            throw ContractError("config: resolution denominators must lie in {1,2,3,4}");
    if (std::set<int>(resolution_denominators.begin(), resolution_denominators.end()).size() !=
        resolution_denominators.size())
        throw ContractError("config: duplicate resolution denominators");
    if (views_per_scene && *views_per_scene < 1)
        throw ContractError("config: views_per_scene must be >= 1 or \"all\"");
    if (noise.shot_gain < 0.0 || noise.read_sigma < 0.0)
        throw ContractError("config: noise parameters must be non-negative");
    if (qa_threshold_db < 0.0) throw ContractError("config: qa_threshold_db must be >= 0");
    if (png_bit_depth != 8 && png_bit_depth != 16)
        throw ContractError("config: png_bit_depth must be 8 or 16");
    if (scene_scale_multiplier <= 0.0)
        throw ContractError("config: scene_scale_multiplier must be > 0");
    if (output_root.empty()) throw ContractError("config: output_root is required");
}

DatasetConfig config_from_json(const json& j) {
    DatasetConfig c;
    for (const auto& r : j.value("input_roots", json::array()))
        c.input_roots.emplace_back(r.get<std::string>());
    c.output_root = j.value("output_root", std::string{});
    c.dataset_seed = j.value("dataset_seed", c.dataset_seed);
    c.sub_frames = j.value("sub_frames", c.sub_frames);
    c.trajectories_per_view = j.value("trajectories_per_view", c.trajectories_per_view);
    if (j.contains("rigid_body_probability") && !j["rigid_body_probability"].is_null())
        c.rigid_body_probability = j["rigid_body_probability"].get<double>();
    if (j.contains("resolution_factors")) {
        c.resolution_denominators.clear();
        for (const auto& f : j["resolution_factors"])
            c.resolution_denominators.push_back(f.get<int>());
    }
    if (j.contains("noise")) {
        const auto& n = j["noise"];
        c.noise.enabled = n.value("enabled", c.noise.enabled);
        c.noise.shot_gain = n.value("shot_gain", c.noise.shot_gain);
        c.noise.read_sigma = n.value("read_sigma", c.noise.read_sigma);
        c.noise.poisson_exact = n.value("poisson_exact", c.noise.poisson_exact);
    }
    c.qa_threshold_db = j.value("qa_threshold_db", c.qa_threshold_db);
    if (j.contains("views_per_scene") && !j["views_per_scene"].is_null()) {
        const auto& v = j["views_per_scene"];
        if (v.is_string()) {
            if (v.get<std::string>() != "all")
                throw ContractError("config: views_per_scene must be an integer or \"all\"");
        } else {
            c.views_per_scene = v.get<int>();
        }
    }
    c.scene_scale_multiplier = j.value("scene_scale_multiplier", c.scene_scale_multiplier);
    if (j.contains("crf")) {
        const std::string name = j["crf"].get<std::string>();
        if (name == "srgb")
            c.crf = CrfModel::Srgb;
        else if (name == "gamma22")
            c.crf = CrfModel::Gamma22;
        else
            throw ContractError("config: crf must be \"srgb\" or \"gamma22\"");
    }
    c.png_bit_depth = j.value("png_bit_depth", c.png_bit_depth);
    c.workers = j.value("workers", c.workers);
    c.validate();
    return c;
}

json config_to_json(const DatasetConfig& c) {
    json roots = json::array();
    for (const auto& r : c.input_roots) roots.push_back(r.string());
    json j{
        {"input_roots", roots},
        {"output_root", c.output_root.string()},
        {"dataset_seed", c.dataset_seed},
        {"sub_frames", c.sub_frames},
        {"trajectories_per_view", c.trajectories_per_view},
        {"resolution_factors", c.resolution_denominators},
        {"noise",
         {{"enabled", c.noise.enabled},
          {"shot_gain", c.noise.shot_gain},
          {"read_sigma", c.noise.read_sigma},
          {"poisson_exact", c.noise.poisson_exact}}},
        {"qa_threshold_db", c.qa_threshold_db},
        {"scene_scale_multiplier", c.scene_scale_multiplier},
        {"crf", c.crf == CrfModel::Srgb ? "srgb" : "gamma22"},
        {"png_bit_depth", c.png_bit_depth},
        {"workers", c.workers},
    };
    if (c.rigid_body_probability) j["rigid_body_probability"] = *c.rigid_body_probability;
    j["views_per_scene"] = c.views_per_scene ? json(*c.views_per_scene) : json("all");
    return j;
}

DatasetConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw FormatError("config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

}  // namespace blurforge
