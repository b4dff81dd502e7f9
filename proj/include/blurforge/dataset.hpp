#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blurforge/camera.hpp"
#include "blurforge/config.hpp"
#include "blurforge/metrics.hpp"
#include "blurforge/trajectory.hpp"

namespace blurforge {

// cameras.json: shared intrinsics plus named world-to-camera views.
// Ground-truth renders and object masks live next to it in images/ and
// masks/, keyed by view name.
struct SceneCameras {
    std::string scene_id;
    CameraIntrinsics intrinsics;
    struct View {
        std::string name;
        CameraPose pose;
    };
    std::vector<View> views;
};

SceneCameras load_cameras(const std::filesystem::path& path);
void save_cameras(const SceneCameras& cameras, const std::filesystem::path& path);

// Every 8th view is reserved for the QA gate and never used as a blur anchor.
inline bool is_held_out_view(int view_index) { return view_index % 8 == 0; }

struct DiscoveredScene {
    std::string scene_id;
    std::filesystem::path directory;
    std::filesystem::path ply_path;
    std::filesystem::path cameras_path;
    std::optional<std::filesystem::path> images_dir;
    std::optional<std::filesystem::path> masks_dir;
};

struct DiscoveryNote {
    std::string scene_id;
    std::string message;
};

struct DiscoveryResult {
    std::vector<DiscoveredScene> scenes;  // ordered lexicographically by scene_id
    std::vector<DiscoveryNote> notes;     // skipped scenes and id collisions
};

// Scans each root for directories holding a PLY plus cameras.json. Scenes
// missing a cameras file are reported and skipped; on a scene_id collision
// the later root wins and the shadowing is logged.
DiscoveryResult discover_scenes(const std::vector<std::filesystem::path>& roots);

struct ImageRecord {
    std::string file;  // relative to the output root
    std::string sha256;
    int width = 0;
    int height = 0;
};

struct BlurRecord {
    ImageRecord image;
    int trajectory_index = 0;
    int resolution_denominator = 1;
    bool noise_applied = false;
    std::uint64_t noise_seed = 0;
};

struct PairRecord {
    std::string view_name;
    int view_index = 0;
    std::uint64_t seed = 0;
    bool rigid = false;
    ImageRecord sharp;
    std::vector<BlurRecord> blurs;
    nlohmann::json trajectories;             // provenance, one entry per trajectory
    nlohmann::json background_trajectories;  // rigid mode only
};

struct SceneRecord {
    std::string scene_id;
    std::string status;  // "passed" | "failed" | "error" | "planned"
    std::string detail;
    std::optional<SceneQAReport> qa;
    std::vector<PairRecord> pairs;
};

struct DatasetManifest {
    nlohmann::json config_snapshot;
    std::vector<DiscoveryNote> discovery_notes;
    std::vector<SceneRecord> scenes;

    int scenes_passed() const;
    int scenes_failed() const;
    int pairs_written() const;
    int blurry_written() const;
    nlohmann::json to_json() const;
};

struct RunOptions {
    bool force = false;
    bool resume = false;
    bool dry_run = false;
    std::string scene_glob;  // empty matches everything
};

// Full batch run: discover -> QA-gate -> synthesize -> degrade -> write.
// Pure function of (config, input files); scene-level failures are recorded
// in the manifest instead of aborting.
DatasetManifest run_pipeline(const DatasetConfig& config, const RunOptions& run = {});

// QA pass only: renders held-out views, writes per-scene qa.json reports.
DatasetManifest run_qa_only(const DatasetConfig& config, const RunOptions& run = {});

struct ValidationIssue {
    std::string where;
    std::string what;
};

// Cross-checks manifest.json against the files on disk (existence, SHA-256,
// dimensions, counts). Empty result means the output is consistent.
std::vector<ValidationIssue> validate_output(const std::filesystem::path& output_root);

struct DemoSceneOptions {
    std::uint64_t seed = 7;
    int width = 320;
    int height = 240;
    int view_count = 12;  // total views; every 8th is held out for QA
    int primitive_count = 1600;
    double extent = 1.0;
};

// Writes a self-contained procedural scene (PLY, cameras.json, ground-truth
// renders, object masks) usable for smoke tests without any external data.
void write_demo_scene(const std::filesystem::path& directory, const DemoSceneOptions& opts);

nlohmann::json trajectory_to_json(const MotionTrajectory& traj);

}  // namespace blurforge
