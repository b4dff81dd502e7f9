#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "blurforge/blur.hpp"
#include "blurforge/dataset.hpp"
#include "blurforge/errors.hpp"
#include "blurforge/ply_io.hpp"
#include "blurforge/png_io.hpp"
#include "blurforge/renderer.hpp"
#include "blurforge/resample.hpp"

namespace fs = std::filesystem;
using namespace blurforge;

namespace {

struct GenerateArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = -1;
    bool force = false;
    bool resume = false;
    bool dry_run = false;
    std::string scenes_glob;
};

void print_manifest_summary(const DatasetManifest& manifest) {
    for (const auto& note : manifest.discovery_notes)
        std::cout << "[discovery] " << note.scene_id << ": " << note.message << "\n";
    for (const auto& scene : manifest.scenes) {
        std::cout << scene.scene_id << ": " << scene.status;
        if (scene.qa)
            std::cout << " (mean PSNR " << capped_psnr(scene.qa->mean_psnr) << " dB, SSIM "
                      << scene.qa->mean_ssim << ")";
        if (!scene.pairs.empty()) std::cout << ", " << scene.pairs.size() << " pairs";
        if (!scene.detail.empty()) std::cout << " - " << scene.detail;
        std::cout << "\n";
    }
    std::cout << "total: " << manifest.pairs_written() << " sharp, "
              << manifest.blurry_written() << " blurry\n";
}

int cmd_generate(const GenerateArgs& args, bool qa_only) {
    DatasetConfig config = load_config(args.config_path);
    if (args.seed_set) config.dataset_seed = args.seed;
    if (args.workers >= 0) config.workers = args.workers;

    RunOptions run;
    run.force = args.force;
    run.resume = args.resume;
    run.dry_run = args.dry_run;
    run.scene_glob = args.scenes_glob;

    DatasetManifest manifest = qa_only ? run_qa_only(config, run) : run_pipeline(config, run);
    print_manifest_summary(manifest);
    return 0;
}

CameraPose find_view(const SceneCameras& cams, const std::string& view, int* index_out) {
    if (!view.empty() && view.find_first_not_of("0123456789") == std::string::npos) {
        const int idx = std::stoi(view);
        if (idx < 0 || idx >= static_cast<int>(cams.views.size()))
            throw ContractError("view index out of range");
        if (index_out) *index_out = idx;
        return cams.views[idx].pose;
    }
    for (int i = 0; i < static_cast<int>(cams.views.size()); ++i) {
        if (cams.views[i].name == view) {
            if (index_out) *index_out = i;
            return cams.views[i].pose;
        }
    }
    throw ContractError("no view named '" + view + "'");
}

int cmd_render(const std::string& scene_dir, const std::string& view, const std::string& out,
               const std::string& depth_out, int bit_depth) {
    DiscoveryResult disc = discover_scenes({fs::path(scene_dir).parent_path()});
    const std::string id = fs::path(scene_dir).filename().string();
    const DiscoveredScene* found = nullptr;
    for (const auto& s : disc.scenes)
        if (s.scene_id == id) found = &s;
    if (!found) throw IoError("not a scene directory: " + scene_dir);

    const SceneCameras cams = load_cameras(found->cameras_path);
    const GaussianScene scene = load_scene(found->ply_path);
    const CameraPose pose = find_view(cams, view, nullptr);

    RenderResult result = render(scene, pose, cams.intrinsics);
    write_png(result.color, out, bit_depth);
    if (!depth_out.empty()) write_depth(result.depth, depth_out);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_preview_trajectory(const std::string& scene_dir, const std::string& view,
                           std::uint64_t seed, int frames, const std::string& out_prefix) {
    DiscoveryResult disc = discover_scenes({fs::path(scene_dir).parent_path()});
    const std::string id = fs::path(scene_dir).filename().string();
    const DiscoveredScene* found = nullptr;
    for (const auto& s : disc.scenes)
        if (s.scene_id == id) found = &s;
    if (!found) throw IoError("not a scene directory: " + scene_dir);

    const SceneCameras cams = load_cameras(found->cameras_path);
    const GaussianScene scene = load_scene(found->ply_path);
    const CameraPose anchor = find_view(cams, view, nullptr);

    if (frames % 2 == 0) ++frames;  // the curve is sampled around its middle
    Rng rng(seed);
    const CurveParams params = sample_curve_params(rng);
    MotionTrajectory traj = build_trajectory(rng, params, anchor, frames);
    traj.seed = seed;

    {
        std::ofstream jf(out_prefix + ".json", std::ios::trunc);
        jf << trajectory_to_json(traj).dump(2) << "\n";
    }

    // Quarter-resolution thumbnails side by side.
    std::vector<SrgbImage> thumbs;
    for (const auto& pose : traj.poses)
        thumbs.push_back(downscale(render(scene, pose, cams.intrinsics).color, 4));
    const int tw = thumbs.front().width(), th = thumbs.front().height();
    SrgbImage strip(tw * frames, th);
    for (int k = 0; k < frames; ++k)
        for (int y = 0; y < th; ++y)
            for (int x = 0; x < tw; ++x) {
                const float* src = thumbs[k].pixel(x, y);
                float* dst = strip.pixel(k * tw + x, y);
                dst[0] = src[0];
                dst[1] = src[1];
                dst[2] = src[2];
            }
    write_png(strip, out_prefix + ".png");
    std::cout << "wrote " << out_prefix << ".json and " << out_prefix << ".png\n";
    return 0;
}

int cmd_validate(const std::string& output_root) {
    const auto issues = validate_output(output_root);
    if (issues.empty()) {
        std::cout << "ok: manifest and files are consistent\n";
        return 0;
    }
    for (const auto& issue : issues)
        std::cerr << issue.where << ": " << issue.what << "\n";
    std::cerr << issues.size() << " problem(s) found\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"blurforge: renders blurry/sharp deblurring pairs from Gaussian-splat scenes"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", gen.config_path, "dataset config JSON")->required();
        cmd->add_option("--seed", gen.seed, "override dataset_seed")
            ->each([&](const std::string&) { gen.seed_set = true; });
        cmd->add_option("--workers", gen.workers, "worker thread count");
        cmd->add_option("--scenes", gen.scenes_glob, "glob filter on scene ids");
    };

    CLI::App* generate = app.add_subcommand("generate", "run the full dataset pipeline");
    add_run_flags(generate);
    generate->add_flag("--force", gen.force, "overwrite a non-empty output root");
    generate->add_flag("--resume", gen.resume, "keep finished pairs, fill in the rest");
    generate->add_flag("--dry-run", gen.dry_run, "plan only, write nothing");

    CLI::App* qa = app.add_subcommand("qa", "render held-out views and write QA reports only");
    add_run_flags(qa);

    std::string scene_dir, view = "0", out_path = "render.png", depth_path;
    int bit_depth = 8;
    CLI::App* render_cmd = app.add_subcommand("render", "render a single view to PNG");
    render_cmd->add_option("--scene", scene_dir, "scene directory")->required();
    render_cmd->add_option("--view", view, "view index or name");
    render_cmd->add_option("--out", out_path, "output PNG");
    render_cmd->add_option("--depth", depth_path, "also dump the depth map (BFDM)");
    render_cmd->add_option("--bit-depth", bit_depth, "PNG bit depth (8 or 16)");

    std::uint64_t traj_seed = 1;
    int traj_frames = 9;
    std::string traj_prefix = "trajectory";
    CLI::App* preview = app.add_subcommand("preview-trajectory",
                                           "emit trajectory JSON plus a sub-frame thumbnail strip");
    preview->add_option("--scene", scene_dir, "scene directory")->required();
    preview->add_option("--view", view, "anchor view index or name");
    preview->add_option("--seed", traj_seed, "trajectory seed");
    preview->add_option("--frames", traj_frames, "thumbnail count");
    preview->add_option("--out-prefix", traj_prefix, "output prefix");

    std::string validate_root;
    CLI::App* validate = app.add_subcommand("validate", "check a manifest against files on disk");
    validate->add_option("output_root", validate_root, "dataset output root")->required();

    DemoSceneOptions demo;
    std::string demo_out;
    CLI::App* make_demo = app.add_subcommand("make-demo-scene",
                                             "write a procedural scene for smoke tests");
    make_demo->add_option("--out", demo_out, "scene directory to create")->required();
    make_demo->add_option("--seed", demo.seed, "generator seed");
    make_demo->add_option("--width", demo.width, "render width");
    make_demo->add_option("--height", demo.height, "render height");
    make_demo->add_option("--views", demo.view_count, "total views (every 8th held out)");
    make_demo->add_option("--primitives", demo.primitive_count, "primitive count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(generate)) return cmd_generate(gen, false);
        if (app.got_subcommand(qa)) return cmd_generate(gen, true);
        if (app.got_subcommand(render_cmd))
            return cmd_render(scene_dir, view, out_path, depth_path, bit_depth);
        if (app.got_subcommand(preview))
            return cmd_preview_trajectory(scene_dir, view, traj_seed, traj_frames, traj_prefix);
        if (app.got_subcommand(validate)) return cmd_validate(validate_root);
        if (app.got_subcommand(make_demo)) {
            write_demo_scene(demo_out, demo);
            std::cout << "wrote demo scene to " << demo_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
