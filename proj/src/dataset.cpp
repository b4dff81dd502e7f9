#include "blurforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "blurforge/blur.hpp"
#include "blurforge/digest.hpp"
#include "blurforge/errors.hpp"
#include "blurforge/ply_io.hpp"
#include "blurforge/png_io.hpp"
#include "blurforge/renderer.hpp"
#include "blurforge/resample.hpp"
#include "blurforge/rng.hpp"
#include "blurforge/scene.hpp"

namespace blurforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Seed-derivation tags; distinct per purpose so streams never collide.
constexpr std::uint64_t kViewTag = 0x7669657721ULL;
constexpr std::uint64_t kRigidTag = 0x7269676964ULL;
constexpr std::uint64_t kNoiseTag = 0x6e6f697365ULL;

json vec3_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3_from_json(const json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json pose_json(const CameraPose& p) {
    return json{{"rotation", {p.rotation.w(), p.rotation.x(), p.rotation.y(), p.rotation.z()}},
                {"translation", vec3_json(p.translation)}};
}

CameraPose pose_from_json(const json& j) {
    const auto& r = j.at("rotation");
    CameraPose p;
    p.rotation = Eigen::Quaterniond(r.at(0).get<double>(), r.at(1).get<double>(),
                                    r.at(2).get<double>(), r.at(3).get<double>());
    const double norm = p.rotation.norm();
    if (!(norm > 1e-6)) throw FormatError("camera pose has a degenerate quaternion");
    p.rotation.normalize();
    p.translation = vec3_from_json(j.at("translation"));
    return p;
}

// Snaps values to the PNG sample grid with the same float arithmetic the
// writer uses, so a render compared against its own decoded file is exact.
SrgbImage quantize_image(const SrgbImage& img, int bit_depth) {
    const float levels = bit_depth == 16 ? 65535.0f : 255.0f;
    SrgbImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        const long q = std::lround(std::clamp(img.data()[i], 0.0f, 1.0f) * levels);
        out.data()[i] = static_cast<float>(q) / levels;
    }
    return out;
}

std::regex glob_to_regex(const std::string& glob) {
    std::string re;
    for (char c : glob) {
        if (c == '*')
            re += ".*";
        else if (c == '?')
            re += '.';
        else if (std::isalnum(static_cast<unsigned char>(c)))
            re += c;
        else {
            re += '\\';
            re += c;
        }
    }
    return std::regex(re);
}

std::string blur_filename(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "blur_%03d.png", index);
    return buf;
}

struct ViewTask {
    int view_index = 0;
    std::string name;
    CameraPose pose;
};

json image_record_json(const ImageRecord& r) {
    return json{{"file", r.file}, {"sha256", r.sha256}, {"width", r.width}, {"height", r.height}};
}

json qa_json(const SceneQAReport& report, const std::vector<std::string>& view_names) {
    json views = json::array();
    for (const auto& [idx, db] : report.per_view_psnr)
        views.push_back({{"view_index", idx}, {"psnr_db", capped_psnr(db)}});
    return json{{"evaluated", true},
                {"scene_id", report.scene_id},
                {"per_view_psnr", views},
                {"mean_psnr", capped_psnr(report.mean_psnr)},
                {"mean_ssim", report.mean_ssim},
                {"passed", report.passed},
                {"threshold_rule", report.threshold_rule},
                {"held_out_views", view_names}};
}

}  // namespace

json trajectory_to_json(const MotionTrajectory& traj) {
    json ctrl = json::array();
    for (const auto& c : traj.control_points)
        ctrl.push_back({{"translation", vec3_json(c.translation)},
                        {"rotation_deg", vec3_json(c.rotation_deg)}});
    return json{{"seed", traj.seed},
                {"params",
                 {{"order", traj.params.order},
                  {"delta_t", vec3_json(traj.params.delta_t)},
                  {"delta_r", vec3_json(traj.params.delta_r)}}},
                {"control_points", ctrl},
                {"sample_count", traj.poses.size()},
                {"anchor", pose_json(traj.anchor)}};
}

SceneCameras load_cameras(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open cameras file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw FormatError("cameras " + path.string() + ": " + e.what());
    }

    SceneCameras cams;
    cams.scene_id = j.value("scene_id", std::string{});
    const auto& ji = j.at("intrinsics");
    cams.intrinsics = {ji.at("fx").get<double>(), ji.at("fy").get<double>(),
                       ji.at("cx").get<double>(), ji.at("cy").get<double>(),
                       ji.at("width").get<int>(),  ji.at("height").get<int>()};
    cams.intrinsics.validate();

    std::set<std::string> names;
    for (const auto& jv : j.at("views")) {
        SceneCameras::View v;
        v.name = jv.at("name").get<std::string>();
        if (!names.insert(v.name).second)
            throw FormatError("cameras " + path.string() + ": duplicate view name " + v.name);
        v.pose = pose_from_json(jv);
        cams.views.push_back(std::move(v));
    }
    if (cams.views.empty()) throw FormatError("cameras " + path.string() + ": no views");
    return cams;
}

void save_cameras(const SceneCameras& cams, const fs::path& path) {
    json views = json::array();
    for (const auto& v : cams.views) {
        json jv = pose_json(v.pose);
        jv["name"] = v.name;
        views.push_back(std::move(jv));
    }
    json j{{"scene_id", cams.scene_id},
           {"intrinsics",
            {{"fx", cams.intrinsics.fx},
             {"fy", cams.intrinsics.fy},
             {"cx", cams.intrinsics.cx},
             {"cy", cams.intrinsics.cy},
             {"width", cams.intrinsics.width},
             {"height", cams.intrinsics.height}}},
           {"views", views}};
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write cameras file: " + path.string());
    out << j.dump(2) << "\n";
}

DiscoveryResult discover_scenes(const std::vector<fs::path>& roots) {
    DiscoveryResult result;
    std::map<std::string, DiscoveredScene> by_id;

    for (const auto& root : roots) {
        if (!fs::exists(root) || !fs::is_directory(root))
            throw IoError("scene root does not exist: " + root.string());

        std::vector<fs::path> dirs;
        for (const auto& entry : fs::directory_iterator(root))
            if (entry.is_directory()) dirs.push_back(entry.path());
        std::sort(dirs.begin(), dirs.end());

        for (const auto& dir : dirs) {
            const std::string id = dir.filename().string();

            fs::path ply = dir / "point_cloud.ply";
            if (!fs::exists(ply)) {
                ply.clear();
                std::vector<fs::path> candidates;
                for (const auto& f : fs::directory_iterator(dir))
                    if (f.path().extension() == ".ply") candidates.push_back(f.path());
                std::sort(candidates.begin(), candidates.end());
                if (!candidates.empty()) ply = candidates.front();
            }
            const fs::path cameras = dir / "cameras.json";

            if (ply.empty()) {
                result.notes.push_back({id, "skipped: no PLY file in " + dir.string()});
                continue;
            }
            if (!fs::exists(cameras)) {
                result.notes.push_back({id, "skipped: missing cameras.json in " + dir.string()});
                continue;
            }

            DiscoveredScene scene{id, dir, ply, cameras, std::nullopt, std::nullopt};
            if (fs::is_directory(dir / "images")) scene.images_dir = dir / "images";
            if (fs::is_directory(dir / "masks")) scene.masks_dir = dir / "masks";

            auto [it, inserted] = by_id.insert_or_assign(id, std::move(scene));
            if (!inserted)
                result.notes.push_back(
                    {id, "scene id collision: " + dir.string() + " shadows an earlier root"});
        }
    }

    result.scenes.reserve(by_id.size());
    for (auto& [id, scene] : by_id) result.scenes.push_back(std::move(scene));
    return result;
}

int DatasetManifest::scenes_passed() const {
    return static_cast<int>(std::count_if(scenes.begin(), scenes.end(),
                                          [](const auto& s) { return s.status == "passed"; }));
}

int DatasetManifest::scenes_failed() const {
    return static_cast<int>(std::count_if(scenes.begin(), scenes.end(),
                                          [](const auto& s) { return s.status == "failed"; }));
}

int DatasetManifest::pairs_written() const {
    int n = 0;
    for (const auto& s : scenes) n += static_cast<int>(s.pairs.size());
    return n;
}

int DatasetManifest::blurry_written() const {
    int n = 0;
    for (const auto& s : scenes)
        for (const auto& p : s.pairs) n += static_cast<int>(p.blurs.size());
    return n;
}

json DatasetManifest::to_json() const {
    json notes = json::array();
    for (const auto& n : discovery_notes)
        notes.push_back({{"scene_id", n.scene_id}, {"message", n.message}});

    json jscenes = json::array();
    for (const auto& s : scenes) {
        json pairs = json::array();
        for (const auto& p : s.pairs) {
            json blurs = json::array();
            for (const auto& b : p.blurs) {
                json jb = image_record_json(b.image);
                jb["trajectory_index"] = b.trajectory_index;
                jb["resolution_denominator"] = b.resolution_denominator;
                jb["noise_applied"] = b.noise_applied;
                jb["noise_seed"] = b.noise_seed;
                blurs.push_back(std::move(jb));
            }
            pairs.push_back({{"view", p.view_name},
                             {"view_index", p.view_index},
                             {"seed", p.seed},
                             {"rigid", p.rigid},
                             {"sharp", image_record_json(p.sharp)},
                             {"blurs", blurs},
                             {"trajectories", p.trajectories},
                             {"background_trajectories", p.background_trajectories}});
        }
        json js{{"scene_id", s.scene_id},
                {"status", s.status},
                {"detail", s.detail},
                {"pairs", pairs}};
        js["qa"] = s.qa ? qa_json(*s.qa, {}) : json(nullptr);
        jscenes.push_back(std::move(js));
    }

    return json{{"schema", "blurforge-manifest-v1"},
                {"config", config_snapshot},
                {"discovery_notes", notes},
                {"scenes", jscenes},
                {"counts",
                 {{"scenes_total", scenes.size()},
                  {"scenes_passed", scenes_passed()},
                  {"scenes_failed", scenes_failed()},
                  {"pairs_written", pairs_written()},
                  {"sharp_images", pairs_written()},
                  {"blurry_images", blurry_written()}}}};
}

namespace {

struct QaOutcome {
    SceneQAReport report;
    std::vector<std::string> view_names;
};

// Renders every held-out view that has a ground-truth image and applies the
// PSNR-drop rule. Returns nullopt (with an explanation) when fewer than two
// usable views exist.
std::optional<QaOutcome> evaluate_qa(const GaussianScene& scene, const SceneCameras& cams,
                                     const DiscoveredScene& disc, const DatasetConfig& config,
                                     std::string& note) {
    std::vector<std::pair<SrgbImage, SrgbImage>> pairs;
    QaOutcome outcome;
    std::vector<int> indices;

    for (int i = 0; i < static_cast<int>(cams.views.size()); ++i) {
        if (!is_held_out_view(i)) continue;
        if (!disc.images_dir) continue;
        const fs::path gt_path = *disc.images_dir / (cams.views[i].name + ".png");
        if (!fs::exists(gt_path)) continue;

        SrgbImage gt = read_png(gt_path);
        if (gt.width() != cams.intrinsics.width || gt.height() != cams.intrinsics.height) {
            note += "ground truth dimension mismatch for " + cams.views[i].name + "; ";
            continue;
        }
        RenderResult r = render(scene, cams.views[i].pose, cams.intrinsics);
        pairs.emplace_back(std::move(gt), quantize_image(r.color, config.png_bit_depth));
        outcome.view_names.push_back(cams.views[i].name);
        indices.push_back(i);
    }

    if (pairs.size() < 2) {
        note += "qa skipped: fewer than 2 held-out ground-truth views";
        return std::nullopt;
    }

    outcome.report = qa_filter_scene(pairs, config.qa_threshold_db);
    outcome.report.scene_id = disc.scene_id;
    for (std::size_t k = 0; k < indices.size(); ++k)
        outcome.report.per_view_psnr[k].first = indices[k];
    return outcome;
}

struct PairOutput {
    PairRecord record;
    std::string error;  // non-empty on failure
};

std::uint64_t pair_seed_for(const DatasetConfig& config, const std::string& scene_id,
                            int view_index) {
    return combine_seed(combine_seed(combine_seed(config.dataset_seed, hash_string(scene_id)),
                                     kViewTag),
                        static_cast<std::uint64_t>(view_index));
}

PairRecord load_pair_record(const fs::path& view_dir, const fs::path& out_root) {
    std::ifstream in(view_dir / "provenance.json");
    json j;
    in >> j;

    PairRecord rec;
    rec.view_name = j.at("view").get<std::string>();
    rec.view_index = j.at("view_index").get<int>();
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.rigid = j.at("rigid").get<bool>();
    rec.trajectories = j.at("trajectories");
    rec.background_trajectories = j.at("background_trajectories");

    auto fill = [&](ImageRecord& img, const std::string& file) {
        const fs::path p = view_dir / file;
        img.file = fs::relative(p, out_root).generic_string();
        img.sha256 = sha256_file(p);
        const auto [w, h] = png_dimensions(p);
        img.width = w;
        img.height = h;
    };
    fill(rec.sharp, j.at("sharp").at("file").get<std::string>());
    for (const auto& jb : j.at("blurs")) {
        BlurRecord b;
        fill(b.image, jb.at("file").get<std::string>());
        b.trajectory_index = jb.at("trajectory_index").get<int>();
        b.resolution_denominator = jb.at("resolution_denominator").get<int>();
        b.noise_applied = jb.at("noise_applied").get<bool>();
        b.noise_seed = jb.at("noise_seed").get<std::uint64_t>();
        rec.blurs.push_back(std::move(b));
    }
    return rec;
}

PairOutput generate_pair(const GaussianScene& scene, const SceneCameras& cams,
                         const DiscoveredScene& disc, const DatasetConfig& config,
                         const RunOptions& run, const fs::path& out_root,
                         const ViewTask& task) {
    PairOutput out;
    try {
        const fs::path view_dir = out_root / disc.scene_id / task.name;
        const std::uint64_t pair_seed = pair_seed_for(config, disc.scene_id, task.view_index);
        const int factor_count = static_cast<int>(config.resolution_denominators.size());
        const int blur_count = config.trajectories_per_view * factor_count;

        if (run.resume && fs::exists(view_dir / "provenance.json")) {
            bool complete = fs::exists(view_dir / "sharp.png");
            for (int i = 0; i < blur_count && complete; ++i)
                complete = fs::exists(view_dir / blur_filename(i));
            if (complete) {
                try {
                    PairRecord rec = load_pair_record(view_dir, out_root);
                    if (rec.seed == pair_seed &&
                        static_cast<int>(rec.blurs.size()) == blur_count) {
                        out.record = std::move(rec);
                        return out;
                    }
                } catch (const std::exception&) {
                    // Torn provenance from an interrupted run: regenerate.
                }
            }
        }

        // Rigid-body decision: configured probability, or 0.5 when a mask
        // exists for this view.
        std::optional<Mask> mask;
        if (disc.masks_dir) {
            const fs::path mask_path = *disc.masks_dir / (task.name + ".png");
            if (fs::exists(mask_path)) {
                Mask m = read_mask_png(mask_path);
                if (m.width() != cams.intrinsics.width || m.height() != cams.intrinsics.height)
                    throw DataError("mask dimension mismatch for view " + task.name);
                mask = std::move(m);
            }
        }
        const double rigid_prob = config.rigid_body_probability.value_or(mask ? 0.5 : 0.0);
        Rng rigid_rng(combine_seed(pair_seed, kRigidTag));
        const bool rigid = mask && rigid_rng.uniform() < rigid_prob;

        SynthesisOptions opts;
        opts.sub_frames = config.sub_frames;
        opts.trajectories_per_sharp = config.trajectories_per_view;
        opts.rigid_body = rigid;
        opts.scene_scale = config.scene_scale_multiplier;
        opts.crf = config.crf;

        BlurPair pair = synthesize_pair(scene, task.pose, cams.intrinsics, opts, pair_seed,
                                        mask ? &*mask : nullptr);

        fs::create_directories(view_dir);

        PairRecord& rec = out.record;
        rec.view_name = task.name;
        rec.view_index = task.view_index;
        rec.seed = pair_seed;
        rec.rigid = rigid;
        rec.trajectories = json::array();
        for (const auto& t : pair.trajectories) rec.trajectories.push_back(trajectory_to_json(t));
        rec.background_trajectories = json::array();
        for (const auto& t : pair.background_trajectories)
            rec.background_trajectories.push_back(trajectory_to_json(t));

        auto write_image = [&](const SrgbImage& img, const std::string& file) {
            const fs::path p = view_dir / file;
            write_png(img, p, config.png_bit_depth);
            ImageRecord r;
            r.file = fs::relative(p, out_root).generic_string();
            r.sha256 = sha256_file(p);
            r.width = img.width();
            r.height = img.height();
            return r;
        };

        rec.sharp = write_image(pair.sharp, "sharp.png");
        if (pair.object_alpha) write_mask_png(*pair.object_alpha, view_dir / "alpha.png");

        const bool noise_on =
            config.noise.enabled && (config.noise.shot_gain > 0 || config.noise.read_sigma > 0);
        for (int k = 0; k < config.trajectories_per_view; ++k) {
            for (int fi = 0; fi < factor_count; ++fi) {
                const int denom = config.resolution_denominators[fi];
                const int index = k * factor_count + fi;
                SrgbImage img = downscale(pair.blurry[k], denom, config.crf);
                BlurRecord b;
                b.trajectory_index = k;
                b.resolution_denominator = denom;
                b.noise_applied = noise_on;
                b.noise_seed = combine_seed(combine_seed(pair_seed, kNoiseTag),
                                            static_cast<std::uint64_t>(index));
                if (noise_on) {
                    NoiseParams np = config.noise;
                    np.seed = b.noise_seed;
                    img = add_noise(img, np, config.crf);
                }
                b.image = write_image(img, blur_filename(index));
                rec.blurs.push_back(std::move(b));
            }
        }

        json prov{{"schema", "blurforge-pair-v1"},
                  {"scene_id", disc.scene_id},
                  {"view", rec.view_name},
                  {"view_index", rec.view_index},
                  {"seed", rec.seed},
                  {"rigid", rec.rigid},
                  {"sub_frames", config.sub_frames},
                  {"scene_scale_multiplier", config.scene_scale_multiplier},
                  {"sharp", {{"file", "sharp.png"}}},
                  {"trajectories", rec.trajectories},
                  {"background_trajectories", rec.background_trajectories}};
        json jblurs = json::array();
        for (std::size_t i = 0; i < rec.blurs.size(); ++i) {
            const auto& b = rec.blurs[i];
            jblurs.push_back({{"file", blur_filename(static_cast<int>(i))},
                              {"trajectory_index", b.trajectory_index},
                              {"resolution_denominator", b.resolution_denominator},
                              {"noise_applied", b.noise_applied},
                              {"noise_seed", b.noise_seed},
                              {"noise_shot_gain", config.noise.shot_gain},
                              {"noise_read_sigma", config.noise.read_sigma}});
        }
        prov["blurs"] = jblurs;
        std::ofstream pf(view_dir / "provenance.json", std::ios::trunc);
        pf << prov.dump(2) << "\n";
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

std::vector<ViewTask> anchor_views(const SceneCameras& cams, const DatasetConfig& config) {
    std::vector<ViewTask> tasks;
    for (int i = 0; i < static_cast<int>(cams.views.size()); ++i) {
        if (is_held_out_view(i)) continue;
        tasks.push_back({i, cams.views[i].name, cams.views[i].pose});
        if (config.views_per_scene &&
            static_cast<int>(tasks.size()) >= *config.views_per_scene)
            break;
    }
    return tasks;
}

void prepare_output_root(const DatasetConfig& config, const RunOptions& run) {
    const fs::path& root = config.output_root;
    if (fs::exists(root) && !fs::is_directory(root))
        throw IoError("output root is not a directory: " + root.string());
    if (fs::exists(root) && !fs::is_empty(root) && !run.force && !run.resume)
        throw IoError("output root " + root.string() +
                      " is not empty; pass --force to overwrite or --resume to continue");
    fs::create_directories(root);
}

DatasetManifest run_impl(const DatasetConfig& config, const RunOptions& run, bool qa_only) {
    config.validate();

    int workers = config.workers;
    if (const char* env = std::getenv("BLURFORGE_WORKERS")) workers = std::atoi(env);
#ifdef _OPENMP
    if (workers > 0) omp_set_num_threads(workers);
#else
    (void)workers;
#endif

    DiscoveryResult discovery = discover_scenes(config.input_roots);
    if (!run.scene_glob.empty()) {
        const std::regex re = glob_to_regex(run.scene_glob);
        std::erase_if(discovery.scenes, [&](const DiscoveredScene& s) {
            return !std::regex_match(s.scene_id, re);
        });
    }

    DatasetManifest manifest;
    manifest.config_snapshot = config_to_json(config);
    manifest.discovery_notes = std::move(discovery.notes);

    if (!run.dry_run) prepare_output_root(config, run);

    for (const DiscoveredScene& disc : discovery.scenes) {
        SceneRecord rec;
        rec.scene_id = disc.scene_id;
        try {
            const SceneCameras cams = load_cameras(disc.cameras_path);
            const auto anchors = anchor_views(cams, config);

            if (run.dry_run) {
                rec.status = "planned";
                rec.detail = std::to_string(anchors.size()) + " anchor views x " +
                             std::to_string(config.trajectories_per_view) + " trajectories x " +
                             std::to_string(config.resolution_denominators.size()) + " factors";
                manifest.scenes.push_back(std::move(rec));
                continue;
            }

            const GaussianScene scene = load_scene(disc.ply_path);

            std::string qa_note;
            std::optional<QaOutcome> qa = evaluate_qa(scene, cams, disc, config, qa_note);

            const fs::path scene_dir = config.output_root / disc.scene_id;
            fs::create_directories(scene_dir);
            {
                json jq = qa ? qa_json(qa->report, qa->view_names)
                             : json{{"evaluated", false}, {"reason", qa_note}};
                std::ofstream qf(scene_dir / "qa.json", std::ios::trunc);
                qf << jq.dump(2) << "\n";
            }
            if (qa) rec.qa = qa->report;
            rec.detail = qa_note;

            if (qa && !qa->report.passed) {
                rec.status = "failed";
                manifest.scenes.push_back(std::move(rec));
                continue;
            }
            if (qa_only) {
                rec.status = "passed";
                manifest.scenes.push_back(std::move(rec));
                continue;
            }

            std::vector<PairOutput> outputs(anchors.size());
#pragma omp parallel for schedule(dynamic)
            for (int i = 0; i < static_cast<int>(anchors.size()); ++i)
                outputs[i] = generate_pair(scene, cams, disc, config, run,
                                           config.output_root, anchors[i]);

            rec.status = "passed";
            for (auto& o : outputs) {
                if (!o.error.empty()) {
                    rec.status = "error";
                    if (rec.detail.empty()) rec.detail = o.error;
                } else {
                    rec.pairs.push_back(std::move(o.record));
                }
            }
        } catch (const std::exception& e) {
            rec.status = "error";
            rec.detail = e.what();
        }
        manifest.scenes.push_back(std::move(rec));
    }

    // qa-only runs leave any existing dataset manifest untouched.
    if (!run.dry_run && !qa_only) {
        std::ofstream mf(config.output_root / "manifest.json", std::ios::trunc);
        if (!mf) throw IoError("cannot write manifest.json");
        mf << manifest.to_json().dump(2) << "\n";
    }
    return manifest;
}

}  // namespace

DatasetManifest run_pipeline(const DatasetConfig& config, const RunOptions& run) {
    return run_impl(config, run, false);
}

DatasetManifest run_qa_only(const DatasetConfig& config, const RunOptions& run) {
    RunOptions relaxed = run;
    relaxed.force = true;  // qa writes only qa.json files
    return run_impl(config, relaxed, true);
}

std::vector<ValidationIssue> validate_output(const fs::path& output_root) {
    std::vector<ValidationIssue> issues;
    const fs::path manifest_path = output_root / "manifest.json";
    if (!fs::exists(manifest_path))
        return {{manifest_path.string(), "manifest.json not found"}};

    json m;
    try {
        std::ifstream in(manifest_path);
        in >> m;
    } catch (const std::exception& e) {
        return {{manifest_path.string(), std::string("unreadable manifest: ") + e.what()}};
    }

    int pairs = 0, blurs = 0;
    auto check_image = [&](const json& rec, const std::string& where) {
        const fs::path p = output_root / rec.at("file").get<std::string>();
        if (!fs::exists(p)) {
            issues.push_back({where, "missing file " + p.string()});
            return;
        }
        try {
            if (sha256_file(p) != rec.at("sha256").get<std::string>())
                issues.push_back({where, "sha256 mismatch for " + p.string()});
            const auto [w, h] = png_dimensions(p);
            if (w != rec.at("width").get<int>() || h != rec.at("height").get<int>())
                issues.push_back({where, "dimension mismatch for " + p.string()});
        } catch (const std::exception& e) {
            issues.push_back({where, e.what()});
        }
    };

    for (const auto& scene : m.at("scenes")) {
        const std::string id = scene.at("scene_id").get<std::string>();
        if (!scene.at("qa").is_null() && !fs::exists(output_root / id / "qa.json"))
            issues.push_back({id, "missing qa.json"});
        for (const auto& pair : scene.at("pairs")) {
            ++pairs;
            const std::string where = id + "/" + pair.at("view").get<std::string>();
            check_image(pair.at("sharp"), where);
            for (const auto& b : pair.at("blurs")) {
                ++blurs;
                check_image(b, where);
            }
            if (!fs::exists(output_root / id / pair.at("view").get<std::string>() /
                            "provenance.json"))
                issues.push_back({where, "missing provenance.json"});
        }
    }

    const auto& counts = m.at("counts");
    if (counts.at("pairs_written").get<int>() != pairs)
        issues.push_back({"counts", "pairs_written does not match pair records"});
    if (counts.at("blurry_images").get<int>() != blurs)
        issues.push_back({"counts", "blurry_images does not match blur records"});
    return issues;
}

void write_demo_scene(const fs::path& directory, const DemoSceneOptions& opts) {
    if (opts.view_count < 9)
        throw ContractError("demo scene needs at least 9 views so two are held out");
    if (opts.primitive_count < 10)
        throw ContractError("demo scene needs at least 10 primitives");

    const double e = opts.extent;
    Rng rng(mix_seed(opts.seed));

    // Object cluster up front, flattened backdrop wall behind it. The split
    // is recorded implicitly through the masks rendered below.
    GaussianScene scene;
    scene.scene_id = directory.filename().string();
    const int object_count = opts.primitive_count * 35 / 100;

    GaussianScene object_only;
    for (int i = 0; i < opts.primitive_count; ++i) {
        GaussianPrimitive g;
        const bool is_object = i < object_count;
        if (is_object) {
            // Ball of radius 0.4e around the origin.
            const double r = 0.4 * e * std::cbrt(rng.uniform());
            const double z = rng.uniform(-1.0, 1.0);
            const double phi = rng.uniform(0.0, 6.283185307179586);
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            g.position = {r * s * std::cos(phi), r * s * std::sin(phi), r * z};
            for (int a = 0; a < 3; ++a)
                g.scale[a] = std::exp(rng.uniform(std::log(e / 80.0), std::log(e / 25.0)));
            g.opacity = rng.uniform(0.6, 0.98);
        } else {
            g.position = {rng.uniform(-2.2 * e, 2.2 * e), rng.uniform(-2.2 * e, 2.2 * e),
                          rng.uniform(0.75 * e, 0.95 * e)};
            for (int a = 0; a < 3; ++a)
                g.scale[a] = std::exp(rng.uniform(std::log(e / 30.0), std::log(e / 10.0)));
            g.scale[2] *= 0.25;
            g.opacity = rng.uniform(0.75, 0.99);
        }

        Eigen::Vector4d q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
        if (q.norm() < 1e-12) q = Eigen::Vector4d(1, 0, 0, 0);
        q.normalize();
        g.rotation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);

        Eigen::Vector3d color;
        if (is_object)
            color = {rng.uniform(0.45, 0.95), rng.uniform(0.25, 0.9), rng.uniform(0.2, 0.85)};
        else
            color = {rng.uniform(0.15, 0.6), rng.uniform(0.2, 0.65), rng.uniform(0.25, 0.7)};
        g.sh_coeffs[0] = (color - Eigen::Vector3d::Constant(0.5)) / kShC0;
        // Mild view dependence on the first band.
        for (int k = 1; k <= 3; ++k)
            for (int c = 0; c < 3; ++c) g.sh_coeffs[k][c] = rng.uniform(-0.06, 0.06);

        scene.primitives.push_back(g);
        if (is_object) object_only.primitives.push_back(g);
    }
    scene.recompute_bounds();
    object_only.recompute_bounds();

    SceneCameras cams;
    cams.scene_id = scene.scene_id;
    cams.intrinsics = {0.85 * opts.width,       0.85 * opts.width,      (opts.width - 1) / 2.0,
                       (opts.height - 1) / 2.0, opts.width,             opts.height};

    for (int i = 0; i < opts.view_count; ++i) {
        const double arc = opts.view_count > 1
                               ? -35.0 + 70.0 * i / (opts.view_count - 1)
                               : 0.0;
        const double theta = arc * 0.017453292519943295;
        const double radius = 2.3 * e + 0.15 * e * rng.uniform(-1.0, 1.0);
        const double height = 0.3 * e * rng.uniform(-1.0, 1.0);
        const Eigen::Vector3d eye(radius * std::sin(theta), height, -radius * std::cos(theta));

        SceneCameras::View v;
        char name[16];
        std::snprintf(name, sizeof(name), "view_%03d", i);
        v.name = name;
        v.pose = CameraPose::look_at(eye, Eigen::Vector3d::Zero());
        cams.views.push_back(std::move(v));
    }

    fs::create_directories(directory / "images");
    fs::create_directories(directory / "masks");
    save_scene(scene, directory / "point_cloud.ply");
    save_cameras(cams, directory / "cameras.json");

    // Render ground truth from the reloaded scene so QA sees exactly what
    // consumers of the PLY will render (float32 storage and all).
    const GaussianScene stored = load_scene(directory / "point_cloud.ply");

    for (const auto& v : cams.views) {
        RenderResult full = render(stored, v.pose, cams.intrinsics);
        write_png(full.color, directory / "images" / (v.name + ".png"));

        RenderResult obj = render(object_only, v.pose, cams.intrinsics);
        Mask mask(opts.width, opts.height);
        for (int y = 0; y < opts.height; ++y)
            for (int x = 0; x < opts.width; ++x)
                mask.at(x, y) = obj.blend_weight.at(x, y) >= 0.5f ? 1.0f : 0.0f;
        write_mask_png(mask, directory / "masks" / (v.name + ".png"));
    }
}

}  // namespace blurforge
