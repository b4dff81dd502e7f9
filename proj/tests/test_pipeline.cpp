#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "blurforge/config.hpp"
#include "blurforge/dataset.hpp"
#include "blurforge/digest.hpp"
#include "blurforge/errors.hpp"
#include "blurforge/png_io.hpp"
#include "blurforge/rng.hpp"

using namespace blurforge;
namespace fs = std::filesystem;

namespace {

struct TempTree {
    fs::path root;
    explicit TempTree(const std::string& name) {
        root = fs::temp_directory_path() / name;
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~TempTree() { fs::remove_all(root); }
};

void touch(const fs::path& p, const std::string& content = "x") {
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    out << content;
}

DemoSceneOptions tiny_demo() {
    DemoSceneOptions d;
    d.seed = 7;
    d.width = 96;
    d.height = 72;
    d.view_count = 10;
    d.primitive_count = 250;
    return d;
}

DatasetConfig tiny_config(const fs::path& in_root, const fs::path& out_root) {
    DatasetConfig c;
    c.input_roots = {in_root};
    c.output_root = out_root;
    c.dataset_seed = 5;
    c.sub_frames = 5;
    c.trajectories_per_view = 2;
    c.resolution_denominators = {1};
    c.noise.enabled = false;
    c.views_per_scene = 2;
    return c;
}

std::map<std::string, std::string> hash_tree(const fs::path& root) {
    std::map<std::string, std::string> hashes;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file())
            hashes[fs::relative(entry.path(), root).generic_string()] =
                sha256_file(entry.path());
    return hashes;
}

}  // namespace

TEST_CASE("discovery of an empty root yields an empty list") {
    TempTree tmp("bf_disc_empty");
    const auto result = discover_scenes({tmp.root});
    CHECK(result.scenes.empty());
    CHECK(result.notes.empty());
}

TEST_CASE("discovery skips scenes missing a cameras file and records why") {
    TempTree tmp("bf_disc_skip");
    for (const char* id : {"a", "b", "c"}) {
        touch(tmp.root / id / "point_cloud.ply");
        touch(tmp.root / id / "cameras.json");
    }
    touch(tmp.root / "broken" / "point_cloud.ply");

    const auto result = discover_scenes({tmp.root});
    CHECK(result.scenes.size() == 3);
    REQUIRE(result.notes.size() == 1);
    CHECK(result.notes[0].scene_id == "broken");
    CHECK(result.notes[0].message.find("cameras.json") != std::string::npos);
}

TEST_CASE("discovery resolves scene id collisions in favor of the later root") {
    TempTree tmp("bf_disc_collide");
    touch(tmp.root / "r1" / "dup" / "point_cloud.ply");
    touch(tmp.root / "r1" / "dup" / "cameras.json");
    touch(tmp.root / "r2" / "dup" / "point_cloud.ply");
    touch(tmp.root / "r2" / "dup" / "cameras.json");

    const auto result = discover_scenes({tmp.root / "r1", tmp.root / "r2"});
    REQUIRE(result.scenes.size() == 1);
    CHECK(result.scenes[0].directory == tmp.root / "r2" / "dup");
    REQUIRE(result.notes.size() == 1);
    CHECK(result.notes[0].message.find("collision") != std::string::npos);
}

TEST_CASE("discovery errors on a missing root") {
    CHECK_THROWS_AS(discover_scenes({fs::path("/nonexistent/blurforge/root")}), IoError);
}

TEST_CASE("config JSON round trip preserves every field") {
    DatasetConfig c;
    c.input_roots = {"in_a", "in_b"};
    c.output_root = "out";
    c.dataset_seed = 99;
    c.sub_frames = 61;
    c.trajectories_per_view = 3;
    c.rigid_body_probability = 0.25;
    c.resolution_denominators = {1, 3};
    c.noise.shot_gain = 2e-3;
    c.views_per_scene = 4;
    c.crf = CrfModel::Gamma22;
    c.png_bit_depth = 16;

    const DatasetConfig back = config_from_json(config_to_json(c));
    CHECK(back.input_roots.size() == 2);
    CHECK(back.dataset_seed == 99);
    CHECK(back.sub_frames == 61);
    CHECK(back.trajectories_per_view == 3);
    CHECK(back.rigid_body_probability.value() == 0.25);
    CHECK(back.resolution_denominators == std::vector<int>{1, 3});
    CHECK(back.noise.shot_gain == 2e-3);
    CHECK(back.views_per_scene.value() == 4);
    CHECK(back.crf == CrfModel::Gamma22);
    CHECK(back.png_bit_depth == 16);
}

TEST_CASE("config validation rejects bad values") {
    DatasetConfig c;
    c.output_root = "out";
    c.sub_frames = 120;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c.sub_frames = 121;
    c.resolution_denominators = {5};
    CHECK_THROWS_AS(c.validate(), ContractError);
    c.resolution_denominators = {1};
    c.rigid_body_probability = 1.5;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c.rigid_body_probability.reset();
    CHECK_NOTHROW(c.validate());

    // views_per_scene accepts "all" or an integer.
    nlohmann::json j = config_to_json(c);
    j["views_per_scene"] = "all";
    CHECK_FALSE(config_from_json(j).views_per_scene.has_value());
    j["views_per_scene"] = "some";
    CHECK_THROWS_AS(config_from_json(j), ContractError);
}

TEST_CASE("run_pipeline writes the promised multiplicity and validates") {
    TempTree tmp("bf_run_counts");
    write_demo_scene(tmp.root / "scenes" / "demo", tiny_demo());
    const auto config = tiny_config(tmp.root / "scenes", tmp.root / "out");

    const DatasetManifest manifest = run_pipeline(config);
    REQUIRE(manifest.scenes.size() == 1);
    CHECK(manifest.scenes[0].status == "passed");
    REQUIRE(manifest.scenes[0].qa.has_value());
    CHECK(manifest.scenes[0].qa->passed);

    // views_per_scene=2, n=2, factors={1}: 2 sharp + 4 blurry.
    CHECK(manifest.pairs_written() == 2);
    CHECK(manifest.blurry_written() == 4);

    int sharp_files = 0, blur_files = 0;
    for (const auto& e : fs::recursive_directory_iterator(tmp.root / "out")) {
        if (!e.is_regular_file()) continue;
        const auto name = e.path().filename().string();
        if (name == "sharp.png") ++sharp_files;
        if (name.starts_with("blur_")) ++blur_files;
    }
    CHECK(sharp_files == 2);
    CHECK(blur_files == 4);

    CHECK(fs::exists(tmp.root / "out" / "demo" / "qa.json"));
    CHECK(validate_output(tmp.root / "out").empty());
}

TEST_CASE("run_pipeline refuses a dirty output root without --force") {
    TempTree tmp("bf_run_force");
    write_demo_scene(tmp.root / "scenes" / "demo", tiny_demo());
    const auto config = tiny_config(tmp.root / "scenes", tmp.root / "out");
    touch(tmp.root / "out" / "leftover.txt");

    CHECK_THROWS_AS(run_pipeline(config), IoError);
    RunOptions force;
    force.force = true;
    CHECK_NOTHROW(run_pipeline(config, force));
}

TEST_CASE("a corrupted held-out render fails QA and produces zero pairs") {
    TempTree tmp("bf_run_qafail");
    const fs::path scene_dir = tmp.root / "scenes" / "demo";
    write_demo_scene(scene_dir, tiny_demo());

    // Degrade one held-out ground-truth image by ~4 dB worth of error.
    const fs::path gt_path = scene_dir / "images" / "view_008.png";
    SrgbImage gt = read_png(gt_path);
    for (std::size_t i = 0; i < gt.data().size(); i += 2)
        gt.data()[i] = std::min(1.0f, gt.data()[i] + 0.18f);
    write_png(gt, gt_path);

    const auto config = tiny_config(tmp.root / "scenes", tmp.root / "out");
    const DatasetManifest manifest = run_pipeline(config);
    REQUIRE(manifest.scenes.size() == 1);
    CHECK(manifest.scenes[0].status == "failed");
    REQUIRE(manifest.scenes[0].qa.has_value());
    CHECK_FALSE(manifest.scenes[0].qa->passed);
    CHECK(manifest.scenes[0].pairs.empty());
    CHECK(manifest.pairs_written() == 0);
    CHECK(fs::exists(tmp.root / "out" / "demo" / "qa.json"));
}

TEST_CASE("rerunning with identical config reproduces every byte") {
    TempTree tmp("bf_run_determinism");
    write_demo_scene(tmp.root / "scenes" / "demo", tiny_demo());
    const auto config = tiny_config(tmp.root / "scenes", tmp.root / "out");

    run_pipeline(config);
    const auto first = hash_tree(tmp.root / "out");
    fs::remove_all(tmp.root / "out");
    run_pipeline(config);
    const auto second = hash_tree(tmp.root / "out");
    CHECK(first == second);
    CHECK_FALSE(first.empty());
}

TEST_CASE("resume fills in missing views and matches an uninterrupted run") {
    TempTree tmp("bf_run_resume");
    write_demo_scene(tmp.root / "scenes" / "demo", tiny_demo());
    const auto config = tiny_config(tmp.root / "scenes", tmp.root / "out");

    run_pipeline(config);
    const auto reference = hash_tree(tmp.root / "out");

    // Simulate an interrupted run: drop one view directory and the manifest.
    fs::remove_all(tmp.root / "out" / "demo" / "view_002");
    fs::remove(tmp.root / "out" / "manifest.json");

    RunOptions resume;
    resume.resume = true;
    run_pipeline(config, resume);
    CHECK(hash_tree(tmp.root / "out") == reference);
    CHECK(validate_output(tmp.root / "out").empty());

    // A torn provenance file (crash mid-write) must regenerate, not fail.
    touch(tmp.root / "out" / "demo" / "view_001" / "provenance.json", "{ torn");
    const DatasetManifest again = run_pipeline(config, resume);
    CHECK(again.scenes[0].status == "passed");
    CHECK(hash_tree(tmp.root / "out") == reference);
}

TEST_CASE("scene glob filters the run") {
    TempTree tmp("bf_run_glob");
    write_demo_scene(tmp.root / "scenes" / "alpha", tiny_demo());
    DemoSceneOptions other = tiny_demo();
    other.seed = 8;
    write_demo_scene(tmp.root / "scenes" / "beta", other);

    auto config = tiny_config(tmp.root / "scenes", tmp.root / "out");
    config.views_per_scene = 1;
    RunOptions run;
    run.scene_glob = "al*";
    const DatasetManifest manifest = run_pipeline(config, run);
    REQUIRE(manifest.scenes.size() == 1);
    CHECK(manifest.scenes[0].scene_id == "alpha");
}

TEST_CASE("qa-only runs report without disturbing an existing dataset") {
    TempTree tmp("bf_run_qaonly");
    write_demo_scene(tmp.root / "scenes" / "demo", tiny_demo());
    auto config = tiny_config(tmp.root / "scenes", tmp.root / "out");
    config.views_per_scene = 1;
    run_pipeline(config);
    const auto before = hash_tree(tmp.root / "out");

    const DatasetManifest qa = run_qa_only(config);
    REQUIRE(qa.scenes.size() == 1);
    CHECK(qa.scenes[0].status == "passed");
    CHECK(qa.pairs_written() == 0);
    CHECK(hash_tree(tmp.root / "out") == before);  // qa.json identical, manifest kept
    CHECK(validate_output(tmp.root / "out").empty());
}

TEST_CASE("dry run plans without touching the filesystem") {
    TempTree tmp("bf_run_dry");
    write_demo_scene(tmp.root / "scenes" / "demo", tiny_demo());
    const auto config = tiny_config(tmp.root / "scenes", tmp.root / "out");

    RunOptions dry;
    dry.dry_run = true;
    const DatasetManifest manifest = run_pipeline(config, dry);
    REQUIRE(manifest.scenes.size() == 1);
    CHECK(manifest.scenes[0].status == "planned");
    CHECK_FALSE(fs::exists(tmp.root / "out"));
}

TEST_CASE("validate_output notices tampered files") {
    TempTree tmp("bf_run_tamper");
    write_demo_scene(tmp.root / "scenes" / "demo", tiny_demo());
    auto config = tiny_config(tmp.root / "scenes", tmp.root / "out");
    config.views_per_scene = 1;
    run_pipeline(config);
    REQUIRE(validate_output(tmp.root / "out").empty());

    // Overwrite one blur image with a different one.
    const fs::path victim = tmp.root / "out" / "demo" / "view_001" / "blur_000.png";
    SrgbImage img = read_png(victim);
    img.data()[0] = 1.0f - img.data()[0];
    write_png(img, victim);
    CHECK_FALSE(validate_output(tmp.root / "out").empty());

    fs::remove(victim);
    CHECK_FALSE(validate_output(tmp.root / "out").empty());
}

TEST_CASE("trajectory provenance JSON carries seed, params, controls, anchor") {
    Rng rng(37);
    const CurveParams params = sample_curve_params(rng);
    const CameraPose anchor = CameraPose::look_at({0, 0, -2}, {0, 0, 0});
    MotionTrajectory traj = build_trajectory(rng, params, anchor, 9);
    traj.seed = 37;

    const nlohmann::json j = trajectory_to_json(traj);
    CHECK(j.at("seed").get<std::uint64_t>() == 37);
    CHECK(j.at("params").at("order").get<int>() == params.order);
    CHECK(j.at("params").at("delta_t").size() == 3);
    CHECK(j.at("control_points").size() == static_cast<std::size_t>(params.order + 1));
    CHECK(j.at("sample_count").get<int>() == 9);
    CHECK(j.at("anchor").at("rotation").size() == 4);
}

TEST_CASE("depth maps round trip through the BFDM dump format") {
    TempTree tmp("bf_depth_io");
    DepthMap d(20, 10);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 20; ++x) {
            if ((x + y) % 3 == 0) continue;  // leave some pixels invalid
            d.depth(x, y) = 0.5f + 0.01f * static_cast<float>(x * 10 + y);
            d.valid(x, y) = 1;
        }
    write_depth(d, tmp.root / "d.bfdm");
    const DepthMap back = read_depth(tmp.root / "d.bfdm");
    REQUIRE(back.width() == 20);
    REQUIRE(back.height() == 10);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 20; ++x) {
            CHECK(back.is_valid(x, y) == d.is_valid(x, y));
            if (d.is_valid(x, y)) CHECK(back.depth(x, y) == d.depth(x, y));
        }

    std::ofstream(tmp.root / "junk.bfdm") << "not a depth map at all";
    CHECK_THROWS_AS(read_depth(tmp.root / "junk.bfdm"), FormatError);
}

TEST_CASE("PNG round trips at both bit depths") {
    TempTree tmp("bf_png_io");
    SrgbImage img(33, 17);
    Rng rng(3);
    for (auto& v : img.data()) v = static_cast<float>(rng.uniform());

    write_png(img, tmp.root / "a8.png", 8);
    const SrgbImage r8 = read_png(tmp.root / "a8.png");
    REQUIRE(r8.width() == 33);
    for (std::size_t i = 0; i < img.data().size(); ++i)
        CHECK(std::abs(r8.data()[i] - img.data()[i]) <= 0.5f / 255.0f + 1e-6f);

    write_png(img, tmp.root / "a16.png", 16);
    const SrgbImage r16 = read_png(tmp.root / "a16.png");
    for (std::size_t i = 0; i < img.data().size(); ++i)
        CHECK(std::abs(r16.data()[i] - img.data()[i]) <= 0.5f / 65535.0f + 1e-7f);

    CHECK(png_dimensions(tmp.root / "a8.png") == std::pair<int, int>{33, 17});

    Mask m(9, 7);
    for (auto& v : m.data()) v = static_cast<float>(rng.uniform());
    write_mask_png(m, tmp.root / "m.png");
    const Mask mr = read_mask_png(tmp.root / "m.png");
    for (std::size_t i = 0; i < m.data().size(); ++i)
        CHECK(std::abs(mr.data()[i] - m.data()[i]) <= 0.5f / 255.0f + 1e-6f);
}

TEST_CASE("rigid-body pairs appear when masks exist and probability is 1") {
    TempTree tmp("bf_run_rigid");
    write_demo_scene(tmp.root / "scenes" / "demo", tiny_demo());
    auto config = tiny_config(tmp.root / "scenes", tmp.root / "out");
    config.rigid_body_probability = 1.0;
    config.views_per_scene = 1;
    config.trajectories_per_view = 1;

    const DatasetManifest manifest = run_pipeline(config);
    REQUIRE(manifest.scenes.size() == 1);
    REQUIRE(manifest.scenes[0].pairs.size() == 1);
    CHECK(manifest.scenes[0].pairs[0].rigid);
    CHECK(manifest.scenes[0].pairs[0].background_trajectories.size() == 1);
    CHECK(fs::exists(tmp.root / "out" / "demo" / "view_001" / "alpha.png"));
}
