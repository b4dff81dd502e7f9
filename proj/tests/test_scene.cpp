#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "blurforge/errors.hpp"
#include "blurforge/ply_io.hpp"
#include "blurforge/rng.hpp"
#include "blurforge/scene.hpp"
#include "blurforge/sh.hpp"

using namespace blurforge;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / "blurforge_scene_test";
    fs::create_directories(dir);
    return dir;
}

// Hand-rolled PLY writer so tests control the raw stored values.
void write_raw_ply(const fs::path& path, const std::vector<std::string>& props,
                   const std::vector<std::vector<float>>& vertices) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "ply\nformat binary_little_endian 1.0\nelement vertex " << vertices.size() << "\n";
    for (const auto& p : props) out << "property float " << p << "\n";
    out << "end_header\n";
    for (const auto& v : vertices)
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(float)));
}

std::vector<std::string> full_property_list() {
    std::vector<std::string> props = {"x", "y", "z"};
    for (int i = 0; i < 3; ++i) props.push_back("f_dc_" + std::to_string(i));
    for (int i = 0; i < 45; ++i) props.push_back("f_rest_" + std::to_string(i));
    props.push_back("opacity");
    for (int i = 0; i < 3; ++i) props.push_back("scale_" + std::to_string(i));
    for (int i = 0; i < 4; ++i) props.push_back("rot_" + std::to_string(i));
    return props;
}

std::vector<float> basic_vertex() {
    std::vector<float> v(3 + 3 + 45 + 1 + 3 + 4, 0.0f);
    v[3 + 3 + 45 + 1 + 3] = 1.0f;  // rot_0 = w
    return v;
}

ShCoeffs random_coeffs(Rng& rng) {
    ShCoeffs c;
    for (auto& v : c) v = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    return c;
}

Eigen::Vector3d random_direction(Rng& rng) {
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 6.283185307179586);
    const double s = std::sqrt(1.0 - z * z);
    return {s * std::cos(phi), s * std::sin(phi), z};
}

}  // namespace

TEST_CASE("eval_sh with zero coefficients returns the 0.5 offset") {
    ShCoeffs zero = GaussianPrimitive::zero_sh();
    const auto rgb = eval_sh({0, 0, 1}, zero);
    CHECK(rgb.x() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rgb.y() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rgb.z() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("eval_sh DC term uses Y00 = 0.28209479") {
    ShCoeffs c = GaussianPrimitive::zero_sh();
    c[0] = {1.0, -0.5, 0.25};
    const auto rgb = eval_sh({0, 0, 1}, c);
    CHECK(rgb.x() == doctest::Approx(0.28209479 * 1.0 + 0.5).epsilon(1e-7));
    CHECK(rgb.y() == doctest::Approx(std::max(0.0, 0.28209479 * -0.5 + 0.5)).epsilon(1e-7));
    CHECK(rgb.z() == doctest::Approx(0.28209479 * 0.25 + 0.5).epsilon(1e-7));
}

TEST_CASE("eval_sh degree-1 z-flip differs by twice the m=0 contribution") {
    ShCoeffs c = GaussianPrimitive::zero_sh();
    c[1] = {0.1, 0.2, 0.3};
    c[2] = {0.4, -0.2, 0.1};  // l=1, m=0 slot
    c[3] = {-0.3, 0.1, 0.2};
    const auto up = eval_sh({0, 0, 1}, c);
    const auto down = eval_sh({0, 0, -1}, c);
    const Eigen::Vector3d expected = 2.0 * 0.4886025119029199 * c[2];
    CHECK((up - down - expected).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("eval_sh is linear in the coefficients before clamping") {
    Rng rng(99);
    int tested = 0;
    for (int trial = 0; trial < 20 && tested < 5; ++trial) {
        const ShCoeffs a = random_coeffs(rng);
        const ShCoeffs b = random_coeffs(rng);
        ShCoeffs sum;
        for (int i = 0; i < kShCoeffCount; ++i) sum[i] = a[i] + b[i];
        const auto d = random_direction(rng);
        // Linearity only holds when the >= 0 clamp never fires.
        if ((eval_sh(d, a).array() == 0.0).any() || (eval_sh(d, b).array() == 0.0).any() ||
            (eval_sh(d, sum).array() == 0.0).any())
            continue;
        const Eigen::Vector3d offset(0.5, 0.5, 0.5);
        const auto ea = eval_sh(d, a) - offset;
        const auto eb = eval_sh(d, b) - offset;
        const auto es = eval_sh(d, sum) - offset;
        CHECK((es - ea - eb).norm() < 1e-10);
        ++tested;
    }
    CHECK(tested > 0);
}

TEST_CASE("eval_sh with DC-only coefficients is direction independent") {
    ShCoeffs c = GaussianPrimitive::zero_sh();
    c[0] = {0.7, 0.1, -0.2};
    Rng rng(5);
    const auto ref = eval_sh({1, 0, 0}, c);
    double max_dev = 0.0;
    for (int i = 0; i < 100; ++i)
        max_dev = std::max(max_dev, (eval_sh(random_direction(rng), c) - ref).norm());
    CHECK(max_dev == 0.0);
}

TEST_CASE("make_synthetic_scene is deterministic and respects bounds") {
    const auto a = make_synthetic_scene(7, 500, 2.0);
    const auto b = make_synthetic_scene(7, 500, 2.0);
    REQUIRE(a.primitives.size() == 500);
    REQUIRE(b.primitives.size() == 500);
    for (std::size_t i = 0; i < a.primitives.size(); ++i) {
        CHECK(a.primitives[i].position == b.primitives[i].position);
        CHECK(a.primitives[i].opacity == b.primitives[i].opacity);
    }
    CHECK(a.bounding_box.min.minCoeff() >= -2.0);
    CHECK(a.bounding_box.max.maxCoeff() <= 2.0);
    for (const auto& g : a.primitives) {
        CHECK(g.opacity >= 0.2);
        CHECK(g.opacity <= 1.0);
        CHECK(g.scale.minCoeff() >= 2.0 / 200.0 * 0.999);
        CHECK(g.scale.maxCoeff() <= 2.0 / 20.0 * 1.001);
        CHECK(std::abs(g.rotation.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("make_synthetic_scene count=1 stays inside the box") {
    const auto s = make_synthetic_scene(3, 1, 1.0);
    REQUIRE(s.primitives.size() == 1);
    CHECK(s.primitives[0].position.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("make_synthetic_scene validates preconditions") {
    CHECK_THROWS_AS(make_synthetic_scene(1, 0, 1.0), ContractError);
    CHECK_THROWS_AS(make_synthetic_scene(1, 10, 0.0), ContractError);
}

TEST_CASE("load_scene applies exp/sigmoid and normalizes") {
    const auto dir = temp_dir();
    const auto path = dir / "one.ply";
    // log-scale (0,0,0) and opacity logit 0 -> scale (1,1,1), opacity 0.5
    write_raw_ply(path, full_property_list(), {basic_vertex()});

    const auto scene = load_scene(path);
    REQUIRE(scene.primitives.size() == 1);
    const auto& g = scene.primitives[0];
    CHECK(g.scale.x() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.scale.y() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.scale.z() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.opacity == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(g.rotation.w() == doctest::Approx(1.0));
}

TEST_CASE("load_scene reports the first missing property") {
    const auto dir = temp_dir();
    const auto path = dir / "missing.ply";
    auto props = full_property_list();
    std::erase(props, "opacity");
    auto vertex = basic_vertex();
    vertex.pop_back();
    write_raw_ply(path, props, {vertex});

    CHECK_THROWS_WITH_AS(load_scene(path),
                         doctest::Contains("missing required PLY property 'opacity'"),
                         FormatError);
}

TEST_CASE("load_scene flags non-finite values with the primitive index") {
    const auto dir = temp_dir();
    const auto path = dir / "nan.ply";
    auto v0 = basic_vertex();
    auto v1 = basic_vertex();
    v1[0] = std::numeric_limits<float>::quiet_NaN();
    write_raw_ply(path, full_property_list(), {v0, v1});

    CHECK_THROWS_WITH_AS(load_scene(path), doctest::Contains("primitive 1"), DataError);
}

TEST_CASE("load_scene zero-pads lower SH degrees") {
    const auto dir = temp_dir();
    const auto path = dir / "deg1.ply";
    std::vector<std::string> props = {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2"};
    for (int i = 0; i < 9; ++i) props.push_back("f_rest_" + std::to_string(i));
    props.insert(props.end(), {"opacity", "scale_0", "scale_1", "scale_2",
                               "rot_0", "rot_1", "rot_2", "rot_3"});
    std::vector<float> v(props.size(), 0.0f);
    v[6] = 0.25f;   // f_rest_0 -> coeff 1, channel R
    v[9] = 0.5f;    // f_rest_3 -> coeff 1, channel G
    v[19] = 1.0f;   // rot_0
    write_raw_ply(path, props, {v});

    const auto scene = load_scene(path);
    const auto& c = scene.primitives[0].sh_coeffs;
    CHECK(c[1].x() == doctest::Approx(0.25));
    CHECK(c[1].y() == doctest::Approx(0.5));
    for (int k = 4; k < kShCoeffCount; ++k) CHECK(c[k].norm() == 0.0);
}

TEST_CASE("save/load round trip is lossless") {
    const auto dir = temp_dir();
    const auto p1 = dir / "rt1.ply";
    const auto p2 = dir / "rt2.ply";

    const auto original = make_synthetic_scene(42, 100, 1.0);
    save_scene(original, p1);
    const auto loaded1 = load_scene(p1);
    save_scene(loaded1, p2);
    const auto loaded2 = load_scene(p2);

    // Byte-compare oracle on the files themselves...
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::string bytes1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string bytes2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(bytes1 == bytes2);

    // ...and on the in-memory primitives.
    REQUIRE(loaded1.primitives.size() == loaded2.primitives.size());
    for (std::size_t i = 0; i < loaded1.primitives.size(); ++i) {
        const auto& a = loaded1.primitives[i];
        const auto& b = loaded2.primitives[i];
        CHECK(std::memcmp(a.position.data(), b.position.data(), 3 * sizeof(double)) == 0);
        CHECK(std::memcmp(a.scale.data(), b.scale.data(), 3 * sizeof(double)) == 0);
        CHECK(a.opacity == b.opacity);
        CHECK(a.rotation.coeffs() == b.rotation.coeffs());
        for (int k = 0; k < kShCoeffCount; ++k) CHECK(a.sh_coeffs[k] == b.sh_coeffs[k]);
    }

    // Invariants hold after load.
    for (const auto& g : loaded1.primitives) {
        CHECK(std::abs(g.rotation.norm() - 1.0) < 1e-6);
        CHECK(g.scale.minCoeff() > 0.0);
        CHECK(g.opacity >= 0.0);
        CHECK(g.opacity <= 1.0);
    }
}

TEST_CASE("bounding box contains every primitive") {
    const auto s = make_synthetic_scene(13, 64, 1.5);
    for (const auto& g : s.primitives) {
        CHECK((g.position.array() >= s.bounding_box.min.array()).all());
        CHECK((g.position.array() <= s.bounding_box.max.array()).all());
    }
}
