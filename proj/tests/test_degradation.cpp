#include <doctest.h>

#include <cmath>

#include "blurforge/blur.hpp"
#include "blurforge/errors.hpp"
#include "blurforge/noise.hpp"
#include "blurforge/resample.hpp"
#include "blurforge/rng.hpp"

using namespace blurforge;

namespace {

SrgbImage gray_image(int w, int h, float level) {
    SrgbImage img(w, h);
    for (auto& v : img.data()) v = level;
    return img;
}

// Sample variance of (linearized output - linearized input).
double linear_noise_variance(const SrgbImage& noisy, const SrgbImage& clean) {
    const LinearImage a = crf_inverse(noisy);
    const LinearImage b = crf_inverse(clean);
    double sum = 0.0, sq = 0.0;
    const std::size_t n = a.data().size();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(a.data()[i]) - b.data()[i];
        sum += d;
        sq += d * d;
    }
    const double mean = sum / static_cast<double>(n);
    return sq / static_cast<double>(n) - mean * mean;
}

}  // namespace

TEST_CASE("zero noise parameters return the input unchanged") {
    const SrgbImage img = gray_image(32, 32, 0.4f);
    NoiseParams p;
    p.shot_gain = 0.0;
    p.read_sigma = 0.0;
    const SrgbImage out = add_noise(img, p);
    CHECK(out.data() == img.data());
}

TEST_CASE("noise is reproducible bit-exactly from the seed") {
    const SrgbImage img = gray_image(64, 64, 0.5f);
    NoiseParams p;
    p.shot_gain = 2e-3;
    p.read_sigma = 3e-3;
    p.seed = 99;
    const SrgbImage a = add_noise(img, p);
    const SrgbImage b = add_noise(img, p);
    CHECK(a.data() == b.data());

    p.seed = 100;
    const SrgbImage c = add_noise(img, p);
    CHECK(a.data() != c.data());
}

TEST_CASE("empirical noise variance matches the heteroscedastic model") {
    // 576*576*3 ~ 1e6 samples at a single gray level.
    const SrgbImage img = gray_image(576, 576, 0.5f);
    NoiseParams p;
    p.shot_gain = 4e-3;
    p.read_sigma = 2e-3;
    p.seed = 7;
    const SrgbImage out = add_noise(img, p);

    const double x = crf_inverse_value(0.5);
    const double expected = p.shot_gain * x + p.read_sigma * p.read_sigma;
    const double measured = linear_noise_variance(out, img);
    CHECK(measured == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("variance grows affinely with the signal level") {
    NoiseParams p;
    p.shot_gain = 1e-3;
    p.read_sigma = 0.01;
    const float levels[5] = {0.25f, 0.4f, 0.55f, 0.7f, 0.85f};

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < 5; ++i) {
        const SrgbImage img = gray_image(384, 384, levels[i]);
        p.seed = 50 + i;
        const SrgbImage out = add_noise(img, p);
        const double x = crf_inverse_value(levels[i]);
        const double v = linear_noise_variance(out, img);
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
    }
    const double n = 5.0;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    CHECK(slope == doctest::Approx(p.shot_gain).epsilon(0.10));
    CHECK(intercept == doctest::Approx(p.read_sigma * p.read_sigma).epsilon(0.10));
}

TEST_CASE("exact Poisson mode matches the same variance model") {
    const SrgbImage img = gray_image(512, 512, 0.5f);
    NoiseParams p;
    p.shot_gain = 4e-3;
    p.read_sigma = 2e-3;
    p.poisson_exact = true;
    p.seed = 17;
    const SrgbImage out = add_noise(img, p);

    const double x = crf_inverse_value(0.5);
    const double expected = p.shot_gain * x + p.read_sigma * p.read_sigma;
    CHECK(linear_noise_variance(out, img) == doctest::Approx(expected).epsilon(0.05));

    // Mean is preserved and the draw is seed-deterministic.
    const LinearImage lin = crf_inverse(out);
    double mean = 0.0;
    for (float v : lin.data()) mean += v;
    mean /= static_cast<double>(lin.data().size());
    CHECK(mean == doctest::Approx(x).epsilon(0.01));
    CHECK(add_noise(img, p).data() == out.data());
}

TEST_CASE("downscale keeps constants and bins in linear space") {
    const SrgbImage c = gray_image(32, 32, 0.62f);
    const SrgbImage half = downscale(c, 2);
    CHECK(half.width() == 16);
    CHECK(half.height() == 16);
    for (float v : half.data()) CHECK(v == doctest::Approx(0.62).epsilon(1e-6));

    // 2x2 checkerboard of 0 and 1 at factor 1/2 -> uniform g(0.5).
    SrgbImage board(32, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            const float v = ((x + y) % 2 == 0) ? 0.0f : 1.0f;
            float* px = board.pixel(x, y);
            px[0] = px[1] = px[2] = v;
        }
    const SrgbImage avg = downscale(board, 2);
    for (float v : avg.data())
        CHECK(v == doctest::Approx(crf_forward_value(0.5)).epsilon(1e-6));
}

TEST_CASE("downscale dimension contract for factor 1/3") {
    const SrgbImage img = gray_image(6, 6, 0.3f);
    const SrgbImage third = downscale(img, 3);
    CHECK(third.width() == 2);
    CHECK(third.height() == 2);

    // Non-divisible input is center-cropped first.
    const SrgbImage odd = gray_image(7, 8, 0.3f);
    const SrgbImage out = downscale(odd, 3);
    CHECK(out.width() == 2);
    CHECK(out.height() == 2);

    CHECK_THROWS_AS(downscale(img, 5), ContractError);
}

TEST_CASE("downscale commutes with constant offsets in linear space") {
    Rng rng(12);
    SrgbImage img(24, 24);
    for (auto& v : img.data()) v = static_cast<float>(rng.uniform(0.1, 0.6));
    const double c = 0.08;

    SrgbImage shifted(24, 24);
    for (std::size_t i = 0; i < img.data().size(); ++i)
        shifted.data()[i] =
            static_cast<float>(crf_forward_value(crf_inverse_value(img.data()[i]) + c));

    const SrgbImage path_a = downscale(shifted, 2);
    SrgbImage path_b = downscale(img, 2);
    for (auto& v : path_b.data())
        v = static_cast<float>(crf_forward_value(crf_inverse_value(v) + c));

    for (std::size_t i = 0; i < path_a.data().size(); ++i)
        CHECK(std::abs(path_a.data()[i] - path_b.data()[i]) <= 1e-6);
}

TEST_CASE("degrade leaves the pair untouched when disabled") {
    Rng rng(5);
    BlurPair pair;
    pair.sharp = gray_image(24, 24, 0.5f);
    pair.blurry = {gray_image(24, 24, 0.4f)};

    DegradeOptions opts;
    opts.resolution_denominators = {1};
    opts.noise.enabled = false;
    const BlurPair out = degrade(pair, opts, rng);
    CHECK(out.scale_denominator == 1);
    CHECK(out.sharp.data() == pair.sharp.data());
    CHECK(out.blurry[0].data() == pair.blurry[0].data());
}

TEST_CASE("degrade records the factor and downscales sharp and blurry alike") {
    Rng rng(6);
    BlurPair pair;
    pair.sharp = gray_image(24, 24, 0.5f);
    pair.blurry = {gray_image(24, 24, 0.4f), gray_image(24, 24, 0.3f)};

    DegradeOptions opts;
    opts.resolution_denominators = {3};
    opts.noise.enabled = false;
    const BlurPair out = degrade(pair, opts, rng);
    CHECK(out.scale_denominator == 3);
    CHECK(out.sharp.width() == 8);
    CHECK(out.blurry[0].width() == 8);
    CHECK(out.blurry[1].height() == 8);
}

TEST_CASE("degrade applies noise to blurry images only") {
    Rng rng(7);
    BlurPair pair;
    pair.sharp = gray_image(32, 32, 0.5f);
    pair.blurry = {gray_image(32, 32, 0.5f)};

    DegradeOptions opts;
    opts.resolution_denominators = {2};
    opts.noise.shot_gain = 2e-3;
    opts.noise.read_sigma = 2e-3;
    opts.noise.seed = 3;
    const BlurPair out = degrade(pair, opts, rng);

    const SrgbImage sharp_expected = downscale(pair.sharp, 2);
    CHECK(out.sharp.data() == sharp_expected.data());

    const SrgbImage blur_clean = downscale(pair.blurry[0], 2);
    CHECK(out.blurry[0].data() != blur_clean.data());
}

TEST_CASE("noise after downscale carries full variance, noise before loses 4x") {
    const SrgbImage img = gray_image(512, 512, 0.5f);
    NoiseParams p;
    p.shot_gain = 2e-3;
    p.read_sigma = 2e-3;
    p.seed = 11;

    const SrgbImage after = add_noise(downscale(img, 2), p);
    const SrgbImage before = downscale(add_noise(img, p), 2);

    const SrgbImage clean = downscale(img, 2);
    const double var_after = linear_noise_variance(after, clean);
    const double var_before = linear_noise_variance(before, clean);
    const double ratio = var_after / var_before;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}
