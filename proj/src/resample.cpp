#include "blurforge/resample.hpp"

#include <cmath>

#include "blurforge/errors.hpp"

namespace blurforge {

SrgbImage downscale(const SrgbImage& img, int denominator, CrfModel crf) {
    if (denominator < 1 || denominator > 4)
        throw ContractError("downscale: denominator must be in {1,2,3,4}");
    if (denominator == 1) return img;

    const int out_w = img.width() / denominator;
    const int out_h = img.height() / denominator;
    if (out_w < 1 || out_h < 1) throw ContractError("downscale: image too small for factor");

    // Center crop to a divisible size.
    const int x_off = (img.width() - out_w * denominator) / 2;
    const int y_off = (img.height() - out_h * denominator) / 2;

    SrgbImage out(out_w, out_h);
    const double inv = 1.0 / (denominator * denominator);
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            double acc[3] = {0, 0, 0};
            for (int by = 0; by < denominator; ++by) {
                const float* row = img.pixel(x_off + x * denominator,
                                             y_off + y * denominator + by);
                for (int bx = 0; bx < denominator; ++bx)
                    for (int c = 0; c < 3; ++c)
                        acc[c] += crf_inverse_value(row[bx * 3 + c], crf);
            }
            float* px = out.pixel(x, y);
            for (int c = 0; c < 3; ++c)
                px[c] = static_cast<float>(crf_forward_value(acc[c] * inv, crf));
        }
    }
    return out;
}

BlurPair degrade(BlurPair pair, const DegradeOptions& opts, Rng& rng) {
    const auto& factors = opts.resolution_denominators;
    int denominator = 1;
    if (!factors.empty())
        denominator = factors[rng.uniform_index(factors.size())];

    if (denominator != 1) {
        pair.sharp = downscale(pair.sharp, denominator, opts.crf);
        for (auto& b : pair.blurry) b = downscale(b, denominator, opts.crf);
        if (pair.object_alpha) {
            // The matte is coverage, not radiance: plain box average.
            const Mask& m = *pair.object_alpha;
            const int out_w = m.width() / denominator;
            const int out_h = m.height() / denominator;
            const int x_off = (m.width() - out_w * denominator) / 2;
            const int y_off = (m.height() - out_h * denominator) / 2;
            Mask small(out_w, out_h);
            const double inv = 1.0 / (denominator * denominator);
            for (int y = 0; y < out_h; ++y)
                for (int x = 0; x < out_w; ++x) {
                    double acc = 0;
                    for (int by = 0; by < denominator; ++by)
                        for (int bx = 0; bx < denominator; ++bx)
                            acc += m.at(x_off + x * denominator + bx,
                                        y_off + y * denominator + by);
                    small.at(x, y) = static_cast<float>(acc * inv);
                }
            *pair.object_alpha = std::move(small);
        }
    }
    pair.scale_denominator = denominator;

    if (opts.noise.enabled && (opts.noise.shot_gain > 0 || opts.noise.read_sigma > 0)) {
        NoiseParams np = opts.noise;
        for (std::size_t k = 0; k < pair.blurry.size(); ++k) {
            np.seed = combine_seed(opts.noise.seed, k);
            pair.blurry[k] = add_noise(pair.blurry[k], np, opts.crf);
        }
        pair.noise_params = opts.noise;
    }
    return pair;
}

}  // namespace blurforge
