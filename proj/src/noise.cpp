#include "blurforge/noise.hpp"

#include <algorithm>
#include <cmath>

#include "blurforge/rng.hpp"

namespace blurforge {

namespace {

// Knuth's product method, split recursively so exp(-lambda) never
// underflows. O(lambda) uniforms per sample; fine for an opt-in mode.
std::uint64_t sample_poisson(Rng& rng, double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda > 256.0)
        return sample_poisson(rng, lambda * 0.5) + sample_poisson(rng, lambda * 0.5);
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.uniform();
    } while (p > limit);
    return k - 1;
}

}  // namespace

SrgbImage add_noise(const SrgbImage& img, const NoiseParams& params, CrfModel crf) {
    if (!params.enabled || (params.shot_gain == 0.0 && params.read_sigma == 0.0)) return img;

    Rng rng(mix_seed(params.seed));
    const double read_var = params.read_sigma * params.read_sigma;

    SrgbImage out(img.width(), img.height());
    const auto& src = img.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double x = crf_inverse_value(src[i], crf);
        double noisy;
        if (params.poisson_exact && params.shot_gain > 0.0) {
            // Photon count ~ Poisson(x / gain); rescaling by the gain gives
            // mean x and variance shot_gain * x.
            noisy = static_cast<double>(sample_poisson(rng, x / params.shot_gain)) *
                    params.shot_gain;
            noisy += params.read_sigma * rng.normal();
        } else {
            const double sigma = std::sqrt(params.shot_gain * x + read_var);
            noisy = x + sigma * rng.normal();
        }
        dst[i] = static_cast<float>(crf_forward_value(std::clamp(noisy, 0.0, 1.0), crf));
    }
    return out;
}

}  // namespace blurforge
