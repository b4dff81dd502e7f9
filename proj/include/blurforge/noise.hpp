#pragma once

#include <cstdint>

#include "blurforge/crf.hpp"
#include "blurforge/image.hpp"

namespace blurforge {

// Heteroscedastic RAW-space noise model: variance shot_gain * signal +
// read_sigma^2 in linear units. The shot component uses a Gaussian
// approximation of Poisson noise by default (valid for photon counts >> 1);
// poisson_exact switches to true Poisson sampling for low-light work.
struct NoiseParams {
    double shot_gain = 1e-3;
    double read_sigma = 1e-3;
    std::uint64_t seed = 0;
    bool enabled = true;
    bool poisson_exact = false;
};

// sRGB -> linear -> add noise -> clamp -> sRGB. Deterministic in the seed;
// shot_gain = read_sigma = 0 returns the input unchanged.
SrgbImage add_noise(const SrgbImage& img, const NoiseParams& params,
                    CrfModel crf = CrfModel::Srgb);

}  // namespace blurforge
