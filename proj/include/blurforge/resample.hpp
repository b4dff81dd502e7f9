#pragma once

#include <vector>

#include "blurforge/blur.hpp"
#include "blurforge/image.hpp"

namespace blurforge {

// Area-average downscale by 1/denominator (denominator in {1,2,3,4}),
// performed in linear space. Dimensions that do not divide evenly are
// center-cropped first so sharp/blurry stay aligned.
SrgbImage downscale(const SrgbImage& img, int denominator, CrfModel crf = CrfModel::Srgb);

struct DegradeOptions {
    std::vector<int> resolution_denominators = {1};  // candidates for the random pick
    NoiseParams noise;
    CrfModel crf = CrfModel::Srgb;
};

// Multi-resolution + noise pass: picks one factor for the whole pair,
// downscales sharp and blurry identically, then adds noise to the blurry
// images only. Order is strictly downscale -> noise.
BlurPair degrade(BlurPair pair, const DegradeOptions& opts, Rng& rng);

}  // namespace blurforge
