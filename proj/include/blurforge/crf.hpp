#pragma once

#include "blurforge/image.hpp"

namespace blurforge {

// Camera response model used for linear <-> display conversion. The blur
// integral is only valid in linear radiance, so every accumulation routes
// through these.
enum class CrfModel { Srgb, Gamma22 };

double crf_forward_value(double linear, CrfModel model = CrfModel::Srgb);
double crf_inverse_value(double srgb, CrfModel model = CrfModel::Srgb);

// Elementwise transfer; inputs are clamped to [0, 1] first.
SrgbImage crf_forward(const LinearImage& img, CrfModel model = CrfModel::Srgb);
LinearImage crf_inverse(const SrgbImage& img, CrfModel model = CrfModel::Srgb);

}  // namespace blurforge
