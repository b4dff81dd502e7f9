#include "blurforge/crf.hpp"

#include <algorithm>
#include <cmath>

namespace blurforge {

double crf_forward_value(double linear, CrfModel model) {
    const double x = std::clamp(linear, 0.0, 1.0);
    if (model == CrfModel::Gamma22) return std::pow(x, 1.0 / 2.2);
    return x <= 0.0031308 ? 12.92 * x : 1.055 * std::pow(x, 1.0 / 2.4) - 0.055;
}

double crf_inverse_value(double srgb, CrfModel model) {
    const double y = std::clamp(srgb, 0.0, 1.0);
    if (model == CrfModel::Gamma22) return std::pow(y, 2.2);
    return y <= 0.04045 ? y / 12.92 : std::pow((y + 0.055) / 1.055, 2.4);
}

SrgbImage crf_forward(const LinearImage& img, CrfModel model) {
    SrgbImage out(img.width(), img.height());
    const auto& src = img.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = static_cast<float>(crf_forward_value(src[i], model));
    return out;
}

LinearImage crf_inverse(const SrgbImage& img, CrfModel model) {
    LinearImage out(img.width(), img.height());
    const auto& src = img.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = static_cast<float>(crf_inverse_value(src[i], model));
    return out;
}

}  // namespace blurforge
