#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blurforge/image.hpp"

namespace blurforge {

// Cap applied when serializing PSNR so identical images stay JSON-friendly;
// in-memory comparisons always use the uncapped value.
inline constexpr double kPsnrCap = 99.0;

// 10*log10(1/MSE) over all channels, peak 1.0. Identical images give +inf.
double psnr(const SrgbImage& a, const SrgbImage& b);
double capped_psnr(double value);

// Mean local SSIM with an 11x11 Gaussian window (sigma 1.5), C1=0.01^2,
// C2=0.03^2, computed per channel on [0,1] data and averaged. Windows must
// fit: min dimension >= 11.
double ssim(const SrgbImage& a, const SrgbImage& b);

struct SceneQAReport {
    std::string scene_id;
    std::vector<std::pair<int, double>> per_view_psnr;  // (view index, dB)
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    bool passed = false;
    std::string threshold_rule;
};

// Flags failure iff any view sits more than threshold_db below the mean
// PSNR. The mean uses capped values so a lossless view cannot blow up the
// statistic; the per-view comparison uses the raw values.
SceneQAReport qa_report_from_psnrs(const std::vector<double>& view_psnrs,
                                   double threshold_db = 3.0);

// Per-view PSNR against held-out ground truth, plus the dataset-level mean
// SSIM. Needs at least two views.
SceneQAReport qa_filter_scene(
    const std::vector<std::pair<SrgbImage, SrgbImage>>& gt_and_render,
    double threshold_db = 3.0);

}  // namespace blurforge
