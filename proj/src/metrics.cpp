#include "blurforge/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "blurforge/errors.hpp"

namespace blurforge {

double psnr(const SrgbImage& a, const SrgbImage& b) {
    if (!a.same_size(b)) throw ContractError("psnr: dimension mismatch");
    const auto& da = a.data();
    const auto& db = b.data();
    double sq = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = static_cast<double>(da[i]) - db[i];
        sq += d * d;
    }
    if (sq == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(static_cast<double>(da.size()) / sq);
}

double capped_psnr(double value) { return std::min(value, kPsnrCap); }

namespace {

constexpr int kWindow = 11;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWindow> gaussian_window() {
    std::array<double, kWindow> w{};
    const double sigma = 1.5;
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - (kWindow - 1) / 2.0;
        w[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable weighted filter, valid mode: output is (w-10) x (h-10).
std::vector<double> filter_valid(const std::vector<double>& img, int w, int h) {
    static const auto win = gaussian_window();
    const int out_w = w - kWindow + 1;
    const int out_h = h - kWindow + 1;
    std::vector<double> horiz(static_cast<std::size_t>(out_w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) acc += win[k] * img[y * w + x + k];
            horiz[static_cast<std::size_t>(y) * out_w + x] = acc;
        }
    std::vector<double> out(static_cast<std::size_t>(out_w) * out_h);
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k)
                acc += win[k] * horiz[static_cast<std::size_t>(y + k) * out_w + x];
            out[static_cast<std::size_t>(y) * out_w + x] = acc;
        }
    return out;
}

double ssim_channel(const std::vector<double>& a, const std::vector<double>& b, int w, int h) {
    std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    const auto mu_a = filter_valid(a, w, h);
    const auto mu_b = filter_valid(b, w, h);
    const auto m_aa = filter_valid(aa, w, h);
    const auto m_bb = filter_valid(bb, w, h);
    const auto m_ab = filter_valid(ab, w, h);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double var_a = m_aa[i] - mu_a[i] * mu_a[i];
        const double var_b = m_bb[i] - mu_b[i] * mu_b[i];
        const double cov = m_ab[i] - mu_a[i] * mu_b[i];
        const double num = (2.0 * mu_a[i] * mu_b[i] + kC1) * (2.0 * cov + kC2);
        const double den =
            (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1) * (var_a + var_b + kC2);
        total += num / den;
    }
    return total / static_cast<double>(mu_a.size());
}

}  // namespace

double ssim(const SrgbImage& a, const SrgbImage& b) {
    if (!a.same_size(b)) throw ContractError("ssim: dimension mismatch");
    if (a.width() < kWindow || a.height() < kWindow)
        throw ContractError("ssim: image smaller than the 11x11 window");

    const int w = a.width(), h = a.height();
    const std::size_t n = a.pixel_count();
    double total = 0.0;
    std::vector<double> ca(n), cb(n);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            ca[i] = a.data()[i * 3 + c];
            cb[i] = b.data()[i * 3 + c];
        }
        total += ssim_channel(ca, cb, w, h);
    }
    return total / 3.0;
}

SceneQAReport qa_report_from_psnrs(const std::vector<double>& view_psnrs,
                                   double threshold_db) {
    if (view_psnrs.size() < 2)
        throw ContractError("qa filter needs at least two held-out views");

    SceneQAReport report;
    double sum = 0.0;
    for (std::size_t i = 0; i < view_psnrs.size(); ++i) {
        report.per_view_psnr.emplace_back(static_cast<int>(i), view_psnrs[i]);
        sum += capped_psnr(view_psnrs[i]);
    }
    report.mean_psnr = sum / static_cast<double>(view_psnrs.size());

    // "More than threshold below the mean" -- a drop of exactly the
    // threshold still passes.
    report.passed = std::none_of(view_psnrs.begin(), view_psnrs.end(), [&](double v) {
        return v < report.mean_psnr - threshold_db;
    });
    report.threshold_rule =
        "fail if any view PSNR drops more than " + std::to_string(threshold_db) +
        " dB below the mean";
    return report;
}

SceneQAReport qa_filter_scene(
    const std::vector<std::pair<SrgbImage, SrgbImage>>& gt_and_render,
    double threshold_db) {
    if (gt_and_render.size() < 2)
        throw ContractError("qa filter needs at least two held-out views");

    std::vector<double> psnrs;
    double ssim_sum = 0.0;
    psnrs.reserve(gt_and_render.size());
    for (const auto& [gt, rendered] : gt_and_render) {
        psnrs.push_back(psnr(gt, rendered));
        ssim_sum += ssim(gt, rendered);
    }
    SceneQAReport report = qa_report_from_psnrs(psnrs, threshold_db);
    report.mean_ssim = ssim_sum / static_cast<double>(gt_and_render.size());
    return report;
}

}  // namespace blurforge
