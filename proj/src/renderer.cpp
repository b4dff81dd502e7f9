#include "blurforge/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "blurforge/sh.hpp"

namespace blurforge {

namespace {

constexpr double kCovDilation = 0.3;  // px^2, matches the reference rasterizer

struct PreparedSplat {
    double mean_x, mean_y;
    double inv00, inv01, inv11;  // inverse 2D covariance
    double radius_x, radius_y;   // footprint half-extent, pixels
    double depth;
    double opacity;
    Eigen::Vector3d color;
};

std::vector<SplattedGaussian> project_all_sorted(const GaussianScene& scene,
                                                 const CameraPose& pose,
                                                 const CameraIntrinsics& intr) {
    std::vector<SplattedGaussian> splats;
    splats.reserve(scene.primitives.size());
    for (const auto& g : scene.primitives) {
        if (auto s = project_gaussian(g, pose, intr)) splats.push_back(*s);
    }
    std::stable_sort(splats.begin(), splats.end(),
                     [](const SplattedGaussian& a, const SplattedGaussian& b) {
                         return a.view_depth < b.view_depth;
                     });
    return splats;
}

PreparedSplat prepare(const SplattedGaussian& s, double min_alpha) {
    PreparedSplat p;
    p.mean_x = s.mean2d.x();
    p.mean_y = s.mean2d.y();
    const double c00 = s.cov2d(0, 0), c01 = s.cov2d(0, 1), c11 = s.cov2d(1, 1);
    const double det = c00 * c11 - c01 * c01;
    p.inv00 = c11 / det;
    p.inv01 = -c01 / det;
    p.inv11 = c00 / det;
    // At Mahalanobis distance r the contribution is opacity * exp(-r^2/2);
    // the box is sized so everything dropped outside it is below min_alpha.
    const double max_maha_sq = 2.0 * std::max(0.0, std::log(s.opacity / min_alpha));
    p.radius_x = std::sqrt(max_maha_sq * c00);
    p.radius_y = std::sqrt(max_maha_sq * c11);
    p.depth = s.view_depth;
    p.opacity = s.opacity;
    p.color = s.color;
    return p;
}

struct PixelAccumulator {
    double r = 0, g = 0, b = 0;
    double depth_weighted = 0;
    double weight = 0;
    double transmittance = 1.0;

    void add(const PreparedSplat& s, double alpha) {
        const double w = alpha * transmittance;
        r += w * s.color.x();
        g += w * s.color.y();
        b += w * s.color.z();
        depth_weighted += w * s.depth;
        weight += w;
        transmittance *= 1.0 - alpha;
    }
};

void store_pixel(const PixelAccumulator& acc, const RenderOptions& opts, int x, int y,
                 RenderResult& out) {
    float* px = out.color.pixel(x, y);
    px[0] = static_cast<float>(std::clamp(acc.r + acc.transmittance * opts.background.x(), 0.0, 1.0));
    px[1] = static_cast<float>(std::clamp(acc.g + acc.transmittance * opts.background.y(), 0.0, 1.0));
    px[2] = static_cast<float>(std::clamp(acc.b + acc.transmittance * opts.background.z(), 0.0, 1.0));
    out.blend_weight.at(x, y) = static_cast<float>(acc.weight);
    if (acc.weight > opts.depth_validity_threshold) {
        out.depth.depth(x, y) = static_cast<float>(acc.depth_weighted / acc.weight);
        out.depth.valid(x, y) = 1;
    }
}

}  // namespace

std::optional<SplattedGaussian> project_gaussian(const GaussianPrimitive& g,
                                                 const CameraPose& pose,
                                                 const CameraIntrinsics& intr) {
    const Eigen::Vector3d t = pose.to_camera(g.position);
    const double z = t.z();
    if (z <= kNearPlane) return std::nullopt;

    SplattedGaussian s;
    s.view_depth = z;
    s.mean2d = {intr.fx * t.x() / z + intr.cx, intr.fy * t.y() / z + intr.cy};

    Eigen::Matrix<double, 2, 3> jac;
    jac << intr.fx / z, 0.0, -intr.fx * t.x() / (z * z),
           0.0, intr.fy / z, -intr.fy * t.y() / (z * z);

    const Eigen::Matrix3d w = pose.rotation.toRotationMatrix();
    const Eigen::Matrix<double, 2, 3> jw = jac * w;
    s.cov2d = jw * g.covariance() * jw.transpose();
    s.cov2d(0, 0) += kCovDilation;
    s.cov2d(1, 1) += kCovDilation;

    s.opacity = g.opacity;
    s.color = eval_sh((g.position - pose.camera_center()).normalized(), g.sh_coeffs);
    return s;
}

RenderResult render(const GaussianScene& scene, const CameraPose& pose,
                    const CameraIntrinsics& intr, const RenderOptions& opts) {
    intr.validate();
    const int w = intr.width, h = intr.height;
    RenderResult out{SrgbImage(w, h), DepthMap(w, h), Mask(w, h)};

    const auto sorted = project_all_sorted(scene, pose, intr);
    std::vector<PreparedSplat> splats;
    splats.reserve(sorted.size());
    for (const auto& s : sorted) {
        if (s.opacity < opts.min_alpha) continue;
        splats.push_back(prepare(s, opts.min_alpha));
    }

    const int tiles_x = (w + kTileSize - 1) / kTileSize;
    const int tiles_y = (h + kTileSize - 1) / kTileSize;

    // Depth-sorted insertion keeps every per-tile list depth-sorted.
    std::vector<std::vector<int>> tile_lists(static_cast<std::size_t>(tiles_x) * tiles_y);
    for (int i = 0; i < static_cast<int>(splats.size()); ++i) {
        const PreparedSplat& s = splats[i];
        const int tx0 = std::clamp(static_cast<int>(std::floor((s.mean_x - s.radius_x) / kTileSize)), 0, tiles_x - 1);
        const int tx1 = std::clamp(static_cast<int>(std::floor((s.mean_x + s.radius_x) / kTileSize)), 0, tiles_x - 1);
        const int ty0 = std::clamp(static_cast<int>(std::floor((s.mean_y - s.radius_y) / kTileSize)), 0, tiles_y - 1);
        const int ty1 = std::clamp(static_cast<int>(std::floor((s.mean_y + s.radius_y) / kTileSize)), 0, tiles_y - 1);
        if (s.mean_x + s.radius_x < 0 || s.mean_x - s.radius_x > w - 1 ||
            s.mean_y + s.radius_y < 0 || s.mean_y - s.radius_y > h - 1)
            continue;
        for (int ty = ty0; ty <= ty1; ++ty)
            for (int tx = tx0; tx <= tx1; ++tx)
                tile_lists[static_cast<std::size_t>(ty) * tiles_x + tx].push_back(i);
    }

#pragma omp parallel for schedule(dynamic)
    for (int tile = 0; tile < tiles_x * tiles_y; ++tile) {
        const auto& list = tile_lists[tile];
        const int x0 = (tile % tiles_x) * kTileSize;
        const int y0 = (tile / tiles_x) * kTileSize;
        const int x1 = std::min(x0 + kTileSize, w);
        const int y1 = std::min(y0 + kTileSize, h);

        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
                PixelAccumulator acc;
                for (int idx : list) {
                    const PreparedSplat& s = splats[idx];
                    const double dx = x - s.mean_x;
                    const double dy = y - s.mean_y;
                    if (std::abs(dx) > s.radius_x || std::abs(dy) > s.radius_y) continue;
                    const double maha = s.inv00 * dx * dx + 2.0 * s.inv01 * dx * dy +
                                        s.inv11 * dy * dy;
                    const double alpha =
                        std::min(opts.alpha_clamp, s.opacity * std::exp(-0.5 * maha));
                    if (alpha < opts.min_alpha) continue;
                    acc.add(s, alpha);
                    if (acc.transmittance < opts.termination_transmittance) break;
                }
                store_pixel(acc, opts, x, y, out);
            }
        }
    }
    return out;
}

RenderResult render_reference(const GaussianScene& scene, const CameraPose& pose,
                              const CameraIntrinsics& intr, const RenderOptions& opts) {
    intr.validate();
    const int w = intr.width, h = intr.height;
    RenderResult out{SrgbImage(w, h), DepthMap(w, h), Mask(w, h)};

    const auto sorted = project_all_sorted(scene, pose, intr);
    std::vector<PreparedSplat> splats;
    splats.reserve(sorted.size());
    for (const auto& s : sorted) splats.push_back(prepare(s, 1.0));  // radii unused here

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            PixelAccumulator acc;
            for (const PreparedSplat& s : splats) {
                const double dx = x - s.mean_x;
                const double dy = y - s.mean_y;
                const double maha =
                    s.inv00 * dx * dx + 2.0 * s.inv01 * dx * dy + s.inv11 * dy * dy;
                const double alpha =
                    std::min(opts.alpha_clamp, s.opacity * std::exp(-0.5 * maha));
                acc.add(s, alpha);
            }
            store_pixel(acc, opts, x, y, out);
        }
    }
    return out;
}

}  // namespace blurforge
