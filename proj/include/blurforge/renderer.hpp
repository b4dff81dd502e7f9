#pragma once

#include <Eigen/Dense>
#include <optional>

#include "blurforge/camera.hpp"
#include "blurforge/image.hpp"
#include "blurforge/scene.hpp"

namespace blurforge {

// A primitive after EWA projection onto the image plane.
struct SplattedGaussian {
    Eigen::Vector2d mean2d;   // pixels
    Eigen::Matrix2d cov2d;    // pixels^2, includes the low-pass dilation
    double view_depth = 0.0;  // camera-space z, scene units
    Eigen::Vector3d color;    // from eval_sh along the camera->primitive ray
    double opacity = 0.0;
};

struct RenderOptions {
    Eigen::Vector3d background = Eigen::Vector3d::Zero();
    double alpha_clamp = 0.99;
    // Stop blending a pixel once the remaining transmittance drops below this.
    double termination_transmittance = 1e-4;
    // Per-splat footprint bound: contributions with alpha below this are
    // dropped, which puts the effective cutoff past 3 sigma for any opacity
    // above ~1e-3 and keeps truncation error within the oracle tolerance.
    double min_alpha = 1e-5;
    double depth_validity_threshold = 0.5;
};

struct RenderResult {
    SrgbImage color;
    DepthMap depth;
    Mask blend_weight;  // accumulated per-pixel alpha mass, <= 1
};

inline constexpr double kNearPlane = 0.01;  // scene units
inline constexpr int kTileSize = 16;        // pixels

// EWA projection of one primitive: cov2d = J W Sigma W^T J^T + 0.3 I with
// W the world-to-camera rotation and J the perspective Jacobian at the
// primitive's camera-space position. Empty when the primitive sits at or
// behind the near plane.
std::optional<SplattedGaussian> project_gaussian(const GaussianPrimitive& g,
                                                 const CameraPose& pose,
                                                 const CameraIntrinsics& intr);

// Tile-based forward renderer: front-to-back alpha blending of globally
// depth-sorted splats with per-tile primitive lists and alpha-weighted
// expected depth. Parallel over tiles; bit-deterministic.
RenderResult render(const GaussianScene& scene, const CameraPose& pose,
                    const CameraIntrinsics& intr, const RenderOptions& opts = {});

// Correctness oracle: naive per-pixel loop over all depth-sorted splats,
// no footprint cutoff, no early termination, single-threaded.
RenderResult render_reference(const GaussianScene& scene, const CameraPose& pose,
                              const CameraIntrinsics& intr, const RenderOptions& opts = {});

}  // namespace blurforge
