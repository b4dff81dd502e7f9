#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "blurforge/camera.hpp"
#include "blurforge/rng.hpp"

namespace blurforge {

// Random-order Bezier curve parameters. delta_t is the translation extent
// (scene units, Euclidean norm <= 0.7), delta_r the per-axis orientation
// shift in degrees (each component in [-1.5, 1.5]).
struct CurveParams {
    int order = 1;  // in [1, 5]
    Eigen::Vector3d delta_t = Eigen::Vector3d::Zero();
    Eigen::Vector3d delta_r = Eigen::Vector3d::Zero();
};

// A 6DOF offset relative to the anchor pose: translation of the camera
// center plus an axis-angle rotation (degrees), both expressed in the
// anchor's camera frame.
struct PoseOffset {
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    Eigen::Vector3d rotation_deg = Eigen::Vector3d::Zero();
};

struct MotionTrajectory {
    CurveParams params;
    std::vector<PoseOffset> control_points;  // n+1 offsets, recentered
    std::vector<CameraPose> poses;           // M world-to-camera poses
    CameraPose anchor;
    std::uint64_t seed = 0;

    const CameraPose& middle_pose() const { return poses[(poses.size() - 1) / 2]; }
};

// n uniform in {1..5}; delta_t direction uniform on the sphere with
// magnitude uniform in [0, 0.7]; delta_r components uniform in [-1.5, 1.5].
CurveParams sample_curve_params(Rng& rng);

// Builds the curve per the three-step procedure: linear 6DOF segment with
// endpoints at +-delta/2 around the anchor, interior control points at the
// n-1 equal division points perturbed per-axis by up to 0.25*||delta||,
// de Casteljau evaluation at M uniform parameters, then a rigid shift so
// the tau=0.5 pose coincides with the anchor. M must be odd.
MotionTrajectory build_trajectory(Rng& rng, const CurveParams& params,
                                  const CameraPose& anchor, int sample_count);

// Applies a camera-frame offset to a world-to-camera pose.
CameraPose apply_offset(const CameraPose& anchor, const PoseOffset& offset);

}  // namespace blurforge
