#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "blurforge/camera.hpp"
#include "blurforge/crf.hpp"
#include "blurforge/image.hpp"
#include "blurforge/noise.hpp"
#include "blurforge/renderer.hpp"
#include "blurforge/trajectory.hpp"

namespace blurforge {

// Streaming linear-space mean: frames are inverted through the CRF, summed
// in double precision in arrival order, and the mean is mapped back through
// the CRF. Lets M=121 sub-frames accumulate without holding them all.
class BlurAccumulator {
public:
    explicit BlurAccumulator(CrfModel crf = CrfModel::Srgb) : crf_(crf) {}

    void add(const SrgbImage& frame);
    SrgbImage result() const;
    int frame_count() const { return count_; }

private:
    CrfModel crf_;
    int width_ = 0, height_ = 0;
    int count_ = 0;
    std::vector<double> linear_sum_;
};

// One-shot form of the accumulator for already-materialized frame lists.
SrgbImage accumulate_blur(std::span<const SrgbImage> frames, CrfModel crf = CrfModel::Srgb);

// Backward warp of a mask from the source view into the destination view:
// each destination pixel is unprojected through the destination-view depth,
// transformed into the source view and bilinearly sampled. Out-of-frame
// samples and invalid depths yield 0.
Mask warp_mask(const Mask& mask, const DepthMap& dst_depth, const CameraPose& pose_src,
               const CameraPose& pose_dst, const CameraIntrinsics& intr);

// Streaming counterpart of object_alpha: feed one warped mask per sub-frame,
// finalize() returns sqrt(mean). The square root softens the matte at object
// boundaries where background color is already mixed into the object blur.
class ObjectAlphaAccumulator {
public:
    void add(const Mask& warped);
    Mask finalize() const;

private:
    int width_ = 0, height_ = 0;
    int count_ = 0;
    std::vector<double> sum_;
};

// Motion-averaged object matte: sqrt((1/M) sum_t warp(mask -> pose_t)).
Mask object_alpha(const Mask& mask, const MotionTrajectory& traj,
                  std::span<const DepthMap> sub_frame_depths, const CameraIntrinsics& intr);

// Per-pixel convex blend: alpha * obj + (1 - alpha) * bg.
SrgbImage composite_rigid(const SrgbImage& b_obj, const SrgbImage& b_bg, const Mask& alpha);

struct SynthesisOptions {
    int sub_frames = 121;  // M, must be odd
    int trajectories_per_sharp = 2;
    bool rigid_body = false;  // requires an object mask
    double scene_scale = 1.0;  // multiplies sampled delta_t
    CrfModel crf = CrfModel::Srgb;
    RenderOptions render;
};

struct BlurPair {
    SrgbImage sharp;
    std::vector<SrgbImage> blurry;
    std::optional<Mask> object_alpha;  // matte of the first rigid-body blur
    std::vector<MotionTrajectory> trajectories;
    std::vector<MotionTrajectory> background_trajectories;  // rigid mode only
    int scale_denominator = 1;  // blurry images are at 1/scale_denominator
    NoiseParams noise_params;
    std::uint64_t seed = 0;
};

// Accumulates the M sub-frame renders of one trajectory. When `mask` is
// given, per-sub-frame depths drive the mask warps and `alpha_out` receives
// the finalized matte.
SrgbImage accumulate_trajectory(const GaussianScene& scene, const MotionTrajectory& traj,
                                const CameraIntrinsics& intr, const SynthesisOptions& opts,
                                const Mask* mask = nullptr, Mask* alpha_out = nullptr);

// Renders the sharp frame at the anchor and n independent blurry partners.
// All randomness is derived from pair_seed, which is recorded in the result.
BlurPair synthesize_pair(const GaussianScene& scene, const CameraPose& anchor,
                         const CameraIntrinsics& intr, const SynthesisOptions& opts,
                         std::uint64_t pair_seed,
                         const Mask* object_mask = nullptr);

}  // namespace blurforge
