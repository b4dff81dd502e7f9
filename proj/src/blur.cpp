#include "blurforge/blur.hpp"

#include <algorithm>
#include <cmath>

#include "blurforge/errors.hpp"
#include "blurforge/rng.hpp"

namespace blurforge {

void BlurAccumulator::add(const SrgbImage& frame) {
    if (count_ == 0) {
        width_ = frame.width();
        height_ = frame.height();
        linear_sum_.assign(frame.data().size(), 0.0);
    } else if (frame.width() != width_ || frame.height() != height_) {
        throw ContractError("blur accumulation requires uniform frame dimensions");
    }
    const auto& src = frame.data();
    for (std::size_t i = 0; i < src.size(); ++i)
        linear_sum_[i] += crf_inverse_value(src[i], crf_);
    ++count_;
}

SrgbImage BlurAccumulator::result() const {
    if (count_ == 0) throw ContractError("blur accumulation needs at least one frame");
    SrgbImage out(width_, height_);
    auto& dst = out.data();
    const double inv = 1.0 / count_;
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = static_cast<float>(crf_forward_value(linear_sum_[i] * inv, crf_));
    return out;
}

SrgbImage accumulate_blur(std::span<const SrgbImage> frames, CrfModel crf) {
    BlurAccumulator acc(crf);
    for (const auto& f : frames) acc.add(f);
    return acc.result();
}

namespace {

double sample_bilinear(const Mask& mask, double u, double v) {
    const int x0 = static_cast<int>(std::floor(u));
    const int y0 = static_cast<int>(std::floor(v));
    const double fx = u - x0;
    const double fy = v - y0;

    auto texel = [&](int x, int y) -> double {
        if (x < 0 || x >= mask.width() || y < 0 || y >= mask.height()) return 0.0;
        return mask.at(x, y);
    };

    return (1.0 - fx) * (1.0 - fy) * texel(x0, y0) + fx * (1.0 - fy) * texel(x0 + 1, y0) +
           (1.0 - fx) * fy * texel(x0, y0 + 1) + fx * fy * texel(x0 + 1, y0 + 1);
}

}  // namespace

Mask warp_mask(const Mask& mask, const DepthMap& dst_depth, const CameraPose& pose_src,
               const CameraPose& pose_dst, const CameraIntrinsics& intr) {
    if (mask.width() != dst_depth.width() || mask.height() != dst_depth.height())
        throw ContractError("warp_mask: mask and depth dimensions differ");

    const Eigen::Matrix3d r_dst_t = pose_dst.rotation.toRotationMatrix().transpose();
    const Eigen::Matrix3d r_src = pose_src.rotation.toRotationMatrix();

    Mask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!dst_depth.is_valid(x, y)) continue;
            const double d = dst_depth.depth(x, y);
            const Eigen::Vector3d cam_dst((x - intr.cx) / intr.fx * d,
                                          (y - intr.cy) / intr.fy * d, d);
            const Eigen::Vector3d world = r_dst_t * (cam_dst - pose_dst.translation);
            const Eigen::Vector3d cam_src = r_src * world + pose_src.translation;
            if (cam_src.z() <= kNearPlane) continue;
            const double u = intr.fx * cam_src.x() / cam_src.z() + intr.cx;
            const double v = intr.fy * cam_src.y() / cam_src.z() + intr.cy;
            out.at(x, y) = static_cast<float>(sample_bilinear(mask, u, v));
        }
    }
    return out;
}

void ObjectAlphaAccumulator::add(const Mask& warped) {
    if (count_ == 0) {
        width_ = warped.width();
        height_ = warped.height();
        sum_.assign(warped.data().size(), 0.0);
    } else if (warped.width() != width_ || warped.height() != height_) {
        throw ContractError("object alpha accumulation requires uniform dimensions");
    }
    const auto& src = warped.data();
    for (std::size_t i = 0; i < src.size(); ++i) sum_[i] += src[i];
    ++count_;
}

Mask ObjectAlphaAccumulator::finalize() const {
    if (count_ == 0) throw ContractError("object alpha accumulation needs at least one mask");
    Mask out(width_, height_);
    auto& dst = out.data();
    const double inv = 1.0 / count_;
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = static_cast<float>(std::sqrt(std::clamp(sum_[i] * inv, 0.0, 1.0)));
    return out;
}

Mask object_alpha(const Mask& mask, const MotionTrajectory& traj,
                  std::span<const DepthMap> sub_frame_depths, const CameraIntrinsics& intr) {
    if (sub_frame_depths.size() != traj.poses.size())
        throw ContractError("object_alpha: one depth map per sub-frame required");
    const CameraPose& src = traj.anchor;
    ObjectAlphaAccumulator acc;
    for (std::size_t t = 0; t < traj.poses.size(); ++t)
        acc.add(warp_mask(mask, sub_frame_depths[t], src, traj.poses[t], intr));
    return acc.finalize();
}

SrgbImage composite_rigid(const SrgbImage& b_obj, const SrgbImage& b_bg, const Mask& alpha) {
    if (!b_obj.same_size(b_bg) || b_obj.width() != alpha.width() ||
        b_obj.height() != alpha.height())
        throw ContractError("composite_rigid: dimension mismatch");

    SrgbImage out(b_obj.width(), b_obj.height());
    const auto& obj = b_obj.data();
    const auto& bg = b_bg.data();
    const auto& a = alpha.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const float w = a[i];
        for (int c = 0; c < 3; ++c)
            dst[i * 3 + c] = w * obj[i * 3 + c] + (1.0f - w) * bg[i * 3 + c];
    }
    return out;
}

SrgbImage accumulate_trajectory(const GaussianScene& scene, const MotionTrajectory& traj,
                                const CameraIntrinsics& intr, const SynthesisOptions& opts,
                                const Mask* mask, Mask* alpha_out) {
    BlurAccumulator blur(opts.crf);
    ObjectAlphaAccumulator alpha;
    for (const CameraPose& pose : traj.poses) {
        RenderResult frame = render(scene, pose, intr, opts.render);
        blur.add(frame.color);
        if (mask != nullptr)
            alpha.add(warp_mask(*mask, frame.depth, traj.anchor, pose, intr));
    }
    if (mask != nullptr && alpha_out != nullptr) *alpha_out = alpha.finalize();
    return blur.result();
}

namespace {

MotionTrajectory draw_trajectory(std::uint64_t seed, const CameraPose& anchor,
                                 const SynthesisOptions& opts) {
    Rng rng(seed);
    CurveParams params = sample_curve_params(rng);
    params.delta_t *= opts.scene_scale;
    MotionTrajectory traj = build_trajectory(rng, params, anchor, opts.sub_frames);
    traj.seed = seed;
    return traj;
}

}  // namespace

BlurPair synthesize_pair(const GaussianScene& scene, const CameraPose& anchor,
                         const CameraIntrinsics& intr, const SynthesisOptions& opts,
                         std::uint64_t pair_seed, const Mask* object_mask) {
    if (opts.sub_frames < 1 || opts.sub_frames % 2 == 0)
        throw ContractError("synthesize_pair: sub-frame count must be odd");
    if (opts.trajectories_per_sharp < 1)
        throw ContractError("synthesize_pair: need at least one trajectory");
    const bool rigid = opts.rigid_body && object_mask != nullptr;

    BlurPair pair;
    pair.seed = pair_seed;
    pair.sharp = render(scene, anchor, intr, opts.render).color;

    for (int k = 0; k < opts.trajectories_per_sharp; ++k) {
        MotionTrajectory traj =
            draw_trajectory(combine_seed(pair_seed, 2 * k), anchor, opts);
        if (!rigid) {
            pair.blurry.push_back(accumulate_trajectory(scene, traj, intr, opts));
            pair.trajectories.push_back(std::move(traj));
            continue;
        }

        Mask alpha;
        SrgbImage b_obj =
            accumulate_trajectory(scene, traj, intr, opts, object_mask, &alpha);
        MotionTrajectory traj_bg =
            draw_trajectory(combine_seed(pair_seed, 2 * k + 1), anchor, opts);
        SrgbImage b_bg = accumulate_trajectory(scene, traj_bg, intr, opts);
        pair.blurry.push_back(composite_rigid(b_obj, b_bg, alpha));
        if (!pair.object_alpha) pair.object_alpha = alpha;
        pair.trajectories.push_back(std::move(traj));
        pair.background_trajectories.push_back(std::move(traj_bg));
    }
    return pair;
}

}  // namespace blurforge
