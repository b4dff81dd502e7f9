#include "blurforge/trajectory.hpp"

#include <cmath>

#include "blurforge/errors.hpp"

namespace blurforge {

namespace {

constexpr double kDegToRad = 0.017453292519943295;

using Vector6d = Eigen::Matrix<double, 6, 1>;

Vector6d to_vec6(const PoseOffset& o) {
    Vector6d v;
    v << o.translation, o.rotation_deg;
    return v;
}

PoseOffset to_offset(const Vector6d& v) {
    return {v.head<3>(), v.tail<3>()};
}

// de Casteljau; exact at tau=0 and affine-stable inside [0,1].
Vector6d eval_bezier(std::vector<Vector6d> pts, double tau) {
    for (std::size_t level = pts.size() - 1; level > 0; --level)
        for (std::size_t i = 0; i < level; ++i)
            pts[i] = pts[i] + tau * (pts[i + 1] - pts[i]);
    return pts[0];
}

}  // namespace

CameraPose apply_offset(const CameraPose& anchor, const PoseOffset& offset) {
    const Eigen::Vector3d axis_angle = offset.rotation_deg * kDegToRad;
    const double angle = axis_angle.norm();
    Eigen::Quaterniond r_off = Eigen::Quaterniond::Identity();
    if (angle > 0.0)
        r_off = Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis_angle / angle));

    // x_cam' = R_off (x_cam - t_off): the camera center moves by t_off and
    // the orientation turns by R_off, both in the anchor camera frame.
    CameraPose pose;
    pose.rotation = (r_off * anchor.rotation).normalized();
    pose.translation = r_off * (anchor.translation - offset.translation);
    return pose;
}

CurveParams sample_curve_params(Rng& rng) {
    CurveParams p;
    p.order = static_cast<int>(rng.uniform_index(5)) + 1;

    // Isotropic direction: z uniform in [-1,1], azimuth uniform.
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 6.283185307179586);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Eigen::Vector3d dir(s * std::cos(phi), s * std::sin(phi), z);
    p.delta_t = dir * rng.uniform(0.0, 0.7);

    for (int a = 0; a < 3; ++a) p.delta_r[a] = rng.uniform(-1.5, 1.5);
    return p;
}

MotionTrajectory build_trajectory(Rng& rng, const CurveParams& params,
                                  const CameraPose& anchor, int sample_count) {
    if (sample_count < 1 || sample_count % 2 == 0)
        throw ContractError("trajectory sample count must be odd and >= 1");
    if (params.order < 1 || params.order > 5)
        throw ContractError("Bezier order must lie in [1, 5]");

    const int n = params.order;
    Vector6d endpoint;
    endpoint << params.delta_t * 0.5, params.delta_r * 0.5;

    std::vector<Vector6d> ctrl(n + 1);
    ctrl[0] = -endpoint;
    ctrl[n] = endpoint;

    const double t_mag = 0.25 * params.delta_t.norm();
    const double r_mag = 0.25 * params.delta_r.norm();
    for (int i = 1; i < n; ++i) {
        const double f = static_cast<double>(i) / n;
        Vector6d p = ctrl[0] + f * (ctrl[n] - ctrl[0]);
        // Draw order is fixed so the construction stays linear in delta_t
        // for a fixed seed.
        for (int a = 0; a < 3; ++a) p[a] += rng.uniform(-1.0, 1.0) * t_mag;
        for (int a = 0; a < 3; ++a) p[3 + a] += rng.uniform(-1.0, 1.0) * r_mag;
        ctrl[i] = p;
    }

    // Recenter so the tau=0.5 offset is exactly zero; with odd M the middle
    // sample then reproduces the anchor bit-exactly.
    const Vector6d center = eval_bezier(ctrl, 0.5);
    for (auto& c : ctrl) c -= center;

    MotionTrajectory traj;
    traj.params = params;
    traj.anchor = anchor;
    traj.control_points.reserve(ctrl.size());
    for (const auto& c : ctrl) traj.control_points.push_back(to_offset(c));

    traj.poses.reserve(sample_count);
    for (int k = 0; k < sample_count; ++k) {
        const double tau =
            sample_count == 1 ? 0.5 : static_cast<double>(k) / (sample_count - 1);
        Vector6d v = eval_bezier(ctrl, tau);
        if (k == (sample_count - 1) / 2) v.setZero();
        traj.poses.push_back(apply_offset(anchor, to_offset(v)));
    }
    return traj;
}

}  // namespace blurforge
