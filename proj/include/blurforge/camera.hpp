#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <stdexcept>

namespace blurforge {

// Pinhole intrinsics in pixel units. Pixel (i, j) samples the continuous
// image plane at coordinate (i, j), so cx/cy are expressed on that grid.
struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    void validate() const {
        if (fx <= 0.0 || fy <= 0.0)
            throw std::invalid_argument("camera focal lengths must be positive");
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("camera dimensions must be positive");
        if (cx <= 0.0 || cx >= width || cy <= 0.0 || cy >= height)
            throw std::invalid_argument("principal point must lie inside the image");
    }
};

// World-to-camera rigid transform. Right-handed; the camera looks down +z,
// image x points right, image y points down.
struct CameraPose {
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const {
        return rotation * world + translation;
    }

    Eigen::Vector3d camera_center() const {
        return rotation.conjugate() * (-translation);
    }

    // Looks from `eye` toward `target`; `up` fixes the roll.
    static CameraPose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                              const Eigen::Vector3d& up = Eigen::Vector3d(0, -1, 0)) {
        Eigen::Vector3d z = (target - eye).normalized();
        Eigen::Vector3d x = up.cross(z).normalized();
        Eigen::Vector3d y = z.cross(x);
        Eigen::Matrix3d r;
        r.row(0) = x;
        r.row(1) = y;
        r.row(2) = z;
        CameraPose pose;
        pose.rotation = Eigen::Quaterniond(r).normalized();
        pose.translation = -(pose.rotation * eye);
        return pose;
    }
};

}  // namespace blurforge
