#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cstdint>
#include <string>
#include <vector>

#include "blurforge/sh.hpp"

namespace blurforge {

// One anisotropic Gaussian. Values are the activated ones: scale after exp,
// opacity after sigmoid, quaternion normalized. File-space (log/logit)
// encoding only exists inside the PLY reader/writer.
struct GaussianPrimitive {
    static ShCoeffs zero_sh() {
        ShCoeffs c;
        for (auto& v : c) v.setZero();
        return c;
    }

    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Vector3d scale = Eigen::Vector3d::Ones();  // per-axis stddev, scene units
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
    double opacity = 1.0;  // in [0, 1]
    ShCoeffs sh_coeffs = zero_sh();  // Eigen does not zero-init on its own

    Eigen::Matrix3d covariance() const {
        const Eigen::Matrix3d r = rotation.toRotationMatrix();
        const Eigen::Matrix3d m = r * scale.asDiagonal();
        return m * m.transpose();
    }
};

struct BoundingBox {
    Eigen::Vector3d min = Eigen::Vector3d::Zero();
    Eigen::Vector3d max = Eigen::Vector3d::Zero();
};

// Immutable after load; safe to share read-only across renderer threads.
struct GaussianScene {
    std::vector<GaussianPrimitive> primitives;
    std::string scene_id;
    BoundingBox bounding_box;
    std::string source_path;

    void recompute_bounds();
};

// Deterministic procedural scene: positions uniform in [-extent, extent]^3,
// scales log-uniform in [extent/200, extent/20], opacities uniform in
// [0.2, 1.0], DC-only colors uniform in [0, 1]. Desk-scale stand-in for
// reconstructed object scenes.
GaussianScene make_synthetic_scene(std::uint64_t seed, int count, double extent);

}  // namespace blurforge
