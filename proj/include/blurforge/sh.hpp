#pragma once

#include <Eigen/Dense>
#include <array>

namespace blurforge {

inline constexpr int kShCoeffCount = 16;  // degree 3, (3+1)^2 basis functions

// 16 coefficients x RGB. Coefficient 0 is the DC term; bands follow the
// real-SH ordering used by 3DGS exports.
using ShCoeffs = std::array<Eigen::Vector3d, kShCoeffCount>;

// Evaluates view-dependent color: sum of basis(direction) * coeff + 0.5,
// clamped to >= 0 per channel. `direction` must be unit length.
Eigen::Vector3d eval_sh(const Eigen::Vector3d& direction, const ShCoeffs& coeffs);

// DC-band constant Y_00 = 0.28209479 (sqrt(1/4pi)); exposed because
// color <-> DC-coefficient conversion needs it.
inline constexpr double kShC0 = 0.28209479177387814;

}  // namespace blurforge
