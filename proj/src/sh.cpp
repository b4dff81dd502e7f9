#include "blurforge/sh.hpp"

namespace blurforge {

// Real spherical harmonics basis constants, 8 significant digits:
//   l=0:        0.28209479           = sqrt(1/4pi)
//   l=1:        0.48860251           = sqrt(3/4pi)
//   l=2:        1.0925484, 0.31539157, 0.54627422
//   l=3:        0.59004359, 2.8906114, 0.45704580, 0.37317633, 1.4453057
// Signs and coefficient ordering follow the 3DGS rasterizer convention.
namespace {
constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                           -1.0925484305920792, 0.5462742152960396};
constexpr double kC3[7] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                           0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                           -0.5900435899266435};
}  // namespace

Eigen::Vector3d eval_sh(const Eigen::Vector3d& direction, const ShCoeffs& coeffs) {
    const double x = direction.x();
    const double y = direction.y();
    const double z = direction.z();

    Eigen::Vector3d c = kShC0 * coeffs[0];

    c += -kC1 * y * coeffs[1];
    c += kC1 * z * coeffs[2];
    c += -kC1 * x * coeffs[3];

    const double xx = x * x, yy = y * y, zz = z * z;
    const double xy = x * y, yz = y * z, xz = x * z;
    c += kC2[0] * xy * coeffs[4];
    c += kC2[1] * yz * coeffs[5];
    c += kC2[2] * (2.0 * zz - xx - yy) * coeffs[6];
    c += kC2[3] * xz * coeffs[7];
    c += kC2[4] * (xx - yy) * coeffs[8];

    c += kC3[0] * y * (3.0 * xx - yy) * coeffs[9];
    c += kC3[1] * xy * z * coeffs[10];
    c += kC3[2] * y * (4.0 * zz - xx - yy) * coeffs[11];
    c += kC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy) * coeffs[12];
    c += kC3[4] * x * (4.0 * zz - xx - yy) * coeffs[13];
    c += kC3[5] * z * (xx - yy) * coeffs[14];
    c += kC3[6] * x * (xx - 3.0 * yy) * coeffs[15];

    c.array() += 0.5;
    return c.cwiseMax(0.0);
}

}  // namespace blurforge
