#include "blurforge/scene.hpp"

#include <cmath>

#include "blurforge/errors.hpp"
#include "blurforge/rng.hpp"

namespace blurforge {

void GaussianScene::recompute_bounds() {
    if (primitives.empty()) {
        bounding_box = {};
        return;
    }
    Eigen::Vector3d lo = primitives.front().position;
    Eigen::Vector3d hi = lo;
    for (const auto& g : primitives) {
        lo = lo.cwiseMin(g.position);
        hi = hi.cwiseMax(g.position);
    }
    bounding_box = {lo, hi};
}

GaussianScene make_synthetic_scene(std::uint64_t seed, int count, double extent) {
    if (count < 1) throw ContractError("make_synthetic_scene: count must be >= 1");
    if (extent <= 0.0) throw ContractError("make_synthetic_scene: extent must be > 0");

    Rng rng(mix_seed(seed));
    GaussianScene scene;
    scene.scene_id = "synthetic-" + std::to_string(seed);
    scene.primitives.reserve(count);

    const double log_scale_min = std::log(extent / 200.0);
    const double log_scale_max = std::log(extent / 20.0);

    for (int i = 0; i < count; ++i) {
        GaussianPrimitive g;
        for (int a = 0; a < 3; ++a) g.position[a] = rng.uniform(-extent, extent);
        for (int a = 0; a < 3; ++a)
            g.scale[a] = std::exp(rng.uniform(log_scale_min, log_scale_max));

        // Uniform on S^3 via four normals.
        Eigen::Vector4d q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
        if (q.norm() < 1e-12) q = Eigen::Vector4d(1, 0, 0, 0);
        q.normalize();
        g.rotation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);

        g.opacity = rng.uniform(0.2, 1.0);

        Eigen::Vector3d color(rng.uniform(), rng.uniform(), rng.uniform());
        g.sh_coeffs[0] = (color - Eigen::Vector3d::Constant(0.5)) / kShC0;

        scene.primitives.push_back(g);
    }
    scene.recompute_bounds();
    return scene;
}

}  // namespace blurforge
