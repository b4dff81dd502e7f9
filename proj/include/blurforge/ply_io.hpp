#pragma once

#include <filesystem>

#include "blurforge/scene.hpp"

namespace blurforge {

// Reads a binary-little-endian PLY following the de-facto 3DGS export
// convention (x,y,z, f_dc_0..2, f_rest_0..44, opacity, scale_0..2,
// rot_0..3; rot_0 is the quaternion scalar part, f_rest is channel-major).
// Stored log-scales are exponentiated, opacity logits pass through the
// sigmoid, quaternions are normalized. Lower SH degrees are zero-padded.
//
// Throws FormatError naming the first missing required property, and
// DataError (with the primitive index) on non-finite values.
GaussianScene load_scene(const std::filesystem::path& path);

// Inverse of load_scene; writes the same convention so synthetic scenes are
// consumable by third-party 3DGS viewers. load(save(s)) is lossless.
void save_scene(const GaussianScene& scene, const std::filesystem::path& path);

}  // namespace blurforge
