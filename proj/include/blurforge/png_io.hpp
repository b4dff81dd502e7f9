#pragma once

#include <filesystem>

#include "blurforge/image.hpp"

namespace blurforge {

// 8- or 16-bit RGB PNG with values rounded from [0,1] floats.
void write_png(const SrgbImage& img, const std::filesystem::path& path, int bit_depth = 8);

// Reads 8/16-bit gray or RGB(A) PNG into a [0,1] float image.
SrgbImage read_png(const std::filesystem::path& path);

// Single-channel masks: gray PNG, values scaled to [0,1].
void write_mask_png(const Mask& mask, const std::filesystem::path& path);
Mask read_mask_png(const std::filesystem::path& path);

// Returns (width, height) from the PNG header without decoding the pixels.
std::pair<int, int> png_dimensions(const std::filesystem::path& path);

// Raw float32 depth dump for debugging: 16-byte header (magic "BFDM",
// uint32 width, uint32 height, uint32 reserved) followed by row-major
// depth values; invalid pixels are written as 0.
void write_depth(const DepthMap& depth, const std::filesystem::path& path);
DepthMap read_depth(const std::filesystem::path& path);

}  // namespace blurforge
