#pragma once

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace blurforge {

enum class ColorSpace { Linear, Srgb };

// H x W x 3 float image, row-major, channel-interleaved. The color space is
// part of the type so linear-light accumulation and display-referred images
// cannot be mixed up silently.
template <ColorSpace CS>
class BasicImage {
public:
    BasicImage() = default;
    BasicImage(int width, int height, float fill = 0.0f)
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * height * 3, fill) {
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("image dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    float* pixel(int x, int y) {
        assert(x >= 0 && x < width_ && y >= 0 && y < height_);
        return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
    }
    const float* pixel(int x, int y) const {
        assert(x >= 0 && x < width_ && y >= 0 && y < height_);
        return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
    }

    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }

    bool same_size(const BasicImage& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

using LinearImage = BasicImage<ColorSpace::Linear>;
using SrgbImage = BasicImage<ColorSpace::Srgb>;

// Single-channel float grid in [0,1]; binary at input, fractional after
// warping or averaging.
class Mask {
public:
    Mask() = default;
    Mask(int width, int height, float fill = 0.0f)
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * height, fill) {
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("mask dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }

    float& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    float at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

// Alpha-weighted expected depth per pixel, with a validity flag where the
// accumulated splat weight was too low to trust.
class DepthMap {
public:
    DepthMap() = default;
    DepthMap(int width, int height)
        : width_(width), height_(height),
          depth_(static_cast<std::size_t>(width) * height, 0.0f),
          valid_(static_cast<std::size_t>(width) * height, 0) {}

    int width() const { return width_; }
    int height() const { return height_; }

    float& depth(int x, int y) { return depth_[index(x, y)]; }
    float depth(int x, int y) const { return depth_[index(x, y)]; }
    std::uint8_t& valid(int x, int y) { return valid_[index(x, y)]; }
    bool is_valid(int x, int y) const { return valid_[index(x, y)] != 0; }

    const std::vector<float>& depth_data() const { return depth_; }
    const std::vector<std::uint8_t>& valid_data() const { return valid_; }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<float> depth_;
    std::vector<std::uint8_t> valid_;
};

}  // namespace blurforge
