#include "blurforge/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "blurforge/errors.hpp"

namespace blurforge {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FileHandle = std::unique_ptr<std::FILE, FileCloser>;

FileHandle open_file(const std::filesystem::path& path, const char* mode) {
    FileHandle f(std::fopen(path.string().c_str(), mode));
    if (!f) throw IoError("cannot open " + path.string());
    return f;
}

void write_rows(const std::filesystem::path& path, int width, int height, int bit_depth,
                int color_type, const std::vector<png_bytep>& rows) {
    FileHandle file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng failure while writing " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);  // buffers are little-endian
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// Decodes any supported PNG into interleaved float RGB rows in [0,1].
std::vector<float> read_rgb_rows(const std::filesystem::path& path, int& width, int& height) {
    FileHandle file = open_file(path, "rb");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("not a decodable PNG: " + path.string());
    }
    png_init_io(png, file.get());
    png_read_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const int bit_depth = png_get_bit_depth(png, info);

    png_set_expand(png);  // palettes, gray<8, tRNS
    if (bit_depth == 16) png_set_swap(png);
    png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    if (channels != 3)
        throw FormatError("unexpected channel count in " + path.string());

    const std::size_t sample_bytes = bit_depth == 16 ? 2 : 1;
    std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height * 3 * sample_bytes);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = raw.data() + static_cast<std::size_t>(y) * width * 3 * sample_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    std::vector<float> out(static_cast<std::size_t>(width) * height * 3);
    if (sample_bytes == 1) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = raw[i] / 255.0f;
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) {
            std::uint16_t v;
            std::memcpy(&v, raw.data() + i * 2, 2);
            out[i] = v / 65535.0f;
        }
    }
    return out;
}

std::uint16_t quantize16(float v) {
    return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 65535.0f));
}

std::uint8_t quantize8(float v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

constexpr char kDepthMagic[4] = {'B', 'F', 'D', 'M'};

}  // namespace

void write_png(const SrgbImage& img, const std::filesystem::path& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        throw ContractError("png bit depth must be 8 or 16");

    const int w = img.width(), h = img.height();
    const std::size_t sample_bytes = bit_depth == 16 ? 2 : 1;
    std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * 3 * sample_bytes);
    const auto& data = img.data();
    if (bit_depth == 8) {
        for (std::size_t i = 0; i < data.size(); ++i) raw[i] = quantize8(data[i]);
    } else {
        for (std::size_t i = 0; i < data.size(); ++i) {
            const std::uint16_t v = quantize16(data[i]);
            std::memcpy(raw.data() + i * 2, &v, 2);
        }
    }
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y)
        rows[y] = raw.data() + static_cast<std::size_t>(y) * w * 3 * sample_bytes;
    write_rows(path, w, h, bit_depth, PNG_COLOR_TYPE_RGB, rows);
}

SrgbImage read_png(const std::filesystem::path& path) {
    int w = 0, h = 0;
    auto rgb = read_rgb_rows(path, w, h);
    SrgbImage img(w, h);
    img.data() = std::move(rgb);
    return img;
}

void write_mask_png(const Mask& mask, const std::filesystem::path& path) {
    const int w = mask.width(), h = mask.height();
    std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = quantize8(mask.data()[i]);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = raw.data() + static_cast<std::size_t>(y) * w;
    write_rows(path, w, h, 8, PNG_COLOR_TYPE_GRAY, rows);
}

Mask read_mask_png(const std::filesystem::path& path) {
    int w = 0, h = 0;
    auto rgb = read_rgb_rows(path, w, h);
    Mask mask(w, h);
    for (std::size_t i = 0; i < mask.data().size(); ++i)
        mask.data()[i] = (rgb[i * 3] + rgb[i * 3 + 1] + rgb[i * 3 + 2]) / 3.0f;
    return mask;
}

std::pair<int, int> png_dimensions(const std::filesystem::path& path) {
    // IHDR is mandatory and first: signature (8) + length/type (8), then
    // big-endian width and height.
    FileHandle file = open_file(path, "rb");
    unsigned char head[24];
    if (std::fread(head, 1, sizeof(head), file.get()) != sizeof(head))
        throw FormatError("truncated PNG header: " + path.string());
    static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (std::memcmp(head, sig, 8) != 0 || std::memcmp(head + 12, "IHDR", 4) != 0)
        throw FormatError("not a PNG file: " + path.string());
    auto be32 = [&](int off) {
        return (head[off] << 24) | (head[off + 1] << 16) | (head[off + 2] << 8) | head[off + 3];
    };
    return {be32(16), be32(20)};
}

void write_depth(const DepthMap& depth, const std::filesystem::path& path) {
    FileHandle file = open_file(path, "wb");
    const std::uint32_t w = static_cast<std::uint32_t>(depth.width());
    const std::uint32_t h = static_cast<std::uint32_t>(depth.height());
    const std::uint32_t reserved = 0;
    std::fwrite(kDepthMagic, 1, 4, file.get());
    std::fwrite(&w, 4, 1, file.get());
    std::fwrite(&h, 4, 1, file.get());
    std::fwrite(&reserved, 4, 1, file.get());
    std::vector<float> row(depth.width());
    for (int y = 0; y < depth.height(); ++y) {
        for (int x = 0; x < depth.width(); ++x)
            row[x] = depth.is_valid(x, y) ? depth.depth(x, y) : 0.0f;
        if (std::fwrite(row.data(), 4, row.size(), file.get()) != row.size())
            throw IoError("failed writing depth map: " + path.string());
    }
}

DepthMap read_depth(const std::filesystem::path& path) {
    FileHandle file = open_file(path, "rb");
    char magic[4];
    std::uint32_t w = 0, h = 0, reserved = 0;
    if (std::fread(magic, 1, 4, file.get()) != 4 || std::memcmp(magic, kDepthMagic, 4) != 0)
        throw FormatError("bad depth map magic: " + path.string());
    if (std::fread(&w, 4, 1, file.get()) != 1 || std::fread(&h, 4, 1, file.get()) != 1 ||
        std::fread(&reserved, 4, 1, file.get()) != 1)
        throw FormatError("truncated depth map header: " + path.string());
    DepthMap depth(static_cast<int>(w), static_cast<int>(h));
    std::vector<float> row(w);
    for (std::uint32_t y = 0; y < h; ++y) {
        if (std::fread(row.data(), 4, w, file.get()) != w)
            throw FormatError("truncated depth map data: " + path.string());
        for (std::uint32_t x = 0; x < w; ++x) {
            depth.depth(static_cast<int>(x), static_cast<int>(y)) = row[x];
            depth.valid(static_cast<int>(x), static_cast<int>(y)) = row[x] > 0.0f ? 1 : 0;
        }
    }
    return depth;
}

}  // namespace blurforge
