#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace posekit::ingest {

// Pixel rectangle [x, x + width) x [y, y + height).
struct BBox2d {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    bool empty() const noexcept { return width <= 0 || height <= 0; }
    friend bool operator==(const BBox2d &, const BBox2d &) = default;
};

// Intersection of `box` with a width x height image (may be empty).
BBox2d clip_to_image(const BBox2d &box, int width, int height);

// 16-bit depth in sensor units, 0 = no measurement. Row-major.
struct DepthImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> pixels;

    DepthImage() = default;
    DepthImage(int w, int h);

    std::uint16_t at(int u, int v) const { return pixels[static_cast<std::size_t>(v) * width + u]; }
    std::uint16_t &at(int u, int v) { return pixels[static_cast<std::size_t>(v) * width + u]; }
    bool empty() const noexcept { return pixels.empty(); }
    friend bool operator==(const DepthImage &, const DepthImage &) = default;
};

// 8-bit RGB, interleaved, row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    RgbImage() = default;
    RgbImage(int w, int h);

    const std::uint8_t *at(int u, int v) const {
        return pixels.data() + 3 * (static_cast<std::size_t>(v) * width + u);
    }
    std::uint8_t *at(int u, int v) {
        return pixels.data() + 3 * (static_cast<std::size_t>(v) * width + u);
    }
    bool empty() const noexcept { return pixels.empty(); }
    friend bool operator==(const RgbImage &, const RgbImage &) = default;
};

// Sub-image inside `box` (clipped). Throws EmptyImage if nothing is left.
RgbImage crop_image(const RgbImage &image, const BBox2d &box);

// PNG codecs. Depth must be single-channel 16-bit; RGB is read as 8-bit color.
DepthImage read_depth_png(const std::filesystem::path &path);
void write_depth_png(const std::filesystem::path &path, const DepthImage &image);
RgbImage read_rgb_png(const std::filesystem::path &path);
void write_rgb_png(const std::filesystem::path &path, const RgbImage &image);

}  // namespace posekit::ingest
