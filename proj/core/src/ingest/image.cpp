#include "posekit/ingest/image.hpp"

#include <algorithm>
#include <cstring>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "posekit/error.hpp"

namespace posekit::ingest {

BBox2d clip_to_image(const BBox2d &box, int width, int height) {
    const int x0 = std::max(box.x, 0);
    const int y0 = std::max(box.y, 0);
    const int x1 = std::min(box.x + std::max(box.width, 0), width);
    const int y1 = std::min(box.y + std::max(box.height, 0), height);
    if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
    return {x0, y0, x1 - x0, y1 - y0};
}

DepthImage::DepthImage(int w, int h) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw Error(ErrorCode::InvalidParameter, "image size must be positive");
    pixels.assign(static_cast<std::size_t>(w) * h, 0);
}

RgbImage::RgbImage(int w, int h) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw Error(ErrorCode::InvalidParameter, "image size must be positive");
    pixels.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

RgbImage crop_image(const RgbImage &image, const BBox2d &box) {
    const BBox2d c = clip_to_image(box, image.width, image.height);
    if (image.empty() || c.empty()) throw Error(ErrorCode::EmptyImage, "crop is empty");
    RgbImage out(c.width, c.height);
    for (int v = 0; v < c.height; ++v) {
        std::memcpy(out.at(0, v), image.at(c.x, c.y + v), 3 * static_cast<std::size_t>(c.width));
    }
    return out;
}

DepthImage read_depth_png(const std::filesystem::path &path) {
    const cv::Mat m = cv::imread(path.string(), cv::IMREAD_ANYDEPTH);
    if (m.empty()) throw Error(ErrorCode::IoError, "cannot read depth image " + path.string());
    if (m.type() != CV_16UC1) {
        throw Error(ErrorCode::ParseError, "depth image is not 16-bit single channel: " +
                                                   path.string());
    }
    DepthImage out(m.cols, m.rows);
    for (int v = 0; v < m.rows; ++v) {
        std::memcpy(&out.at(0, v), m.ptr<std::uint16_t>(v),
                    sizeof(std::uint16_t) * static_cast<std::size_t>(m.cols));
    }
    return out;
}

void write_depth_png(const std::filesystem::path &path, const DepthImage &image) {
    if (image.empty()) throw Error(ErrorCode::EmptyImage, "cannot write an empty image");
    const cv::Mat m(image.height, image.width, CV_16UC1,
                    const_cast<std::uint16_t *>(image.pixels.data()));
    if (!cv::imwrite(path.string(), m)) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
}

RgbImage read_rgb_png(const std::filesystem::path &path) {
    cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) throw Error(ErrorCode::IoError, "cannot read color image " + path.string());
    cv::Mat rgb;
    cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    RgbImage out(rgb.cols, rgb.rows);
    for (int v = 0; v < rgb.rows; ++v) {
        std::memcpy(out.at(0, v), rgb.ptr<std::uint8_t>(v), 3 * static_cast<std::size_t>(rgb.cols));
    }
    return out;
}

void write_rgb_png(const std::filesystem::path &path, const RgbImage &image) {
    if (image.empty()) throw Error(ErrorCode::EmptyImage, "cannot write an empty image");
    const cv::Mat rgb(image.height, image.width, CV_8UC3,
                      const_cast<std::uint8_t *>(image.pixels.data()));
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    if (!cv::imwrite(path.string(), bgr)) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
}

}  // namespace posekit::ingest
