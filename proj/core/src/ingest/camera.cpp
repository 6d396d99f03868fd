#include "posekit/ingest/camera.hpp"

#include <cmath>
#include <string>

#include "posekit/error.hpp"

namespace posekit::ingest {

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
        throw Error(ErrorCode::InvalidParameter, "focal lengths must be positive");
    }
    if (!std::isfinite(cx) || !std::isfinite(cy)) {
        throw Error(ErrorCode::InvalidParameter, "principal point must be finite");
    }
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::InvalidParameter, "image size must be positive");
    }
    if (!(depth_scale > 0.0) || !std::isfinite(depth_scale)) {
        throw Error(ErrorCode::InvalidParameter, "depth_scale must be positive");
    }
}

namespace {

void check_images(const DepthImage &depth, const RgbImage *rgb, const CameraIntrinsics &k) {
    k.validate();
    if (depth.width != k.width || depth.height != k.height) {
        throw Error(ErrorCode::DimensionMismatch,
                    "depth image is " + std::to_string(depth.width) + "x" +
                            std::to_string(depth.height) + ", intrinsics say " +
                            std::to_string(k.width) + "x" + std::to_string(k.height));
    }
    if (rgb && (rgb->width != k.width || rgb->height != k.height)) {
        throw Error(ErrorCode::DimensionMismatch, "color image does not match intrinsics");
    }
}

geometry::PointCloud back_project_box(const DepthImage &depth, const RgbImage *rgb,
                                      const CameraIntrinsics &k, const BBox2d &box) {
    std::vector<geometry::Vec3> pts;
    std::vector<geometry::Vec3> colors;
    for (int v = box.y; v < box.y + box.height; ++v) {
        for (int u = box.x; u < box.x + box.width; ++u) {
            const std::uint16_t d = depth.at(u, v);
            if (d == 0) continue;
            pts.push_back(k.back_project(u, v, d));
            if (rgb) {
                const std::uint8_t *c = rgb->at(u, v);
                colors.emplace_back(c[0] / 255.0, c[1] / 255.0, c[2] / 255.0);
            }
        }
    }
    return geometry::PointCloud(std::move(pts), {}, std::move(colors));
}

}  // namespace

geometry::PointCloud depth_to_cloud(const DepthImage &depth, const RgbImage *rgb,
                                    const CameraIntrinsics &k) {
    check_images(depth, rgb, k);
    return back_project_box(depth, rgb, k, {0, 0, k.width, k.height});
}

geometry::PointCloud crop_by_bbox(const DepthImage &depth, const RgbImage *rgb,
                                  const CameraIntrinsics &k, const BBox2d &box) {
    check_images(depth, rgb, k);
    const BBox2d c = clip_to_image(box, k.width, k.height);
    if (c.empty()) throw Error(ErrorCode::InvalidParameter, "bounding box misses the image");
    geometry::PointCloud cloud = back_project_box(depth, rgb, k, c);
    if (cloud.empty()) throw Error(ErrorCode::EmptyCrop, "no depth inside bounding box");
    return cloud;
}

}  // namespace posekit::ingest
