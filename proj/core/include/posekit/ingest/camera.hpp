#pragma once

#include <optional>

#include "posekit/geometry/point_cloud.hpp"
#include "posekit/ingest/image.hpp"

namespace posekit::ingest {

// Pinhole model. The defaults are the conventional values for a 640x480
// structured-light sensor of the Kinect class; treat them as configuration.
struct CameraIntrinsics {
    double fx = 570.3;
    double fy = 570.3;
    double cx = 319.5;
    double cy = 239.5;
    int width = 640;
    int height = 480;
    double depth_scale = 1000.0;  // depth units per meter

    // Throws InvalidParameter.
    void validate() const;

    // Back-projection of pixel (u, v) at raw depth d.
    geometry::Vec3 back_project(int u, int v, std::uint16_t d) const {
        const double z = static_cast<double>(d) / depth_scale;
        return {(u - cx) * z / fx, (v - cy) * z / fy, z};
    }
    // Continuous pixel coordinates of a camera-frame point (z > 0).
    Eigen::Vector2d project(const geometry::Vec3 &p) const {
        return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy};
    }

    friend bool operator==(const CameraIntrinsics &, const CameraIntrinsics &) = default;
};

// One point per pixel with nonzero depth, in row-major pixel order, colored
// from `rgb` when given. Throws DimensionMismatch if an image does not match
// the intrinsics.
geometry::PointCloud depth_to_cloud(const DepthImage &depth, const RgbImage *rgb,
                                    const CameraIntrinsics &k);

// depth_to_cloud restricted to the pixels of `box` (clipped to the image).
// Throws InvalidParameter when the box misses the image and EmptyCrop when
// no pixel inside has depth.
geometry::PointCloud crop_by_bbox(const DepthImage &depth, const RgbImage *rgb,
                                  const CameraIntrinsics &k, const BBox2d &box);

}  // namespace posekit::ingest
