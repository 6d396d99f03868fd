#include "posekit/geometry/point_cloud.hpp"

#include <cmath>
#include <string>

#include "posekit/error.hpp"

namespace posekit::geometry {

namespace {

std::vector<Vec3> round_through_float(const std::vector<Vec3> &in) {
    // Flat scalar loop. The per-Vec3 form is mis-vectorised by GCC 11 at -O3
    // (x and y of the last elements come back unrounded).
    std::vector<Vec3> out(in.size());
    const double *src = in.empty() ? nullptr : in.front().data();
    double *dst = out.empty() ? nullptr : out.front().data();
    for (std::size_t i = 0; i < 3 * in.size(); ++i) {
        dst[i] = static_cast<double>(static_cast<float>(src[i]));
    }
    return out;
}

}  // namespace

PointCloud::PointCloud(std::vector<Vec3> points) : points_(std::move(points)) {
    validate();
}

PointCloud::PointCloud(std::vector<Vec3> points,
                       std::vector<Vec3> normals,
                       std::vector<Vec3> colors,
                       std::vector<std::uint8_t> normal_mask)
    : points_(std::move(points)),
      normals_(std::move(normals)),
      colors_(std::move(colors)),
      normal_mask_(std::move(normal_mask)) {
    validate();
}

void PointCloud::validate() {
    const std::size_t n = points_.size();
    for (const auto &p : points_) {
        if (!p.allFinite()) {
            throw Error(ErrorCode::InvalidParameter,
                        "point cloud contains a non-finite coordinate");
        }
    }
    if (!normals_.empty() && normals_.size() != n) {
        throw Error(ErrorCode::InvalidParameter,
                    "normals length " + std::to_string(normals_.size()) +
                            " does not match point count " + std::to_string(n));
    }
    if (!colors_.empty() && colors_.size() != n) {
        throw Error(ErrorCode::InvalidParameter,
                    "colors length " + std::to_string(colors_.size()) +
                            " does not match point count " + std::to_string(n));
    }
    if (normals_.empty()) {
        if (!normal_mask_.empty()) {
            throw Error(ErrorCode::InvalidParameter,
                        "normal mask given without normals");
        }
    } else {
        if (normal_mask_.empty()) {
            normal_mask_.assign(n, 1);
            for (std::size_t i = 0; i < n; ++i) {
                if (normals_[i].isZero(0.0)) normal_mask_[i] = 0;
            }
        } else if (normal_mask_.size() != n) {
            throw Error(ErrorCode::InvalidParameter,
                        "normal mask length does not match point count");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!normal_mask_[i]) {
                normals_[i].setZero();
                continue;
            }
            const double norm = normals_[i].norm();
            if (!std::isfinite(norm) || norm == 0.0) {
                throw Error(ErrorCode::InvalidParameter,
                            "valid normal " + std::to_string(i) +
                                    " is zero or non-finite");
            }
            if (std::abs(norm - 1.0) > 1e-6) normals_[i] /= norm;
        }
    }
    for (auto &c : colors_) {
        if (!c.allFinite()) {
            throw Error(ErrorCode::InvalidParameter,
                        "point cloud contains a non-finite color");
        }
        c = c.cwiseMax(0.0).cwiseMin(1.0);
    }
}

std::size_t PointCloud::valid_normal_count() const noexcept {
    std::size_t count = 0;
    for (auto m : normal_mask_) count += m != 0;
    return count;
}

PointCloud PointCloud::with_normals(std::vector<Vec3> normals,
                                    std::vector<std::uint8_t> mask) const {
    return PointCloud(points_, std::move(normals), colors_, std::move(mask));
}

PointCloud PointCloud::without_normals() const {
    return PointCloud(points_, {}, colors_, {});
}

PointCloud PointCloud::quantized_to_float() const {
    std::vector<Vec3> points = round_through_float(points_);
    std::vector<Vec3> normals = round_through_float(normals_);
    std::vector<Vec3> colors(colors_.size());
    for (std::size_t i = 0; i < colors_.size(); ++i) {
        // Colors live on disk as uint8.
        colors[i] = (colors_[i] * 255.0).array().round().matrix() / 255.0;
    }
    PointCloud out;
    out.points_ = std::move(points);
    out.normals_ = std::move(normals);
    out.colors_ = std::move(colors);
    out.normal_mask_ = normal_mask_;
    return out;
}

PointCloud PointCloud::select(std::span<const std::size_t> indices) const {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
    std::vector<Vec3> colors;
    std::vector<std::uint8_t> mask;
    points.reserve(indices.size());
    for (auto i : indices) {
        points.push_back(points_.at(i));
        if (has_normals()) {
            normals.push_back(normals_[i]);
            mask.push_back(normal_mask_[i]);
        }
        if (has_colors()) colors.push_back(colors_[i]);
    }
    return PointCloud(std::move(points), std::move(normals), std::move(colors),
                      std::move(mask));
}

}  // namespace posekit::geometry
