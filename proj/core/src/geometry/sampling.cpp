#include "posekit/geometry/sampling.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>

#include <Eigen/Eigenvalues>

#include "posekit/error.hpp"
#include "posekit/geometry/kd_tree.hpp"

namespace posekit::geometry {

namespace {

using VoxelKey = std::array<std::int64_t, 3>;

struct VoxelAccumulator {
    Vec3 point_sum = Vec3::Zero();
    Vec3 normal_sum = Vec3::Zero();
    Vec3 color_sum = Vec3::Zero();
    std::size_t count = 0;
    std::size_t normal_count = 0;
};

// Relative eigenvalue gap below which a neighbourhood is treated as a line
// (or a single point) and its normal as undefined.
constexpr double kDegenerateRatio = 1e-10;

// Cells are centred on multiples of the leaf size.
std::int64_t voxel_coord(double x, double leaf) {
    return static_cast<std::int64_t>(std::floor(x / leaf + 0.5));
}

}  // namespace

PointCloud voxel_downsample(const PointCloud &cloud, double leaf) {
    if (!(leaf > 0.0) || !std::isfinite(leaf)) {
        throw Error(ErrorCode::InvalidParameter,
                    "voxel leaf size must be positive and finite");
    }
    std::map<VoxelKey, VoxelAccumulator> voxels;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3 &p = cloud.point(i);
        const VoxelKey key{voxel_coord(p.x(), leaf), voxel_coord(p.y(), leaf),
                           voxel_coord(p.z(), leaf)};
        auto &acc = voxels[key];
        acc.point_sum += p;
        ++acc.count;
        if (cloud.normal_valid(i)) {
            acc.normal_sum += cloud.normal(i);
            ++acc.normal_count;
        }
        if (cloud.has_colors()) acc.color_sum += cloud.colors()[i];
    }

    std::vector<Vec3> points;
    std::vector<Vec3> normals;
    std::vector<Vec3> colors;
    std::vector<std::uint8_t> mask;
    points.reserve(voxels.size());
    for (const auto &[key, acc] : voxels) {
        const double n = static_cast<double>(acc.count);
        points.push_back(acc.point_sum / n);
        if (cloud.has_normals()) {
            const double norm = acc.normal_sum.norm();
            const bool valid = acc.normal_count > 0 && norm > 1e-12;
            normals.push_back(valid ? Vec3(acc.normal_sum / norm) : Vec3::Zero());
            mask.push_back(valid ? 1 : 0);
        }
        if (cloud.has_colors()) colors.push_back(acc.color_sum / n);
    }
    return PointCloud(std::move(points), std::move(normals), std::move(colors),
                      std::move(mask));
}

PointCloud estimate_normals(const PointCloud &cloud, double radius,
                            const Vec3 &viewpoint) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw Error(ErrorCode::InvalidParameter,
                    "normal radius must be positive and finite");
    }
    if (cloud.size() < 3) {
        throw Error(ErrorCode::TooFewPoints,
                    "normal estimation needs at least 3 points");
    }
    const KdTree tree(cloud.points());
    std::vector<Vec3> normals(cloud.size(), Vec3::Zero());
    std::vector<std::uint8_t> mask(cloud.size(), 0);

    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto neighbors = tree.radius_search(cloud.point(i), radius);
        if (neighbors.size() < 3) continue;

        Vec3 mean = Vec3::Zero();
        for (const auto &nb : neighbors) mean += cloud.point(nb.index);
        mean /= static_cast<double>(neighbors.size());
        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        for (const auto &nb : neighbors) {
            const Vec3 d = cloud.point(nb.index) - mean;
            cov.noalias() += d * d.transpose();
        }
        cov /= static_cast<double>(neighbors.size());

        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
        if (solver.info() != Eigen::Success) continue;
        const Vec3 eig = solver.eigenvalues();  // ascending
        if (!(eig(2) > 0.0) || eig(1) <= kDegenerateRatio * eig(2)) continue;

        Vec3 n = solver.eigenvectors().col(0).normalized();
        if (n.dot(viewpoint - cloud.point(i)) < 0.0) n = -n;
        normals[i] = n;
        mask[i] = 1;
    }
    std::vector<Vec3> colors(cloud.colors().begin(), cloud.colors().end());
    std::vector<Vec3> points(cloud.points().begin(), cloud.points().end());
    return PointCloud(std::move(points), std::move(normals), std::move(colors),
                      std::move(mask));
}

}  // namespace posekit::geometry
