#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include "posekit/geometry/kd_tree.hpp"
#include "posekit/geometry/point_cloud.hpp"
#include "posekit/recognition/embedding.hpp"

// Slow, obviously-correct reference implementations used to freeze behaviour
// of the fast paths.
namespace oracle {

using posekit::geometry::PointCloud;
using posekit::geometry::Vec3;

std::vector<Vec3> uniform_points(std::size_t n, std::uint64_t seed, double half_extent = 1.0);

std::vector<posekit::geometry::Neighbor> brute_radius(const std::vector<Vec3> &pts, const Vec3 &q,
                                                      double r);
posekit::geometry::Neighbor brute_nearest(const std::vector<Vec3> &pts, const Vec3 &q);

// Direct O(n^2) transcription of the descriptor: per-pair Darboux angles,
// 11 bins each, SPFH averaged, FPFH = SPFH(p) + mean of SPFH(q)/|p - q|, each
// sub-histogram scaled to sum 100. nullopt where a point has no neighbour.
using Hist = std::array<double, 33>;
std::vector<std::optional<Hist>> naive_fpfh(const PointCloud &cloud, double radius);

// Smallest-eigenvalue eigenvector of the radius-neighbourhood covariance,
// unoriented. nullopt for fewer than 3 neighbours.
std::optional<Vec3> naive_normal(const PointCloud &cloud, std::size_t i, double radius);

struct Blobs {
    std::vector<posekit::recognition::Embedding> train, test;
    std::vector<std::string> train_labels, test_labels;
};
// Four isotropic Gaussian blobs with well separated means.
Blobs gaussian_blobs(std::size_t per_class_train, std::size_t per_class_test, std::size_t dim,
                     std::uint64_t seed);

// Fresh directory under the system temp dir; removed by the destructor.
class TempDir {
public:
    explicit TempDir(const std::string &tag);
    ~TempDir();
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;
    const std::filesystem::path &path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace oracle
