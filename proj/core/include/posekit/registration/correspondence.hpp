#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "posekit/features/fpfh.hpp"
#include "posekit/geometry/rigid_transform.hpp"

namespace posekit::registration {

using geometry::PointCloud;
using geometry::RigidTransform;
using geometry::Vec3;

// Indices are positions in the source / target FeatureSets.
struct Correspondence {
    std::size_t source_index = 0;
    std::size_t target_index = 0;
    double feature_distance = 0.0;

    friend bool operator==(const Correspondence &, const Correspondence &) = default;
};

using CorrespondenceSet = std::vector<Correspondence>;

// Nearest target descriptor (33-dim Euclidean, lowest index on ties) for each
// source descriptor, in source order. With `mutual`, only pairs that are each
// other's nearest neighbour survive. Throws EmptyFeatureSet.
CorrespondenceSet match_features(const features::FeatureSet &source,
                                 const features::FeatureSet &target, bool mutual);

// The subset of one-way matches whose target's nearest source descriptor is
// the match's own source.
CorrespondenceSet filter_mutual(const features::FeatureSet &source,
                                const features::FeatureSet &target,
                                const CorrespondenceSet &forward);

// Least-squares rigid transform taking source_points onto target_points
// (centroid alignment + SVD of the cross-covariance, reflection-corrected).
// Throws DegenerateConfiguration for fewer than 3 pairs or collinear points.
RigidTransform estimate_rigid(std::span<const Vec3> source_points,
                              std::span<const Vec3> target_points);

// Non-throwing variant for inner loops: nullopt where estimate_rigid throws.
std::optional<RigidTransform> try_estimate_rigid(std::span<const Vec3> source_points,
                                                 std::span<const Vec3> target_points);

// 3D positions of the keypoints referenced by a correspondence set.
struct CorrespondencePoints {
    std::vector<Vec3> source;
    std::vector<Vec3> target;
};

CorrespondencePoints gather_points(const PointCloud &source, const PointCloud &target,
                                   const features::FeatureSet &source_features,
                                   const features::FeatureSet &target_features,
                                   const CorrespondenceSet &correspondences);

}  // namespace posekit::registration
