#pragma once

#include "posekit/geometry/point_cloud.hpp"

namespace posekit::geometry {

// One point per occupied voxel of side `leaf`: the centroid of the voxel's
// points. Normals are averaged and renormalised (a voxel whose normals cancel
// gets an invalid normal); colors are averaged. Cells form a fixed lattice
// centred on integer multiples of the leaf: key = floor(coord / leaf + 1/2)
// per axis, so points on a cell face go to the higher cell and downsampling
// twice at the same leaf keeps the occupied set.
// Output is ordered by voxel key. Throws InvalidParameter for a non-positive
// or non-finite leaf.
PointCloud voxel_downsample(const PointCloud &cloud, double leaf);

// PCA normals over radius neighbourhoods (the query point included), oriented
// towards `viewpoint`. Neighbourhoods with fewer than 3 points or a
// rank-deficient covariance get an invalid normal. Throws TooFewPoints for
// clouds with fewer than 3 points.
PointCloud estimate_normals(const PointCloud &cloud, double radius,
                            const Vec3 &viewpoint = Vec3::Zero());

// Normal-estimation radius used when none is configured: twice the leaf.
inline double default_normal_radius(double leaf) { return 2.0 * leaf; }

}  // namespace posekit::geometry
