#pragma once

#include "posekit/geometry/aabb.hpp"
#include "posekit/ingest/camera.hpp"

namespace posekit::eval {

using geometry::Aabb;

inline constexpr double kIouThreshold = 0.25;
inline constexpr double kMirThreshold = 0.90;

// Intersection over union; 0 when disjoint or when both boxes are flat.
double iou_3d(const Aabb &gt, const Aabb &est);

// Intersection over the estimated box's volume. Throws DegenerateBox when
// the estimate has zero volume.
double mir(const Aabb &gt, const Aabb &est);

// iou >= 0.25 or mir >= 0.90. Throws InvalidParameter outside [0, 1].
bool is_true_positive(double iou, double mir);

// Box of all back-projected valid-depth pixels inside `bbox`. Throws
// EmptyProjection when none has depth.
Aabb project_gt_box(const ingest::BBox2d &bbox, const ingest::DepthImage &depth,
                    const ingest::CameraIntrinsics &k);

}  // namespace posekit::eval
