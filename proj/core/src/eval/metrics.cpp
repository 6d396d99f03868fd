#include "posekit/eval/metrics.hpp"

#include <algorithm>

#include "posekit/error.hpp"

namespace posekit::eval {

double iou_3d(const Aabb &gt, const Aabb &est) {
    const double inter = geometry::intersection_volume(gt, est);
    const double uni = gt.volume() + est.volume() - inter;
    if (!(uni > 0.0)) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

double mir(const Aabb &gt, const Aabb &est) {
    const double v = est.volume();
    if (!(v > 0.0)) throw Error(ErrorCode::DegenerateBox, "estimated box has zero volume");
    return std::clamp(geometry::intersection_volume(gt, est) / v, 0.0, 1.0);
}

bool is_true_positive(double iou, double mir_value) {
    if (!(iou >= 0.0 && iou <= 1.0) || !(mir_value >= 0.0 && mir_value <= 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "iou and mir must lie in [0, 1]");
    }
    return iou >= kIouThreshold || mir_value >= kMirThreshold;
}

Aabb project_gt_box(const ingest::BBox2d &bbox, const ingest::DepthImage &depth,
                    const ingest::CameraIntrinsics &k) {
    try {
        return geometry::bounding_box(ingest::crop_by_bbox(depth, nullptr, k, bbox));
    } catch (const Error &e) {
        if (e.code() == ErrorCode::EmptyCrop) {
            throw Error(ErrorCode::EmptyProjection, "no valid depth inside ground-truth box");
        }
        throw;
    }
}

}  // namespace posekit::eval
