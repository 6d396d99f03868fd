#include "posekit/eval/detection.hpp"

#include "posekit/eval/metrics.hpp"

namespace posekit::eval {

void score_detection(DetectionRecord &r) {
    r.iou = 0.0;
    r.mir = 0.0;
    r.is_true_positive = false;
    if (!r.est_box || !r.gt_box) return;
    r.iou = iou_3d(*r.gt_box, *r.est_box);
    r.mir = r.est_box->volume() > 0.0 ? mir(*r.gt_box, *r.est_box) : 0.0;
    r.is_true_positive =
            r.predicted_label == r.instance_label && is_true_positive(r.iou, r.mir);
}

}  // namespace posekit::eval
