#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posekit/geometry/aabb.hpp"
#include "posekit/geometry/rigid_transform.hpp"

namespace posekit::eval {

using geometry::Aabb;

// Wall-clock seconds per stage; absent when the stage did not run.
struct StageTimings {
    std::optional<double> classify;
    std::optional<double> coarse;
    std::optional<double> icp;

    friend bool operator==(const StageTimings &, const StageTimings &) = default;
};

// Outcome for one ground-truth annotation of one frame.
struct DetectionRecord {
    std::string frame_id;
    std::size_t annotation_index = 0;
    std::string instance_label;   // ground truth
    std::string predicted_label;  // classifier output, empty if it failed
    std::string method;           // coarse method configured for the run
    std::string mode;             // execution mode applied to the frame

    std::size_t correspondence_count = 0;  // inliers of the selected view
    std::optional<std::string> view_id;
    std::optional<geometry::RigidTransform> transform;  // view -> camera
    double coarse_inlier_ratio = 0.0;
    double coarse_inlier_rmse = 0.0;
    std::optional<double> icp_fitness;
    std::optional<double> icp_rmse;

    std::optional<Aabb> est_box;
    std::optional<Aabb> gt_box;
    double iou = 0.0;
    double mir = 0.0;
    bool is_true_positive = false;

    // Name of the error that stopped this record early (e.g. "NoMatch").
    std::string error;
    StageTimings stage_timings;

    friend bool operator==(const DetectionRecord &, const DetectionRecord &) = default;
};

// Fills iou, mir and is_true_positive from the boxes. A wrong predicted
// label is never a true positive, whatever the overlap. Missing boxes or a
// flat estimate score 0.
void score_detection(DetectionRecord &record);

}  // namespace posekit::eval
