#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "posekit/eval/detection.hpp"

namespace posekit::eval {

inline constexpr std::size_t kMinCorrespondences = 3;

struct PrPoint {
    std::size_t threshold = 0;  // minimum correspondence count
    double precision = 0.0;
    double recall = 0.0;

    friend bool operator==(const PrPoint &, const PrPoint &) = default;
};

// Points in increasing threshold order, starting at 3.
struct PrCurve {
    std::vector<PrPoint> points;
    double auc = 0.0;
};

struct ScoredDetection {
    std::size_t correspondence_count = 0;
    bool is_true_positive = false;
};

// One point per threshold 3..max count. AUC is the trapezoid rule over the
// points taken in decreasing threshold order (recall ascending), starting
// from the anchor (recall 0, precision at the highest threshold). Throws
// UndefinedRecall when ground_truth_count is 0.
PrCurve prc_auc(std::span<const ScoredDetection> detections, std::size_t ground_truth_count);
PrCurve prc_auc(std::span<const DetectionRecord> records, std::size_t ground_truth_count);

// Mean seconds and FPS for one stage combination.
struct TimingColumn {
    std::string name;  // "classify", "classify+coarse", "classify+coarse+icp"
    double mean_seconds = 0.0;
    double fps = 0.0;  // 1 / mean_seconds, 0 when the mean is 0
    std::size_t samples = 0;
};

struct MethodTiming {
    std::string method;
    std::vector<TimingColumn> columns;
};

// Per method: each stage is averaged over the records where it ran, and
// column k sums the first k stage means, so the FPS columns never
// increase. Columns for stages that never ran are omitted.
std::vector<MethodTiming> aggregate_timings(std::span<const DetectionRecord> records);

}  // namespace posekit::eval
