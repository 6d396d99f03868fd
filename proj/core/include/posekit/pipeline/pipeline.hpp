#pragma once

#include <functional>
#include <vector>

#include "posekit/eval/detection.hpp"
#include "posekit/ingest/manifest.hpp"
#include "posekit/pipeline/config.hpp"
#include "posekit/recognition/logistic.hpp"
#include "posekit/recognition/model_database.hpp"

namespace posekit::pipeline {

// Decides the stages to run for a frame, given the configured mode.
using ModeTrigger = std::function<ExecutionMode(
        const ingest::FrameManifest &, const ingest::FrameImages &, ExecutionMode configured)>;

// Always the configured mode.
ExecutionMode static_mode(const ingest::FrameManifest &, const ingest::FrameImages &,
                          ExecutionMode configured);

// Escalates by proximity: Full when the nearest annotated object's median
// depth is within `full_within_m`, Coarse within `coarse_within_m`, else
// ClassifyOnly. Never exceeds the configured mode.
ModeTrigger distance_trigger(const ingest::CameraIntrinsics &k, double full_within_m,
                             double coarse_within_m);

struct PipelineContext {
    const recognition::ModelDatabase &db;
    const recognition::LogisticModel &model;
    const PipelineConfig &cfg;
    const ingest::CameraIntrinsics &intrinsics;
    ModeTrigger trigger = static_mode;
};

// Throws CompatibilityError when the database was described with other
// parameters or the model expects another embedding size.
void check_compatibility(const PipelineContext &ctx);

// One record per annotation. Stage failures (EmptyCrop, NoMatch, ...) are
// written into the record and never abort the frame.
std::vector<eval::DetectionRecord> run_frame(const ingest::FrameManifest &frame,
                                             const ingest::FrameImages &images,
                                             const PipelineContext &ctx);

// Loads the images itself; an unreadable frame yields error records.
std::vector<eval::DetectionRecord> run_frame(const ingest::FrameManifest &frame,
                                             const PipelineContext &ctx);

// All frames on `cfg.workers` threads; records come back in frame order and
// do not depend on the worker count.
std::vector<eval::DetectionRecord> run_dataset(const ingest::Dataset &dataset,
                                               const PipelineContext &ctx);

}  // namespace posekit::pipeline
