#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "posekit/ingest/manifest.hpp"
#include "posekit/recognition/model_database.hpp"
#include "posekit/synthetic/render.hpp"

namespace posekit::synthetic {

// One scene crop and `view_count` described views of the same object from
// random viewpoints: the matching workload of a single detection.
struct ViewMatchingTask {
    recognition::DescribedCloud scene;
    std::vector<recognition::ObjectView> views;
    RigidTransform scene_pose;
};

ViewMatchingTask make_view_matching_task(std::uint64_t seed,
                                         const recognition::DescriptionParams &params,
                                         std::size_t view_count = 10);

struct DemoOptions {
    std::size_t instances = 3;
    std::size_t views_per_instance = 10;
    std::size_t frames = 4;
    std::size_t objects_per_frame = 2;
    double object_radius = 0.1;
    std::uint64_t seed = 0;
    ingest::CameraIntrinsics intrinsics;
};

struct DemoLayout {
    std::filesystem::path views_dir;  // <label>/<view>.ply, raw camera-frame clouds
    std::filesystem::path manifest;   // frames with annotations
};

// Renders a small labelled dataset: database views per instance plus
// frames holding several instances side by side. Frame objects reuse the
// orientation of one of their database views.
DemoLayout write_demo_dataset(const std::filesystem::path &dir, const DemoOptions &options);

}  // namespace posekit::synthetic
