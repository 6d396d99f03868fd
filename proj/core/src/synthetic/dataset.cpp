#include "posekit/synthetic/dataset.hpp"

#include <cstdio>

#include "posekit/error.hpp"
#include "posekit/geometry/ply_io.hpp"

namespace posekit::synthetic {

namespace fs = std::filesystem;

ViewMatchingTask make_view_matching_task(std::uint64_t seed,
                                         const recognition::DescriptionParams &params,
                                         std::size_t view_count) {
    const ingest::CameraIntrinsics k;
    const SyntheticObject obj = make_object("object", seed, 0.15, 200'000);
    std::mt19937_64 rng(seed + 17);
    ViewMatchingTask task;
    task.scene_pose = random_view_pose(rng);
    task.scene = recognition::describe_cloud(render_view(obj, task.scene_pose, k), params);
    for (std::size_t v = 0; v < view_count; ++v) {
        const RigidTransform pose = random_view_pose(rng);
        recognition::ObjectView view = recognition::describe_view(
                obj.label, "view_" + std::to_string(v), render_view(obj, pose, k), params);
        view.source_pose_hint = pose;
        task.views.push_back(std::move(view));
    }
    return task;
}

namespace {

std::string numbered(const char *prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i);
    return buf;
}

}  // namespace

DemoLayout write_demo_dataset(const fs::path &dir, const DemoOptions &opt) {
    if (opt.instances == 0 || opt.views_per_instance == 0 || opt.objects_per_frame == 0) {
        throw Error(ErrorCode::InvalidParameter, "demo dataset needs instances, views and objects");
    }
    const ingest::CameraIntrinsics &k = opt.intrinsics;
    DemoLayout layout{dir / "views", dir / "frames.json"};
    fs::create_directories(layout.views_dir);
    fs::create_directories(dir / "frames");

    std::vector<SyntheticObject> objects;
    std::vector<std::vector<RigidTransform>> view_poses(opt.instances);
    std::mt19937_64 rng(opt.seed);
    for (std::size_t i = 0; i < opt.instances; ++i) {
        objects.push_back(make_object(numbered("object_", i), opt.seed * 1000 + i + 1,
                                      opt.object_radius, 120'000));
        fs::create_directories(layout.views_dir / objects[i].label);
        for (std::size_t v = 0; v < opt.views_per_instance; ++v) {
            const RigidTransform pose = random_view_pose(rng);
            view_poses[i].push_back(pose);
            geometry::write_ply(layout.views_dir / objects[i].label / (numbered("view_", v) + ".ply"),
                                render_view(objects[i], pose, k));
        }
    }

    ingest::Dataset ds;
    ds.intrinsics = k;
    const std::size_t per_frame = std::min(opt.objects_per_frame, opt.instances);
    const double spacing = 2.5 * opt.object_radius;
    for (std::size_t f = 0; f < opt.frames; ++f) {
        std::vector<Placement> placements;
        for (std::size_t j = 0; j < per_frame; ++j) {
            const std::size_t inst = (f + j) % opt.instances;
            const std::size_t view = rng() % opt.views_per_instance;
            const RigidTransform &vp = view_poses[inst][view];
            const double x = (static_cast<double>(j) - 0.5 * static_cast<double>(per_frame - 1)) * spacing;
            placements.push_back({&objects[inst], RigidTransform(vp.rotation(), vp.translation() + Vec3(x, 0.0, 0.0))});
        }
        const RenderedScene scene = render_scene(placements, k);
        const std::string id = numbered("frame_", f);
        ingest::FrameManifest frame{id, dir / "frames" / (id + "_rgb.png"),
                                    dir / "frames" / (id + "_depth.png"), scene.annotations};
        ingest::write_rgb_png(frame.rgb, scene.rgb);
        ingest::write_depth_png(frame.depth, scene.depth);
        ds.frames.push_back(std::move(frame));
    }
    ingest::save_dataset(layout.manifest, ds);
    return layout;
}

}  // namespace posekit::synthetic
