#pragma once

#include <span>
#include <string>
#include <vector>

#include "posekit/ingest/camera.hpp"
#include "posekit/ingest/manifest.hpp"
#include "posekit/synthetic/shapes.hpp"

namespace posekit::synthetic {

// A colored blob with a dense surface sampling, ready to be rendered.
struct SyntheticObject {
    std::string label;
    BlobShape shape;
    PointCloud surface;
};

// Blob of the given radius painted with a two-color palette drawn from
// `seed`, so different seeds give separable color histograms.
SyntheticObject make_object(std::string label, std::uint64_t seed, double radius = 0.15,
                            std::size_t surface_points = 200'000);

struct Placement {
    const SyntheticObject *object = nullptr;
    RigidTransform pose;  // object frame -> camera frame
};

struct RenderedScene {
    ingest::DepthImage depth;
    ingest::RgbImage rgb;
    // One per object with at least one visible pixel, bbox = tight pixel
    // extent of its visible pixels.
    std::vector<ingest::Annotation> annotations;
};

// Z-buffered point splatting (each surface point covers a
// (2 * splat + 1)^2 pixel footprint). Depth is rounded to sensor units.
RenderedScene render_scene(std::span<const Placement> objects, const ingest::CameraIntrinsics &k,
                           int splat = 1);

// Camera-frame cloud of one object seen alone at `pose`.
PointCloud render_view(const SyntheticObject &object, const RigidTransform &pose,
                       const ingest::CameraIntrinsics &k);

// Pose that puts the object `distance` meters in front of the camera with a
// random orientation.
RigidTransform random_view_pose(std::mt19937_64 &rng, double distance = 1.0);

}  // namespace posekit::synthetic
