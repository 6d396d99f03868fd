#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "posekit/ingest/camera.hpp"

namespace posekit::ingest {

struct Annotation {
    std::string label;
    BBox2d bbox;
    // Precomputed embedding file for this crop; the built-in color histogram
    // is used when absent.
    std::optional<std::filesystem::path> embedding;

    friend bool operator==(const Annotation &, const Annotation &) = default;
};

struct FrameManifest {
    std::string id;
    std::filesystem::path rgb;
    std::filesystem::path depth;
    std::vector<Annotation> annotations;

    friend bool operator==(const FrameManifest &, const FrameManifest &) = default;
};

// Parsed manifest file:
// {"intrinsics": {...}, "frames": [{"id", "rgb", "depth",
//   "annotations": [{"label", "bbox": [x, y, w, h], "embedding"?}]}]}
// Relative paths are resolved against the manifest's directory.
struct Dataset {
    CameraIntrinsics intrinsics;
    std::vector<FrameManifest> frames;
};

// Throws ParseError on malformed JSON or schema, IoError when the manifest or
// any referenced image is missing.
Dataset load_dataset(const std::filesystem::path &manifest);

// Paths are written relative to the manifest's directory when they lie
// below it.
void save_dataset(const std::filesystem::path &manifest, const Dataset &dataset);

struct FrameImages {
    DepthImage depth;
    RgbImage rgb;
};

FrameImages load_frame_images(const FrameManifest &frame);

}  // namespace posekit::ingest
