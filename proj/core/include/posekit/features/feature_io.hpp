#pragma once

#include <filesystem>
#include <iosfwd>

#include "posekit/features/fpfh.hpp"

namespace posekit::features {

inline constexpr std::uint32_t kFeatureFileVersion = 1;

// Layout (little-endian): "FPFH", u32 version, u32 count, u32 dim = 33, then
// count records of u32 keypoint index followed by 33 float32 bins.
void write_features(std::ostream &out, const FeatureSet &features);
FeatureSet read_features(std::istream &in);

void write_features(const std::filesystem::path &path, const FeatureSet &features);
FeatureSet read_features(const std::filesystem::path &path);

}  // namespace posekit::features
