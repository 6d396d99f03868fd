#pragma once

#include <filesystem>

#include "posekit/geometry/point_cloud.hpp"

namespace posekit::geometry {

enum class PlyFormat { Ascii, BinaryLittleEndian };

// Reads the `vertex` element: x, y, z and optionally nx, ny, nz and
// red, green, blue. Any scalar property type is accepted and other scalar
// properties are skipped. A zero normal is read as an invalid normal.
// Throws ParseError on malformed input and IoError when the file can't be
// opened.
PointCloud read_ply(const std::filesystem::path &path);

// Writes x, y, z as float32, normals as float32 (invalid normals as zero)
// and colors as uint8.
void write_ply(const std::filesystem::path &path, const PointCloud &cloud,
               PlyFormat format = PlyFormat::BinaryLittleEndian);

}  // namespace posekit::geometry
