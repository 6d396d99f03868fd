#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "posekit/features/fpfh.hpp"
#include "posekit/geometry/rigid_transform.hpp"

namespace posekit::recognition {

using geometry::PointCloud;
using geometry::RigidTransform;

// Parameters a cloud was described with. A database only serves queries
// described with identical parameters.
struct DescriptionParams {
    double leaf = 0.01;           // voxel size, meters
    double fpfh_radius = 0.05;    // meters
    double normal_radius = 0.02;  // meters (2 x leaf unless configured)

    void validate() const;
    friend bool operator==(const DescriptionParams &, const DescriptionParams &) = default;
};

// Downsampled cloud with normals plus its FPFH features.
struct DescribedCloud {
    PointCloud cloud;
    features::FeatureSet features;
};

// voxel_downsample -> estimate_normals (viewpoint at the origin, i.e. the
// camera) -> float32 rounding -> FPFH over every point with a valid normal.
// The rounding makes the result exactly representable on disk.
DescribedCloud describe_cloud(const PointCloud &raw, const DescriptionParams &params);

struct ObjectView {
    std::string instance_label;
    std::string view_id;
    PointCloud cloud;
    features::FeatureSet features;
    std::optional<RigidTransform> source_pose_hint;

    friend bool operator==(const ObjectView &, const ObjectView &) = default;
};

ObjectView describe_view(std::string label, std::string view_id, const PointCloud &raw,
                         const DescriptionParams &params);

class ModelDatabase {
public:
    ModelDatabase() = default;
    explicit ModelDatabase(DescriptionParams params);

    const DescriptionParams &params() const noexcept { return params_; }

    // Throws InvalidParameter for an empty cloud, inconsistent features, a
    // label or id that is not a plain file name, or a duplicate id.
    void add_view(ObjectView view);

    std::vector<std::string> labels() const;
    bool contains(const std::string &label) const { return instances_.count(label) != 0; }
    // Throws UnknownInstance.
    const std::vector<ObjectView> &views(const std::string &label) const;
    std::size_t view_count() const noexcept;

    // Throws CompatibilityError when `query` differs from the build params.
    void check_compatible(const DescriptionParams &query) const;

    friend bool operator==(const ModelDatabase &, const ModelDatabase &) = default;

private:
    DescriptionParams params_;
    std::map<std::string, std::vector<ObjectView>> instances_;
};

// Layout: dir/manifest.json, dir/<label>/<view_id>.ply, dir/<label>/<view_id>.fpfh
void save_database(const std::filesystem::path &dir, const ModelDatabase &db);
// Throws IoError / ParseError, and CompatibilityError when `expected` is
// given and differs from the stored parameters.
ModelDatabase load_database(const std::filesystem::path &dir,
                            const std::optional<DescriptionParams> &expected = {});

}  // namespace posekit::recognition
