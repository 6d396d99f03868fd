#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "posekit/geometry/point_cloud.hpp"

namespace posekit::features {

inline constexpr std::size_t kBinsPerFeature = 11;
inline constexpr std::size_t kFpfhDim = 3 * kBinsPerFeature;

// 33 bins: the α, φ and θ sub-histograms, 11 bins each. Each sub-histogram
// sums to 100 except for the all-zero histogram of an isolated point.
using FpfhDescriptor = std::array<float, kFpfhDim>;

// Descriptors aligned with the keypoint (cloud point) indices they describe.
struct FeatureSet {
    std::vector<std::uint32_t> keypoint_indices;
    std::vector<FpfhDescriptor> descriptors;

    std::size_t size() const noexcept { return descriptors.size(); }
    bool empty() const noexcept { return descriptors.empty(); }

    // Throws InvalidParameter unless lengths match and indices are unique
    // and below `cloud_size`.
    void validate(std::size_t cloud_size) const;

    friend bool operator==(const FeatureSet &, const FeatureSet &) = default;
};

// Darboux-frame pair features between a source and a target point.
struct PairFeatures {
    double alpha = 0.0;  // v · n_t in [-1, 1]
    double phi = 0.0;    // u · (p_t - p_s) / d in [-1, 1]
    double theta = 0.0;  // atan2(w · n_t, u · n_t) in [-π, π]
    bool valid = false;  // false for coincident points or a degenerate frame
};

// Computes α, φ, θ for the pair (p1, p2). The point whose normal makes the
// smaller angle with the connecting line becomes the source (p1 on ties,
// angles within 1e-9 rad count as tied);
// the frame is u = n_s, v = u × d̂, w = u × v.
PairFeatures pair_features(const geometry::Vec3 &p1, const geometry::Vec3 &n1,
                           const geometry::Vec3 &p2, const geometry::Vec3 &n2);

// floor((x - lo) / (hi - lo) * 11) clamped to [0, 10].
std::size_t feature_bin(double x, double lo, double hi);

// Simplified point feature histogram of one point against the given
// neighbours (which must not include the point itself). Returns all zeros
// for an empty neighbour list.
FpfhDescriptor compute_spfh(const geometry::PointCloud &cloud,
                            std::size_t point_index,
                            std::span<const std::size_t> neighbor_indices);

struct FpfhDiagnostics {
    std::size_t invalid_normal_keypoints = 0;  // dropped: no valid normal
    std::size_t isolated_keypoints = 0;        // dropped: no neighbours
};

// FPFH(p) = SPFH(p) + (1/k) Σ SPFH(p_i) / ‖p - p_i‖ over the k neighbours
// within `radius`, each sub-histogram renormalised to 100. Only points with
// valid normals take part; keypoints without a valid normal or without
// neighbours are dropped. Output order follows `keypoint_indices`.
// Throws InvalidParameter for a non-positive radius or a cloud without
// normals.
FeatureSet compute_fpfh(const geometry::PointCloud &cloud,
                        std::span<const std::size_t> keypoint_indices,
                        double radius, FpfhDiagnostics *diagnostics = nullptr);

// Every point of the cloud as a keypoint.
FeatureSet compute_fpfh(const geometry::PointCloud &cloud, double radius,
                        FpfhDiagnostics *diagnostics = nullptr);

}  // namespace posekit::features
