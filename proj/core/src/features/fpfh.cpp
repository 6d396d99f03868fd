#include "posekit/features/fpfh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_set>

#include <Eigen/Geometry>

#include "posekit/error.hpp"
#include "posekit/geometry/kd_tree.hpp"

namespace posekit::features {

using geometry::PointCloud;
using geometry::Vec3;

namespace {

using Histogram = std::array<double, kFpfhDim>;

constexpr double kPi = std::numbers::pi;
constexpr double kTieAngle = 1e-9;

Histogram spfh_histogram(const PointCloud &cloud, std::size_t index,
                         std::span<const std::size_t> neighbors) {
    Histogram h{};
    std::size_t counted = 0;
    const Vec3 &p = cloud.point(index);
    const Vec3 &n = cloud.normal(index);
    for (auto j : neighbors) {
        const auto f = pair_features(p, n, cloud.point(j), cloud.normal(j));
        if (!f.valid) continue;
        h[feature_bin(f.alpha, -1.0, 1.0)] += 1.0;
        h[kBinsPerFeature + feature_bin(f.phi, -1.0, 1.0)] += 1.0;
        h[2 * kBinsPerFeature + feature_bin(f.theta, -kPi, kPi)] += 1.0;
        ++counted;
    }
    if (counted > 0) {
        const double scale = 100.0 / static_cast<double>(counted);
        for (auto &b : h) b *= scale;
    }
    return h;
}

void normalize_subhistograms(Histogram &h) {
    for (std::size_t f = 0; f < 3; ++f) {
        double sum = 0.0;
        for (std::size_t b = 0; b < kBinsPerFeature; ++b) {
            sum += h[f * kBinsPerFeature + b];
        }
        if (sum <= 0.0) continue;
        const double scale = 100.0 / sum;
        for (std::size_t b = 0; b < kBinsPerFeature; ++b) {
            h[f * kBinsPerFeature + b] *= scale;
        }
    }
}

FpfhDescriptor to_descriptor(const Histogram &h) {
    FpfhDescriptor d{};
    for (std::size_t i = 0; i < kFpfhDim; ++i) d[i] = static_cast<float>(h[i]);
    return d;
}

}  // namespace

void FeatureSet::validate(std::size_t cloud_size) const {
    if (keypoint_indices.size() != descriptors.size()) {
        throw Error(ErrorCode::InvalidParameter,
                    "feature set index/descriptor length mismatch");
    }
    std::unordered_set<std::uint32_t> seen;
    for (auto i : keypoint_indices) {
        if (i >= cloud_size) {
            throw Error(ErrorCode::InvalidParameter,
                        "keypoint index " + std::to_string(i) + " out of range");
        }
        if (!seen.insert(i).second) {
            throw Error(ErrorCode::InvalidParameter,
                        "duplicate keypoint index " + std::to_string(i));
        }
    }
    for (const auto &d : descriptors) {
        for (float b : d) {
            if (!std::isfinite(b) || b < 0.0f) {
                throw Error(ErrorCode::InvalidParameter,
                            "descriptor bin negative or non-finite");
            }
        }
    }
}

PairFeatures pair_features(const Vec3 &p1, const Vec3 &n1, const Vec3 &p2,
                           const Vec3 &n2) {
    PairFeatures out;
    Vec3 d = p2 - p1;
    const double dist = d.norm();
    if (dist == 0.0) return out;
    d /= dist;

    const double cos1 = n1.dot(d);
    const double cos2 = n2.dot(d);
    // Source: the endpoint whose normal is closer to parallel with the line.
    // Angles within kTieAngle count as a tie so that nearly equal normals
    // don't flip the frame under rounding (p1 stays the source).
    const bool swap = std::acos(std::min(1.0, std::abs(cos1))) >
                      std::acos(std::min(1.0, std::abs(cos2))) + kTieAngle;
    const Vec3 &ns = swap ? n2 : n1;
    const Vec3 &nt = swap ? n1 : n2;
    if (swap) d = -d;

    const Vec3 &u = ns;
    Vec3 v = u.cross(d);
    const double v_norm = v.norm();
    if (v_norm == 0.0) return out;
    v /= v_norm;
    const Vec3 w = u.cross(v);

    out.alpha = v.dot(nt);
    out.phi = u.dot(d);
    out.theta = std::atan2(w.dot(nt), u.dot(nt));
    out.valid = true;
    return out;
}

std::size_t feature_bin(double x, double lo, double hi) {
    const double t = std::floor((x - lo) / (hi - lo) * static_cast<double>(kBinsPerFeature));
    if (!(t > 0.0)) return 0;
    return std::min<std::size_t>(static_cast<std::size_t>(t), kBinsPerFeature - 1);
}

FpfhDescriptor compute_spfh(const PointCloud &cloud, std::size_t point_index,
                            std::span<const std::size_t> neighbor_indices) {
    if (point_index >= cloud.size()) {
        throw Error(ErrorCode::InvalidParameter, "point index out of range");
    }
    if (!cloud.has_normals()) {
        throw Error(ErrorCode::InvalidParameter, "SPFH requires normals");
    }
    return to_descriptor(spfh_histogram(cloud, point_index, neighbor_indices));
}

FeatureSet compute_fpfh(const PointCloud &cloud,
                        std::span<const std::size_t> keypoint_indices,
                        double radius, FpfhDiagnostics *diagnostics) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw Error(ErrorCode::InvalidParameter, "FPFH radius must be positive");
    }
    if (!cloud.has_normals()) {
        throw Error(ErrorCode::InvalidParameter, "FPFH requires normals");
    }
    FpfhDiagnostics diag;

    // Only points with valid normals take part in any neighbourhood.
    std::vector<std::size_t> valid;
    std::vector<Vec3> valid_points;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (cloud.normal_valid(i)) {
            valid.push_back(i);
            valid_points.push_back(cloud.point(i));
        }
    }
    const geometry::KdTree tree(valid_points);

    std::vector<std::optional<std::vector<std::size_t>>> neighbor_cache(cloud.size());
    auto neighbors_of = [&](std::size_t i) -> const std::vector<std::size_t> & {
        auto &slot = neighbor_cache[i];
        if (!slot) {
            slot.emplace();
            for (const auto &nb : tree.radius_search(cloud.point(i), radius)) {
                if (nb.distance == 0.0) continue;  // the point itself or a duplicate
                slot->push_back(valid[nb.index]);
            }
        }
        return *slot;
    };
    std::vector<std::optional<Histogram>> spfh_cache(cloud.size());
    auto spfh_of = [&](std::size_t i) -> const Histogram & {
        auto &slot = spfh_cache[i];
        if (!slot) slot = spfh_histogram(cloud, i, neighbors_of(i));
        return *slot;
    };

    FeatureSet out;
    out.keypoint_indices.reserve(keypoint_indices.size());
    out.descriptors.reserve(keypoint_indices.size());
    for (auto k : keypoint_indices) {
        if (k >= cloud.size()) {
            throw Error(ErrorCode::InvalidParameter, "keypoint index out of range");
        }
        if (!cloud.normal_valid(k)) {
            ++diag.invalid_normal_keypoints;
            continue;
        }
        const auto &nbrs = neighbors_of(k);
        if (nbrs.empty()) {
            ++diag.isolated_keypoints;
            continue;
        }
        Histogram h = spfh_of(k);
        const double inv_k = 1.0 / static_cast<double>(nbrs.size());
        for (auto j : nbrs) {
            const double weight = inv_k / (cloud.point(k) - cloud.point(j)).norm();
            const Histogram &hj = spfh_of(j);
            for (std::size_t b = 0; b < kFpfhDim; ++b) h[b] += weight * hj[b];
        }
        normalize_subhistograms(h);
        out.keypoint_indices.push_back(static_cast<std::uint32_t>(k));
        out.descriptors.push_back(to_descriptor(h));
    }
    if (diagnostics) *diagnostics = diag;
    return out;
}

FeatureSet compute_fpfh(const PointCloud &cloud, double radius,
                        FpfhDiagnostics *diagnostics) {
    std::vector<std::size_t> all(cloud.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return compute_fpfh(cloud, all, radius, diagnostics);
}

}  // namespace posekit::features
