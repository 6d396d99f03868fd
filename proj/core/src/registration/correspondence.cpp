#include "posekit/registration/correspondence.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "posekit/error.hpp"
#include "posekit/geometry/kd_tree.hpp"

namespace posekit::registration {

namespace {

std::vector<double> flatten(const features::FeatureSet &fs) {
    std::vector<double> data(fs.size() * features::kFpfhDim);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t b = 0; b < features::kFpfhDim; ++b) {
            data[i * features::kFpfhDim + b] = fs.descriptors[i][b];
        }
    }
    return data;
}

// Spread test on the centred scatter matrix: a line or a point has at most one
// significant eigenvalue.
bool is_collinear(std::span<const Vec3> pts, const Vec3 &centroid) {
    Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
    for (const auto &p : pts) {
        const Vec3 d = p - centroid;
        scatter.noalias() += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(
            scatter, Eigen::EigenvaluesOnly);
    const Vec3 ev = solver.eigenvalues();
    return !(ev(2) > 0.0) || ev(1) <= 1e-12 * ev(2);
}

}  // namespace

CorrespondenceSet match_features(const features::FeatureSet &source,
                                 const features::FeatureSet &target, bool mutual) {
    if (source.empty() || target.empty()) {
        throw Error(ErrorCode::EmptyFeatureSet, "feature matching needs two non-empty sets");
    }
    constexpr std::size_t dim = features::kFpfhDim;
    const std::vector<double> src = flatten(source);
    const std::vector<double> tgt = flatten(target);
    const geometry::KdTree target_tree(tgt, dim);

    CorrespondenceSet forward(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
        const auto nn = target_tree.nearest(
                std::span<const double>(src.data() + i * dim, dim));
        forward[i] = {i, nn.index, nn.distance};
    }
    if (!mutual) return forward;
    return filter_mutual(source, target, forward);
}

CorrespondenceSet filter_mutual(const features::FeatureSet &source,
                                const features::FeatureSet &target,
                                const CorrespondenceSet &forward) {
    if (source.empty() || target.empty()) {
        throw Error(ErrorCode::EmptyFeatureSet, "feature matching needs two non-empty sets");
    }
    constexpr std::size_t dim = features::kFpfhDim;
    const std::vector<double> src = flatten(source);
    const std::vector<double> tgt = flatten(target);
    const geometry::KdTree source_tree(src, dim);
    // Each target is queried once even when several sources map onto it.
    std::vector<std::int64_t> back(target.size(), -1);
    CorrespondenceSet out;
    for (const auto &c : forward) {
        auto &b = back.at(c.target_index);
        if (b < 0) {
            b = static_cast<std::int64_t>(
                    source_tree
                            .nearest(std::span<const double>(
                                    tgt.data() + c.target_index * dim, dim))
                            .index);
        }
        if (static_cast<std::size_t>(b) == c.source_index) out.push_back(c);
    }
    return out;
}

std::optional<RigidTransform> try_estimate_rigid(std::span<const Vec3> source_points,
                                                 std::span<const Vec3> target_points) {
    const std::size_t n = source_points.size();
    if (n < 3 || target_points.size() != n) return std::nullopt;

    Vec3 cs = Vec3::Zero();
    Vec3 ct = Vec3::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        cs += source_points[i];
        ct += target_points[i];
    }
    cs /= static_cast<double>(n);
    ct /= static_cast<double>(n);
    if (is_collinear(source_points, cs) || is_collinear(target_points, ct)) {
        return std::nullopt;
    }

    Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        cross.noalias() += (source_points[i] - cs) * (target_points[i] - ct).transpose();
    }
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross,
                                                Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix3d &u = svd.matrixU();
    const Eigen::Matrix3d &v = svd.matrixV();
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    const Eigen::Matrix3d r = geometry::project_to_so3(v * d * u.transpose());
    if (!r.allFinite()) return std::nullopt;
    return RigidTransform(r, ct - r * cs);
}

RigidTransform estimate_rigid(std::span<const Vec3> source_points,
                              std::span<const Vec3> target_points) {
    if (source_points.size() != target_points.size()) {
        throw Error(ErrorCode::InvalidParameter, "point lists differ in length");
    }
    if (source_points.size() < 3) {
        throw Error(ErrorCode::DegenerateConfiguration,
                    "rigid estimation needs at least 3 pairs");
    }
    auto t = try_estimate_rigid(source_points, target_points);
    if (!t) {
        throw Error(ErrorCode::DegenerateConfiguration,
                    "correspondences are collinear or coincident");
    }
    return *t;
}

CorrespondencePoints gather_points(const PointCloud &source, const PointCloud &target,
                                   const features::FeatureSet &source_features,
                                   const features::FeatureSet &target_features,
                                   const CorrespondenceSet &correspondences) {
    CorrespondencePoints out;
    out.source.reserve(correspondences.size());
    out.target.reserve(correspondences.size());
    for (const auto &c : correspondences) {
        out.source.push_back(
                source.point(source_features.keypoint_indices.at(c.source_index)));
        out.target.push_back(
                target.point(target_features.keypoint_indices.at(c.target_index)));
    }
    return out;
}

}  // namespace posekit::registration
