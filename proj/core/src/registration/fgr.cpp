#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "posekit/error.hpp"
#include "posekit/geometry/aabb.hpp"
#include "posekit/registration/coarse.hpp"

namespace posekit::registration {

namespace {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using geometry::Vec6;

double robust_objective(const CorrespondencePoints &pts, const RigidTransform &t,
                        double mu) {
    double e = 0.0;
    for (std::size_t i = 0; i < pts.source.size(); ++i) {
        const double r2 = (t.apply(pts.source[i]) - pts.target[i]).squaredNorm();
        e += mu * r2 / (mu + r2);
    }
    return e;
}

double edge_length(const Vec3 &a, const Vec3 &b) { return (a - b).norm(); }

}  // namespace

CorrespondenceSet fgr_tuple_filter(const PointCloud &source, const PointCloud &target,
                                   const features::FeatureSet &source_features,
                                   const features::FeatureSet &target_features,
                                   const CorrespondenceSet &mutual_matches,
                                   const CoarseParams &params) {
    const std::size_t n = mutual_matches.size();
    if (n < 3) return {};
    const CorrespondencePoints pts = gather_points(source, target, source_features,
                                                   target_features, mutual_matches);
    const double ratio = params.fgr_tuple_ratio;
    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    std::vector<std::uint8_t> keep(n, 0);
    std::size_t accepted = 0;
    const std::size_t trials = 100 * n;
    for (std::size_t trial = 0; trial < trials && accepted < params.fgr_tuple_count;
         ++trial) {
        const std::size_t a = pick(rng);
        const std::size_t b = pick(rng);
        const std::size_t c = pick(rng);
        if (a == b || b == c || a == c) continue;
        const double s[3] = {edge_length(pts.source[a], pts.source[b]),
                             edge_length(pts.source[b], pts.source[c]),
                             edge_length(pts.source[c], pts.source[a])};
        const double t[3] = {edge_length(pts.target[a], pts.target[b]),
                             edge_length(pts.target[b], pts.target[c]),
                             edge_length(pts.target[c], pts.target[a])};
        bool ok = true;
        for (int k = 0; k < 3 && ok; ++k) {
            ok = s[k] > 0.0 && t[k] > 0.0 && s[k] >= ratio * t[k] && t[k] >= ratio * s[k];
        }
        if (!ok) continue;
        keep[a] = keep[b] = keep[c] = 1;
        ++accepted;
    }
    CorrespondenceSet out;
    for (std::size_t i = 0; i < n; ++i) {
        if (keep[i]) out.push_back(mutual_matches[i]);
    }
    return out;
}

RegistrationResult fgr_registration(const PointCloud &source, const PointCloud &target,
                                    const features::FeatureSet &source_features,
                                    const features::FeatureSet &target_features,
                                    const CoarseParams &params) {
    if (!(params.inlier_threshold > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "inlier threshold must be positive");
    }
    const CorrespondenceSet forward =
            match_features(source_features, target_features, false);
    const CorrespondenceSet mutual =
            filter_mutual(source_features, target_features, forward);
    if (mutual.size() < 3) {
        throw Error(ErrorCode::TooFewCorrespondences,
                    "FGR found " + std::to_string(mutual.size()) + " mutual matches");
    }
    const CorrespondenceSet filtered = fgr_tuple_filter(
            source, target, source_features, target_features, mutual, params);
    if (filtered.size() < 3) {
        throw Error(ErrorCode::TooFewCorrespondences,
                    "FGR tuple test kept " + std::to_string(filtered.size()) +
                            " correspondences");
    }
    const CorrespondencePoints pts =
            gather_points(source, target, source_features, target_features, filtered);

    const double diameter =
            std::max(geometry::bounding_box(source).diagonal(),
                     geometry::bounding_box(target).diagonal());
    const double mu_floor = params.inlier_threshold * params.inlier_threshold;
    double mu = std::max(diameter * diameter, mu_floor);

    RigidTransform transform;
    std::vector<FgrStep> trace;
    trace.reserve(params.fgr_iterations);
    for (std::size_t it = 0; it < params.fgr_iterations; ++it) {
        if (it > 0 && it % 4 == 0) mu = std::max(mu / params.fgr_mu_division, mu_floor);

        Mat6 jtj = Mat6::Zero();
        Vec6 jtr = Vec6::Zero();
        for (std::size_t i = 0; i < pts.source.size(); ++i) {
            const Vec3 p = transform.apply(pts.source[i]);
            const Vec3 r = p - pts.target[i];
            const double r2 = r.squaredNorm();
            const double w = (mu / (mu + r2)) * (mu / (mu + r2));
            // r(ξ) ≈ r + ω × p + v, so J = [-[p]x | I].
            Eigen::Matrix<double, 3, 6> j;
            j << 0.0, p.z(), -p.y(), 1.0, 0.0, 0.0,
                 -p.z(), 0.0, p.x(), 0.0, 1.0, 0.0,
                 p.y(), -p.x(), 0.0, 0.0, 0.0, 1.0;
            jtj.noalias() += w * j.transpose() * j;
            jtr.noalias() += w * j.transpose() * r;
        }
        const Eigen::LDLT<Mat6> ldlt(jtj);
        if (ldlt.info() != Eigen::Success) break;
        const Vec6 step = -ldlt.solve(jtr);
        if (!step.allFinite()) break;

        const double before = robust_objective(pts, transform, mu);
        double after = before;
        double scale = 1.0;
        for (int halving = 0; halving < 12; ++halving, scale *= 0.5) {
            const RigidTransform candidate =
                    RigidTransform::from_twist(scale * step) * transform;
            const double e = robust_objective(pts, candidate, mu);
            if (e <= before) {
                transform = candidate;
                after = e;
                break;
            }
        }
        trace.push_back({mu, before, after});
    }

    // Scored on the same candidate set RANSAC samples from.
    const CorrespondenceSet &candidates =
            params.mutual_matching ? mutual : forward;
    RegistrationResult result = score_correspondences(
            source, target, source_features, target_features, candidates, transform,
            params.inlier_threshold);
    result.iterations = trace.size();
    result.fgr_trace = std::move(trace);
    return result;
}

}  // namespace posekit::registration
